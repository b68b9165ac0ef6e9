"""Executable bar witnesses.

For a source term ``t`` the witness is built by following the cases of the
correctness argument for the circle translation:

* at type ``N`` a :class:`NatWitness` pairs a decidable predicate ``S`` on
  finite sequences with the meaning ``g`` of ``t`` as a functional of
  ``alpha``; ``S`` is meant to be a bar securing ``g`` such that the second
  component of ``t°`` satisfies the general bar recursion equation for ``S``;
* at type ``rho0 -> rho1`` an :class:`ArrowWitness` maps a related argument
  (translated value, meaning, witness) to the witness of the result.

Witnesses are test instrumentation only; they never end up inside terms.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Callable, Iterable, Mapping, Sequence, Union

from barelim import syntax as sx
from barelim.evaluator import (
    FunV, Fuel, Meter, PairV, SeqV, Value, compile_term, evaluate, hat,
)
from barelim.translator import desugar, translate_core, mangle, rec_arg_type, validate_source
from barelim.types import N, Arrow, CircContext, FinType


@dataclasses.dataclass(frozen=True, eq=False)
class NatWitness:
    holds: Callable[[SeqV], bool]
    meaning: Callable[[FunV], int]

    def __call__(self, s: SeqV) -> bool:
        return self.holds(s)


@dataclasses.dataclass(frozen=True, eq=False)
class ArrowWitness:
    apply: Callable[[Related], BarWitness]


BarWitness = Union[NatWitness, ArrowWitness]


class Related:
    """A source term's translation, meaning and witness, as used in the proof's relation."""

    def __init__(self, type_: FinType, circ: Callable[[], Value], meaning: Callable[[FunV], Value],
                 witness: BarWitness):
        self.type = type_
        self._circ = circ
        self._circ_value = None
        self.meaning = meaning
        self.witness = witness

    def circ(self) -> Value:
        if self._circ_value is None:
            self._circ_value = self._circ()
        return self._circ_value


def related_apply(f: Related, x: Related) -> Related:
    assert isinstance(f.type, Arrow)
    return Related(
        f.type.cod,
        lambda: f.circ()(x.circ()),
        lambda a: f.meaning(a)(x.meaning(a)),
        f.witness.apply(x),
    )


def always(_s: SeqV) -> bool:
    return True


def numeral_related(ctx: CircContext, n: int) -> Related:
    """``n° ~ fun alpha. n`` with the trivial bar."""
    def circ():
        return PairV(FunV(lambda _a: n, label=f"fun a. {n}"),
                     FunV(lambda G: FunV(lambda _H: G)))
    return Related(N, circ, lambda _a: n, NatWitness(always, lambda _a: n))


class WitnessBuilder:
    def __init__(self, ctx: CircContext, alpha: str = "alpha", fuel: Fuel | None = None):
        self.ctx = ctx
        self.alpha = alpha
        self.fuel = fuel or Fuel()

    # meanings and translations of subterms, computed by the evaluator

    def meaning(self, t: sx.Term, wenv: Mapping[str, Related]) -> Callable[[FunV], Value]:
        names = sorted(sx.free_vars(t) - {self.alpha})
        scope = ((self.alpha, self.ctx.alpha_type),) + tuple((x, wenv[x].type) for x in names)
        code = compile_term(t, scope)
        fuel = self.fuel

        def run(a: FunV) -> Value:
            return code((a,) + tuple(wenv[x].meaning(a) for x in names), Meter(fuel))
        return run

    def circ(self, t: sx.Term, wenv: Mapping[str, Related]) -> Callable[[], Value]:
        names = sorted(sx.free_vars(t) - {self.alpha})
        translated = translate_core(t, self.ctx, self.alpha, {x: mangle(x) for x in names})
        return lambda: evaluate(translated, {mangle(x): wenv[x].circ() for x in names}, self.fuel)

    def related(self, t: sx.Term, wenv: Mapping[str, Related]) -> Related:
        types = {self.alpha: self.ctx.alpha_type, **{x: r.type for x, r in wenv.items()}}
        ty = sx.typecheck(t, types)
        return Related(ty, self.circ(t, wenv), self.meaning(t, wenv), self.witness(t, wenv))

    # the witness itself, one clause per term former

    def witness(self, t: sx.Term, wenv: Mapping[str, Related]) -> BarWitness:
        if isinstance(t, sx.Var):
            if t.name in wenv:
                return wenv[t.name].witness
            if t.name == self.alpha:
                return self.alpha_witness()
            raise KeyError(f"no witness for free variable {t.name!r}")
        if isinstance(t, (sx.Zero, sx.NatLit)):
            n = 0 if isinstance(t, sx.Zero) else t.n
            return NatWitness(always, lambda _a: n)
        if isinstance(t, sx.Succ):
            inner = self.witness(t.arg, wenv)
            return NatWitness(inner.holds, lambda a: inner.meaning(a) + 1)
        if isinstance(t, sx.Lam):
            return ArrowWitness(lambda r: self.witness(t.body, {**wenv, t.binder: r}))
        if isinstance(t, sx.App):
            return self.witness(t.fun, wenv).apply(self.related(t.arg, wenv))
        if isinstance(t, sx.Rec):
            return self.rec_witness(t.rho)
        raise TypeError(f"no witness clause for {type(t).__name__}")

    def alpha_witness(self) -> ArrowWitness:
        if self.ctx.tau == N:
            def apply_x(rx: Related) -> NatWitness:
                sx_, g = rx.witness, rx.meaning

                def holds(s: SeqV) -> bool:
                    return sx_(s) and g(hat(s)) < len(s.items)
                return NatWitness(holds, lambda a: a(g(a)))
            return ArrowWitness(apply_x)

        def apply_xy(rx: Related) -> ArrowWitness:
            def apply_y(ry: Related) -> NatWitness:
                sx_, g, sy_, h = rx.witness, rx.meaning, ry.witness, ry.meaning

                def holds(s: SeqV) -> bool:
                    return sx_(s) and sy_(s) and max(g(hat(s)), h(hat(s))) < len(s.items)
                return NatWitness(holds, lambda a: a(g(a))(h(a)))
            return ArrowWitness(apply_y)
        return ArrowWitness(apply_xy)

    def rec_witness(self, eta: FinType) -> ArrowWitness:
        has_arg = rec_arg_type(eta) is not None
        ctx = self.ctx

        def finish(ra: Related, rF: Related, rx: Related, rv: Related | None) -> NatWitness:
            # iterates[n] relates Rec°(a, fun k. F(k°))(n) to fun alpha. Rec(A alpha, psi alpha)(n)
            iterates = [ra]
            bars: dict[int, NatWitness] = {}

            def r(n: int) -> Related:
                while len(iterates) <= n:
                    m = len(iterates) - 1
                    step = related_apply(rF, numeral_related(ctx, m))
                    iterates.append(related_apply(step, iterates[m]))
                return related_apply(iterates[n], rv) if has_arg else iterates[n]

            def bar_n(n: int) -> NatWitness:
                if n not in bars:
                    bars[n] = r(n).witness
                return bars[n]

            s_x, g = rx.witness, rx.meaning

            def holds(s: SeqV) -> bool:
                return s_x(s) and bar_n(g(hat(s)))(s)

            def meaning(a: FunV) -> int:
                return r(g(a)).meaning(a)
            return NatWitness(holds, meaning)

        def with_x(ra, rF):
            def take_x(rx):
                if has_arg:
                    return ArrowWitness(lambda rv: finish(ra, rF, rx, rv))
                return finish(ra, rF, rx, None)
            return ArrowWitness(take_x)

        return ArrowWitness(lambda ra: ArrowWitness(lambda rF: with_x(ra, rF)))


def bar_witness(t: sx.Term, ctx: CircContext, wenv: Mapping[str, Related] | None = None,
                alpha: str = "alpha", fuel: Fuel | None = None) -> BarWitness:
    """Witness for ``t`` following the translation's structure (on the desugared term)."""
    wenv = dict(wenv or {})
    validate_source(t, ctx, alpha, {x: r.type for x, r in wenv.items()})
    core = desugar(t, {alpha: ctx.alpha_type, **{x: r.type for x, r in wenv.items()}})
    return WitnessBuilder(ctx, alpha, fuel).witness(core, wenv)


# -- samplers for the bar conditions -----------------------------------------------


def extend(s: SeqV, beta: FunV) -> FunV:
    """The infinite sequence ``s * beta``."""
    items, n = s.items, len(s.items)
    return FunV(lambda i: items[i] if i < n else beta(i - n), dom=N, cod=s.elem)


def truncate(a: FunV, n: int, elem: FinType) -> SeqV:
    return SeqV(tuple(a(i) for i in range(n)), elem)


@dataclasses.dataclass
class WitnessCheck:
    decidable: int = 0
    monotone: int = 0
    securing: int = 0
    bar: int = 0
    failures: list = dataclasses.field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {
            "decidable": self.decidable, "monotone": self.monotone, "securing": self.securing,
            "bar": self.bar, "bar_note": "sampled, fuel-bounded", "failures": len(self.failures),
        }


def check_bar(w: NatWitness, seqs: Iterable[SeqV], extensions: Sequence[SeqV],
              betas: Sequence[FunV], alphas: Sequence[FunV], max_n: int, elem: FinType) -> WitnessCheck:
    """Sample the decidability, monotonicity, securing and bar conditions of ``w``."""
    out = WitnessCheck()
    for s in seqs:
        v = w(s)
        if not isinstance(v, bool):
            out.failures.append(("decidable", s))
            continue
        out.decidable += 1
        if not v:
            continue
        for ext in extensions:
            if not w(SeqV(s.items + ext.items, s.elem)):
                out.failures.append(("monotone", s, ext))
            else:
                out.monotone += 1
        values = {w.meaning(extend(s, b)) for b in betas}
        if len(values) > 1:
            out.failures.append(("securing", s, sorted(values)))
        else:
            out.securing += 1
    for a in alphas:
        if any(w(truncate(a, n, elem)) for n in range(max_n + 1)):
            out.bar += 1
        else:
            out.failures.append(("bar", a))
    return out


def check_general_equation(delta: FunV, w: NatWitness, samples: Iterable[tuple[FunV, FunV, SeqV]]
                           ) -> list[tuple]:
    """Mismatches of ``delta`` against the general bar recursion equation for ``w``.

    ``delta`` is the value of a term of type ``(tau*->sigma)->(tau*->(tau->sigma)->sigma)->tau*->sigma``
    and results are compared exactly, so ``sigma`` should be ``N``.
    """
    bad = []
    for G, H, s in samples:
        lhs = delta(G)(H)(s)
        if w(s):
            rhs = G(s)
        else:
            rhs = H(s)(FunV(lambda x, G=G, H=H, s=s: delta(G)(H)(s.append(x))))
        if lhs != rhs:
            bad.append((G, H, s, lhs, rhs))
    return bad


def all_sequences(alphabet: Sequence[Value], max_len: int, elem: FinType) -> list[SeqV]:
    return [SeqV(items, elem) for n in range(max_len + 1) for items in itertools.product(alphabet, repeat=n)]

