"""Sampling, oracle-vs-translation equivalence checks and recursor census."""

from __future__ import annotations

import dataclasses
import itertools
import json
import random
import time
from typing import Callable, Iterator, Sequence

from barelim import syntax as sx
from barelim.evaluator import (
    Fuel, FunV, Meter, SeqV, Value, compile_term, eval_br_oracle, evaluate, format_value,
    value_to_json, values_equal,
)
from barelim.parse import format_program, format_term, parse
from barelim.translator import Elimination, desugar, elimination, split_y
from barelim.witness import WitnessCheck, all_sequences, bar_witness, check_bar, check_general_equation
from barelim.types import N, Arrow, CircContext, FinType, UnsupportedType, format_type, level

G_GRAMMAR = ("len", "head+len", "const", "sum-mod")
H_GRAMMAR = ("f(0)", "f(head)+len", "const", "f(f(0) mod m)")
PROBES = (0, 1, 5)


# -- recursor census ---------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Census:
    entries: tuple[tuple[FinType, int], ...]

    @property
    def max_level(self) -> int:
        return max((lvl for _, lvl in self.entries), default=0)

    def to_json(self) -> list[dict]:
        return [{"rec_type": format_type(ty), "level": lvl} for ty, lvl in self.entries]

    def table(self) -> str:
        counts: dict[tuple[str, int], int] = {}
        for ty, lvl in self.entries:
            key = (format_type(ty), lvl)
            counts[key] = counts.get(key, 0) + 1
        rows = [f"{'level':>5}  {'count':>5}  recursor type"]
        for (ty, lvl), n in sorted(counts.items(), key=lambda kv: (-kv[0][1], kv[0][0])):
            rows.append(f"{lvl:>5}  {n:>5}  {ty}")
        rows.append(f"max level {self.max_level}: term is in T_{self.max_level}")
        return "\n".join(rows)


def analyze_fragment(t: sx.Term) -> Census:
    """Every ``rec`` occurrence with its type level; arithmetic primitives count as level 0."""
    return Census(tuple((u.rho, level(u.rho)) for u in sx.subterms(t) if isinstance(u, sx.Rec)))


def fragment_bound(y_term: sx.Term, ctx: CircContext) -> int:
    # if0 at a higher type is a recursor in disguise, so measure the desugared term
    i = analyze_fragment(desugar(y_term, {})).max_level
    return 2 + max(1 + level(ctx.tau), level(ctx.sigma)) + i


# -- sample generation ---------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class SampleSpec:
    seed: int = 42
    n_samples: int = 100
    seq_alphabet_bound: int = 3
    max_seq_len: int = 4
    g_ids: tuple[str, ...] = G_GRAMMAR
    h_ids: tuple[str, ...] = H_GRAMMAR

    def __post_init__(self):
        if self.seq_alphabet_bound < 1:
            raise ValueError("alphabet bound must be positive")
        unknown = (set(self.g_ids) - set(G_GRAMMAR)) | (set(self.h_ids) - set(H_GRAMMAR))
        if unknown:
            raise ValueError(f"unknown generator ids: {sorted(unknown)}")


@dataclasses.dataclass(frozen=True)
class Sample:
    """Symbolic description of one ``(G, H, s)`` triple; realized per context."""

    g: str
    h: str
    c: int
    m: int
    items: tuple[int, ...]

    def describe(self) -> dict:
        return {"G": _g_label(self), "H": _h_label(self)}


def _g_label(x: Sample) -> str:
    return {"len": "fun s. |s|", "head+len": "fun s. hat s 0 + |s|", "const": f"fun s. {x.c}",
            "sum-mod": f"fun s. (sum s) mod {x.m}"}[x.g]


def _h_label(x: Sample) -> str:
    return {"f(0)": "fun s f. f 0", "f(head)+len": "fun s f. f (hat s 0) + |s|", "const": f"fun s f. {x.c}",
            "f(f(0) mod m)": f"fun s f. f (f 0 mod {x.m})"}[x.h]


def sample_at(spec: SampleSpec, index: int) -> Sample:
    rng = random.Random(f"{spec.seed}/{index}")
    g = rng.choice(spec.g_ids)
    h = rng.choice(spec.h_ids)
    c = rng.randrange(spec.seq_alphabet_bound + 2)
    m = rng.randrange(1, spec.seq_alphabet_bound + 1)
    n = rng.randrange(spec.max_seq_len + 1)
    items = tuple(rng.randrange(spec.seq_alphabet_bound) for _ in range(n))
    return Sample(g, h, c, m, items)


def element(ctx: CircContext, k: int, bound: int) -> Value:
    """The ``k``-th alphabet element of type ``tau``."""
    if ctx.tau == N:
        return k
    return FunV(lambda n: (n + k) % bound, label=f"fun n. (n+{k}) mod {bound}", dom=N, cod=N)


def _ground(v: Value) -> int:
    """Read a ``tau`` element as a number (applied to 0 when tau = N -> N)."""
    return v if isinstance(v, int) else v(0)


def realize(x: Sample, ctx: CircContext, bound: int) -> tuple[FunV, FunV, SeqV]:
    fn_tau = ctx.tau != N

    def head(s: SeqV) -> Value:
        return s.items[0] if s.items else (FunV(lambda _n: 0, label="0") if fn_tau else 0)

    def g_nat(s: SeqV) -> int:
        if x.g == "len":
            return len(s.items)
        if x.g == "head+len":
            return _ground(head(s)) + len(s.items)
        if x.g == "const":
            return x.c
        return sum(_ground(v) for v in s.items) % x.m

    if fn_tau:
        ident = FunV(lambda n: n, label="fun n. n", dom=N, cod=N)

        def arg0(s):
            return ident

        def arg_head(s):
            hd = head(s)
            return FunV(lambda n: hd(n) + 1, label=f"fun n. ({format_value(hd)}) n + 1", dom=N, cod=N)

        def arg_const(v):
            return FunV(lambda _n: v, label=f"fun n. {v}", dom=N, cod=N)
    else:
        def arg0(s):
            return 0

        def arg_head(s):
            return head(s)

        def arg_const(v):
            return v

    def h_nat(s: SeqV, f: Callable[[Value], int]) -> int:
        if x.h == "f(0)":
            return f(arg0(s))
        if x.h == "f(head)+len":
            return f(arg_head(s)) + len(s.items)
        if x.h == "const":
            return x.c
        return f(arg_const(f(arg0(s)) % x.m))

    s = SeqV(tuple(element(ctx, k, bound) for k in x.items), ctx.tau)
    sigma = ctx.sigma
    if sigma == N:
        G = FunV(g_nat, label=_g_label(x))
        H = FunV(lambda s_: FunV(lambda f: h_nat(s_, f)), label=_h_label(x))
    elif sigma == Arrow(N, N):
        # Lift to sigma = N -> N by threading an extra numeric argument z.
        G = FunV(lambda s_: FunV(lambda z: g_nat(s_) + z), label=f"fun s z. ({_g_label(x)}) s + z")
        H = FunV(lambda s_: FunV(lambda f: FunV(lambda z: h_nat(s_, lambda v: f(v)(z)))),
                 label=f"fun s f z. ({_h_label(x)}) s (fun v. f v z)")
    else:
        raise UnsupportedType(f"sampling supports sigma = N or N->N, got {format_type(sigma)}")
    return G, H, s


def sample_inputs(spec: SampleSpec, ctx: CircContext) -> Iterator[tuple[FunV, FunV, SeqV]]:
    for i in range(spec.n_samples):
        yield realize(sample_at(spec, i), ctx, spec.seq_alphabet_bound)


# -- equivalence checking ---------------------------------------------------------------

@dataclasses.dataclass
class Report:
    term: str
    tau: FinType
    sigma: FinType
    seed: int
    samples: list[dict]
    census: Census
    bound_j: int
    max_steps_used: int = 0
    counterexample: dict | None = None
    witness: dict | None = None
    wall_time: float = 0.0  # not serialized, so reports stay byte-identical across runs

    @property
    def passed(self) -> bool:
        return all(v["equal"] for v in self.samples)

    @property
    def max_level(self) -> int:
        return self.census.max_level

    def to_json(self) -> dict:
        return {
            "term": self.term,
            "tau": format_type(self.tau),
            "sigma": format_type(self.sigma),
            "seed": self.seed,
            "passed": self.passed,
            "comparison": "exact" if self.sigma == N else f"equal on probes {list(PROBES)}",
            "samples": self.samples,
            "census": self.census.to_json(),
            "max_level": self.max_level,
            "bound_j": self.bound_j,
            "fuel": {"max_steps_used": self.max_steps_used},
            "counterexample": self.counterexample,
            "witness": self.witness,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


class Checker:
    """Compares the eliminated term against the oracle on individual samples."""

    def __init__(self, y_term: sx.Term, ctx: CircContext, fuel: Fuel | None = None,
                 elim: Elimination | None = None):
        self.ctx = ctx
        self.fuel = fuel or Fuel()
        self.elim = elim or elimination(y_term, ctx)
        self.y_value = evaluate(y_term, fuel=self.fuel)
        self.code = compile_term(self.elim.term)
        self.max_steps = 0

    def run(self, x: Sample, bound: int) -> tuple[Value, Value, bool, SeqV]:
        G, H, s = realize(x, self.ctx, bound)
        m = Meter(self.fuel)
        translated = self.code((), m)(G)(H)(s)
        oracle = eval_br_oracle(G, H, self.y_value, s, self.fuel)
        self.max_steps = max(self.max_steps, m.steps)
        equal = values_equal(translated, oracle, self.ctx.sigma, list(PROBES))
        return oracle, translated, equal, s


def _render(v: Value, sigma: FinType):
    if sigma == N:
        return value_to_json(v)
    return {str(p): value_to_json(v(p)) for p in PROBES}


def check_equivalence(y_term: sx.Term, ctx: CircContext, spec: SampleSpec,
                      fuel: Fuel | None = None, witness: bool = True) -> Report:
    start = time.perf_counter()
    checker = Checker(y_term, ctx, fuel)
    bound = spec.seq_alphabet_bound
    verdicts = []
    first_bad = None
    for i in range(spec.n_samples):
        x = sample_at(spec, i)
        oracle, translated, equal, s = checker.run(x, bound)
        verdicts.append({
            "index": i, **x.describe(), "s": value_to_json(s),
            "oracle": _render(oracle, ctx.sigma), "translated": _render(translated, ctx.sigma),
            "equal": equal,
        })
        if not equal and first_bad is None:
            first_bad = x
    report = Report(
        term=format_term(y_term), tau=ctx.tau, sigma=ctx.sigma, seed=spec.seed, samples=verdicts,
        census=analyze_fragment(checker.elim.term), bound_j=fragment_bound(y_term, ctx),
    )
    if first_bad is not None:
        small = shrink(first_bad, lambda x: not checker.run(x, bound)[2])
        oracle, translated, _, s = checker.run(small, bound)
        report.counterexample = {**small.describe(), "s": value_to_json(s),
                                 "sample": dataclasses.asdict(small),
                                 "oracle": _render(oracle, ctx.sigma),
                                 "translated": _render(translated, ctx.sigma)}
    if witness:
        report.witness = check_witness(y_term, ctx, fuel=fuel).to_json()
    report.max_steps_used = checker.max_steps
    report.wall_time = time.perf_counter() - start
    return report


def _candidates(x: Sample) -> Iterator[Sample]:
    items = x.items
    for i in range(len(items)):
        yield dataclasses.replace(x, items=items[:i] + items[i + 1:])
    for i, v in enumerate(items):
        if v:
            yield dataclasses.replace(x, items=items[:i] + (0,) + items[i + 1:])
    if x.g != G_GRAMMAR[0]:
        yield dataclasses.replace(x, g=G_GRAMMAR[0])
    if x.h != H_GRAMMAR[0]:
        yield dataclasses.replace(x, h=H_GRAMMAR[0])
    if x.c:
        yield dataclasses.replace(x, c=0)
    if x.m > 1:
        yield dataclasses.replace(x, m=1)


def shrink(x: Sample, fails: Callable[[Sample], bool]) -> Sample:
    """Greedily simplify a failing sample while it keeps failing."""
    improved = True
    while improved:
        improved = False
        for cand in _candidates(x):
            if fails(cand):
                x, improved = cand, True
                break
    return x


def grid(ctx: CircContext, alphabet: int, max_len: int,
         g_ids: Sequence[str] = G_GRAMMAR, h_ids: Sequence[str] = H_GRAMMAR,
         c: int = 2, m: int = 2) -> Iterator[tuple[Sample, tuple[FunV, FunV, SeqV]]]:
    """Every grammar pair against every sequence over ``range(alphabet)`` up to ``max_len``."""
    for n in range(max_len + 1):
        for items in itertools.product(range(alphabet), repeat=n):
            for g in g_ids:
                for h in h_ids:
                    x = Sample(g, h, c, m, items)
                    yield x, realize(x, ctx, alphabet)


# -- first component and bar witnesses ---------------------------------------------------

def sample_alphas(ctx: CircContext, n: int, seed: int = 0, bound: int = 4, period: int = 7) -> list[FunV]:
    """Deterministic host functions ``N -> tau`` given by random periodic tables."""
    out = []
    for i in range(n):
        rng = random.Random(f"alpha/{seed}/{i}")
        table = [rng.randrange(bound) for _ in range(period)]
        if ctx.tau == N:
            out.append(FunV(lambda j, t=table: t[j % period], label=f"periodic {table}", dom=N, cod=N))
        else:
            elems = [element(ctx, k, bound) for k in range(bound)]
            out.append(FunV(lambda j, t=table: elems[t[j % period]], label=f"periodic {table}", dom=N,
                            cod=ctx.tau))
    return out


def check_val(y_term: sx.Term, ctx: CircContext, n: int = 50, seed: int = 0,
              fuel: Fuel | None = None) -> list[FunV]:
    """Sampled ``alpha`` on which the first component of the translation disagrees with ``y_term``."""
    elim = elimination(y_term, ctx)
    val = evaluate(sx.Fst(elim.circ.translated), fuel=fuel)
    y = evaluate(y_term, fuel=fuel)
    return [a for a in sample_alphas(ctx, n, seed) if val(a) != y(a)]


@dataclasses.dataclass
class WitnessSummary:
    check: WitnessCheck
    equation_samples: int
    equation_mismatches: int

    @property
    def ok(self) -> bool:
        return self.check.ok and self.equation_mismatches == 0

    def to_json(self) -> dict:
        return {**self.check.summary(), "equation_samples": self.equation_samples,
                "equation_mismatches": self.equation_mismatches}


def check_witness(y_term: sx.Term, ctx: CircContext, alphabet: int = 3, max_len: int = 3,
                  fuel: Fuel | None = None) -> WitnessSummary:
    """Sample the bar conditions of the witness for the body of ``y_term`` and test the
    general bar recursion equation of the translation's second component against it."""
    alpha, body = split_y(y_term, ctx)
    w = bar_witness(body, ctx, alpha=alpha, fuel=fuel)
    elems = [element(ctx, k, alphabet) for k in range(alphabet)]
    seqs = all_sequences(elems, max_len, ctx.tau)
    betas = [FunV(lambda i, k=k: elems[(i + k) % alphabet]) for k in range(alphabet)]
    betas.append(FunV(lambda i: elems[0] if i % 2 else elems[-1]))
    chk = check_bar(w, seqs, all_sequences(elems, 2, ctx.tau), betas,
                    sample_alphas(ctx, 8, bound=alphabet), max_n=64, elem=ctx.tau)
    n_eq = bad = 0
    if ctx.sigma == N:
        delta = evaluate(elimination(y_term, ctx).bar_recursor, fuel=fuel)
        samples = [G_H_s for _, G_H_s in grid(ctx, alphabet, max_len, c=2, m=2)]
        n_eq = len(samples)
        bad = len(check_general_equation(delta, w, samples))
    return WitnessSummary(chk, n_eq, bad)


# -- corpus and demo -----------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class CorpusEntry:
    name: str
    tau: FinType
    source: str

    def term(self) -> sx.Term:
        return parse(self.source)


NN = Arrow(N, N)
DEMO_SOURCE = "fun alpha:N->N. rec[N] 0 (fun k:N. alpha) (alpha 0)"

CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry("zero", N, "fun alpha:N->N. 0"),
    CorpusEntry("const1", N, "fun alpha:N->N. 1"),
    CorpusEntry("const2", N, "fun alpha:N->N. 2"),
    CorpusEntry("const3", N, "fun alpha:N->N. 3"),
    CorpusEntry("apply0", N, "fun alpha:N->N. alpha 0"),
    CorpusEntry("apply-twice", N, "fun alpha:N->N. alpha (alpha 0)"),
    CorpusEntry("sum01", N, "fun alpha:N->N. plus (alpha 0) (alpha 1)"),
    CorpusEntry("demo", N, DEMO_SOURCE),
    CorpusEntry("rec-arrow", N,
                "fun alpha:N->N. rec[N->N] (fun n:N. alpha n) (fun k:N. fun f:N->N. fun n:N. f (alpha n)) "
                "(alpha 0) 0"),
    CorpusEntry("max01", N, "fun alpha:N->N. max (alpha 0) (alpha 1)"),
    CorpusEntry("fn-apply00", NN, "fun alpha:N->N->N. alpha 0 0"),
    CorpusEntry("fn-nested", NN, "fun alpha:N->N->N. alpha (alpha 0 0) 1"),
    CorpusEntry("fn-rec", NN,
                "fun alpha:N->N->N. rec[N] 0 (fun k:N. fun r:N. alpha r (alpha k 1)) (alpha 1 (alpha 0 0))"),
)


def corpus(tau: FinType | None = None) -> list[CorpusEntry]:
    return [c for c in CORPUS if tau is None or c.tau == tau]


def run_demo(out: Callable[[str], None] = print, seed: int = 42, n_samples: int = 100) -> int:
    ctx = CircContext(N, N)
    y = parse(DEMO_SOURCE)
    elim = elimination(y, ctx)
    out(f"Y = {format_term(y)}")
    out("")
    out(format_program(elim.term, elim.definitions()))
    out("")
    report = check_equivalence(y, ctx, SampleSpec(seed=seed, n_samples=n_samples))
    out(report.census.table())
    out(f"bound j = {report.bound_j}")
    agree = sum(v["equal"] for v in report.samples)
    out(f"{agree}/{len(report.samples)} samples agree with the oracle (seed {seed})")
    if report.counterexample:
        out("counterexample: " + json.dumps(report.counterexample))
    return 0 if report.passed and report.max_level <= report.bound_j else 1
