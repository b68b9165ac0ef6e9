"""Call-by-value evaluation of terms.

Terms are compiled once into nested Python closures over a tuple
environment (variables resolve to tuple positions at compile time), then
run against a :class:`Meter` that enforces the step and BR-depth budgets.
"""

from __future__ import annotations

import dataclasses
import sys
import threading
from typing import Any, Callable, Mapping, Optional, Sequence, Union

from barelim import syntax as sx
from barelim.types import N, Arrow, FinType, Nat, Prod, Seq

DEFAULT_STEPS = 10**6
DEFAULT_BR_DEPTH = 10**4


class EvalError(RuntimeError):
    pass


class StuckTerm(EvalError):
    """A well-typed term should never get stuck; seeing this means a typing bug."""


class FuelExhausted(EvalError):
    def __init__(self, kind: str, limit: int, path: Optional[SeqV] = None):
        msg = f"{kind} budget of {limit} exhausted"
        if path is not None:
            msg += f" at s = {format_value(path)}"
        super().__init__(msg)
        self.kind = kind
        self.limit = limit
        self.path = path


@dataclasses.dataclass(frozen=True)
class Fuel:
    max_steps: int = DEFAULT_STEPS
    max_br_depth: int = DEFAULT_BR_DEPTH

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_br_depth <= 0:
            raise ValueError("fuel limits must be positive")


class Meter:
    """Mutable step counter shared by everything one evaluation creates."""

    __slots__ = ("fuel", "steps")

    def __init__(self, fuel: Fuel | None = None):
        self.fuel = fuel or Fuel()
        self.steps = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.fuel.max_steps:
            raise FuelExhausted("step", self.fuel.max_steps)


# -- values -------------------------------------------------------------------
# Numerals are plain Python ints.


@dataclasses.dataclass(frozen=True)
class SeqV:
    items: tuple
    elem: FinType

    def __len__(self) -> int:
        return len(self.items)

    def append(self, x: Value) -> SeqV:
        return SeqV(self.items + (x,), self.elem)


@dataclasses.dataclass(frozen=True)
class PairV:
    left: Any
    right: Any


class FunV:
    """A function value: either a compiled closure or a host-injected callable."""

    __slots__ = ("fn", "label", "dom", "cod")

    def __init__(self, fn: Callable[[Any], Any], label: str | None = None,
                 dom: FinType | None = None, cod: FinType | None = None):
        self.fn = fn
        self.label = label
        self.dom = dom
        self.cod = cod

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self) -> str:
        return f"FunV({self.label or '<closure>'})"


Value = Union[int, SeqV, PairV, FunV]


def zero_value(tau: FinType) -> Value:
    if isinstance(tau, Nat):
        return 0
    if isinstance(tau, Arrow):
        z = zero_value(tau.cod)
        return FunV(lambda _x: z, label="0", dom=tau.dom, cod=tau.cod)
    if isinstance(tau, Seq):
        return SeqV((), tau.elem)
    if isinstance(tau, Prod):
        return PairV(zero_value(tau.left), zero_value(tau.right))
    raise TypeError(f"not a finite type: {tau!r}")


def hat(s: SeqV) -> FunV:
    items, zero = s.items, zero_value(s.elem)
    n = len(items)
    return FunV(lambda i: items[i] if i < n else zero, label=f"hat {format_value(s)}", dom=N, cod=s.elem)


def seq_of(items: Sequence[Value], elem: FinType = N) -> SeqV:
    return SeqV(tuple(items), elem)


def format_value(v: Value) -> str:
    if isinstance(v, bool):
        raise TypeError("booleans are not values")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, SeqV):
        return "[" + ", ".join(format_value(x) for x in v.items) + "]"
    if isinstance(v, PairV):
        return f"<{format_value(v.left)}, {format_value(v.right)}>"
    if isinstance(v, FunV):
        return v.label or "<fun>"
    raise TypeError(f"not a value: {v!r}")


def value_to_json(v: Value):
    if isinstance(v, int):
        return v
    if isinstance(v, SeqV):
        return [value_to_json(x) for x in v.items]
    if isinstance(v, PairV):
        return {"fst": value_to_json(v.left), "snd": value_to_json(v.right)}
    return format_value(v)


def values_equal(a: Value, b: Value, at: FinType,
                 probes: Sequence[Value] | Mapping[FinType, Sequence[Value]] = ()) -> bool:
    """Exact equality at ground types; at arrow types, equality on ``probes`` only."""
    if isinstance(at, Nat):
        return a == b
    if isinstance(at, Seq):
        return len(a.items) == len(b.items) and all(
            values_equal(x, y, at.elem, probes) for x, y in zip(a.items, b.items))
    if isinstance(at, Prod):
        return (values_equal(a.left, b.left, at.left, probes)
                and values_equal(a.right, b.right, at.right, probes))
    if isinstance(at, Arrow):
        args = probes.get(at.dom, ()) if isinstance(probes, Mapping) else probes
        return all(values_equal(a(p), b(p), at.cod, probes) for p in args)
    raise TypeError(f"not a finite type: {at!r}")


# -- compilation --------------------------------------------------------------

Code = Callable[[tuple, Meter], Value]
Scope = tuple  # of (name, type) pairs, innermost last


def _lookup(scope: Scope, name: str) -> int:
    for i in range(len(scope) - 1, -1, -1):
        if scope[i][0] == name:
            return i
    raise StuckTerm(f"unbound variable {name!r}")


def compile_term(t: sx.Term, scope: Scope = ()) -> Code:
    if isinstance(t, sx.Var):
        i = _lookup(scope, t.name)
        return lambda env, m: env[i]
    if isinstance(t, (sx.Zero, sx.NatLit)):
        n = 0 if isinstance(t, sx.Zero) else t.n
        return lambda env, m: n
    if isinstance(t, sx.Succ):
        arg = compile_term(t.arg, scope)
        return lambda env, m: arg(env, m) + 1
    if isinstance(t, sx.Lam):
        body = compile_term(t.body, scope + ((t.binder, t.binder_type),))
        dom = t.binder_type

        def make_closure(env, m):
            def call(v):
                m.tick()
                return body(env + (v,), m)
            return FunV(call, dom=dom)
        return make_closure
    if isinstance(t, sx.App):
        fun, arg = compile_term(t.fun, scope), compile_term(t.arg, scope)

        def apply(env, m):
            f = fun(env, m)
            return f(arg(env, m))
        return apply
    if isinstance(t, sx.Rec):
        return lambda env, m: _rec_value(m)
    if isinstance(t, sx.BRConst):
        return lambda env, m: _br_value(m)
    if isinstance(t, sx.EmptySeq):
        empty = SeqV((), t.elem)
        return lambda env, m: empty
    if isinstance(t, sx.Append):
        s, x = compile_term(t.seq, scope), compile_term(t.item, scope)
        return lambda env, m: s(env, m).append(x(env, m))
    if isinstance(t, sx.Concat):
        a, b = compile_term(t.left, scope), compile_term(t.right, scope)

        def concat(env, m):
            left = a(env, m)
            return SeqV(left.items + b(env, m).items, left.elem)
        return concat
    if isinstance(t, sx.Len):
        s = compile_term(t.seq, scope)
        return lambda env, m: len(s(env, m).items)
    if isinstance(t, sx.Hat):
        s = compile_term(t.seq, scope)
        return lambda env, m: hat(s(env, m))
    if isinstance(t, sx.Index):
        target, idx = compile_term(t.target, scope), compile_term(t.idx, scope)

        def index(env, m):
            v, i = target(env, m), idx(env, m)
            if isinstance(v, SeqV):
                return v.items[i] if i < len(v.items) else zero_value(v.elem)
            return v(i)
        return index
    if isinstance(t, sx.Truncate):
        fn_type = sx.typecheck(t.fn, dict(scope))
        elem = fn_type.cod
        fn, n = compile_term(t.fn, scope), compile_term(t.n, scope)

        def truncate(env, m):
            f = fn(env, m)
            return SeqV(tuple(f(i) for i in range(n(env, m))), elem)
        return truncate
    if isinstance(t, sx.Pair):
        a, b = compile_term(t.left, scope), compile_term(t.right, scope)
        return lambda env, m: PairV(a(env, m), b(env, m))
    if isinstance(t, sx.Fst):
        p = compile_term(t.pair, scope)
        return lambda env, m: p(env, m).left
    if isinstance(t, sx.Snd):
        p = compile_term(t.pair, scope)
        return lambda env, m: p(env, m).right
    if isinstance(t, sx.BINARY_NAT):
        a, b = compile_term(t.left, scope), compile_term(t.right, scope)
        op = _NAT_OPS[type(t)]
        return lambda env, m: op(a(env, m), b(env, m))
    if isinstance(t, sx.IfZero):
        c = compile_term(t.cond, scope)
        then, orelse = compile_term(t.then, scope), compile_term(t.orelse, scope)
        # Only the selected branch is evaluated.
        return lambda env, m: then(env, m) if c(env, m) == 0 else orelse(env, m)
    raise StuckTerm(f"cannot evaluate {t!r}")


_NAT_OPS = {
    sx.Lt: lambda a, b: 1 if a < b else 0,
    sx.Geq: lambda a, b: 1 if a >= b else 0,
    sx.Max: max,
    sx.Plus: lambda a, b: a + b,
    sx.Monus: lambda a, b: a - b if a > b else 0,
}


def _rec_value(m: Meter) -> FunV:
    def with_base(a):
        def with_step(f):
            def run(n):
                r = a
                for k in range(n):
                    m.tick()
                    r = f(k)(r)
                return r
            return FunV(run, label="rec a f", dom=N)
        return FunV(with_step, label="rec a")
    return FunV(with_base, label="rec")


def _br_value(m: Meter) -> FunV:
    return FunV(lambda G: FunV(lambda H: FunV(lambda Y: FunV(
        lambda s: br_oracle(G, H, Y, s, m), label="br G H Y"))), label="br")


def infer_value_type(v: Value) -> FinType | None:
    if isinstance(v, int):
        return N
    if isinstance(v, SeqV):
        return Seq(v.elem)
    if isinstance(v, PairV):
        left, right = infer_value_type(v.left), infer_value_type(v.right)
        return Prod(left, right) if left and right else None
    if isinstance(v, FunV) and v.dom is not None and v.cod is not None:
        return Arrow(v.dom, v.cod)
    return None


def evaluate(t: sx.Term, env: Mapping[str, Value] | None = None, fuel: Fuel | None = None,
             meter: Meter | None = None, types: Mapping[str, FinType] | None = None) -> Value:
    """Evaluate ``t`` with free variables bound by ``env``.

    Types of ``env`` entries are only consulted for ``trunc`` nodes; pass
    ``types`` when they cannot be read off the values.
    """
    env = dict(env or {})
    types = dict(types or {})
    scope = tuple((name, types.get(name) or infer_value_type(v)) for name, v in env.items())
    code = compile_term(t, scope)
    return code(tuple(env.values()), meter or Meter(fuel))


# -- bar recursion oracle -------------------------------------------------------


def br_oracle(G: FunV, H: FunV, Y: FunV, s: SeqV, meter: Meter, depth: int = 0) -> Value:
    """Spector bar recursion by direct unfolding of its defining equation."""
    if depth > meter.fuel.max_br_depth:
        raise FuelExhausted("br-depth", meter.fuel.max_br_depth, path=s)
    meter.tick()
    if Y(hat(s)) < len(s.items):
        return G(s)

    def continuation(x):
        return br_oracle(G, H, Y, s.append(x), meter, depth + 1)
    return H(s)(FunV(continuation, label=f"BR(.)({format_value(s)} * _)", dom=s.elem))


def eval_br_oracle(G: FunV, H: FunV, Y: FunV, s: SeqV, fuel: Fuel | None = None,
                   meter: Meter | None = None) -> Value:
    return br_oracle(G, H, Y, s, meter or Meter(fuel))


def run_deep(fn: Callable[[], Any], stack_mb: int = 512, recursion_limit: int = 200_000):
    """Run ``fn`` on a thread with a large C stack so deep evaluations don't overflow."""
    result: dict[str, Any] = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, recursion_limit))
        try:
            result["value"] = fn()
        except BaseException as exc:  # re-raised on the calling thread
            result["error"] = exc
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(stack_mb * 1024 * 1024)
    try:
        th = threading.Thread(target=target)
        th.start()
        th.join()
    finally:
        threading.stack_size(old_size)
    if "error" in result:
        raise result["error"]
    return result["value"]

