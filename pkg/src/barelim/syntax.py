"""System T terms extended with sequences, pairs, arithmetic primitives and BR.

Terms are immutable dataclass trees with named, type-annotated binders.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Iterator, Mapping, Union

from barelim.types import N, Arrow, FinType, Nat, Prod, Seq, arrow, format_type

# Generated names carry this marker; user-written identifiers never contain it.
RESERVED = "$"


class TypeCheckError(TypeError):
    pass


@dataclasses.dataclass(frozen=True)
class Var:
    name: str


@dataclasses.dataclass(frozen=True)
class Zero:
    pass


@dataclasses.dataclass(frozen=True)
class Succ:
    arg: Term


@dataclasses.dataclass(frozen=True)
class NatLit:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("numerals are natural numbers")

    def expand(self) -> Term:
        t: Term = Zero()
        for _ in range(self.n):
            t = Succ(t)
        return t


@dataclasses.dataclass(frozen=True)
class Rec:
    """The recursor constant at type ``rho``: ``rho -> (N -> rho -> rho) -> N -> rho``."""

    rho: FinType


@dataclasses.dataclass(frozen=True)
class Lam:
    binder: str
    binder_type: FinType
    body: Term


@dataclasses.dataclass(frozen=True)
class App:
    fun: Term
    arg: Term


@dataclasses.dataclass(frozen=True)
class EmptySeq:
    elem: FinType


@dataclasses.dataclass(frozen=True)
class Append:
    seq: Term
    item: Term


@dataclasses.dataclass(frozen=True)
class Concat:
    left: Term
    right: Term


@dataclasses.dataclass(frozen=True)
class Len:
    seq: Term


@dataclasses.dataclass(frozen=True)
class Hat:
    """Infinite zero-padded extension of a finite sequence, as a function ``N -> tau``."""

    seq: Term


@dataclasses.dataclass(frozen=True)
class Index:
    target: Term
    idx: Term


@dataclasses.dataclass(frozen=True)
class Truncate:
    """Initial segment of length ``n`` of an infinite sequence ``fn``."""

    fn: Term
    n: Term


@dataclasses.dataclass(frozen=True)
class Pair:
    left: Term
    right: Term


@dataclasses.dataclass(frozen=True)
class Fst:
    pair: Term


@dataclasses.dataclass(frozen=True)
class Snd:
    pair: Term


@dataclasses.dataclass(frozen=True)
class Lt:
    left: Term
    right: Term


@dataclasses.dataclass(frozen=True)
class Geq:
    left: Term
    right: Term


@dataclasses.dataclass(frozen=True)
class Max:
    left: Term
    right: Term


@dataclasses.dataclass(frozen=True)
class Plus:
    left: Term
    right: Term


@dataclasses.dataclass(frozen=True)
class Monus:
    left: Term
    right: Term


@dataclasses.dataclass(frozen=True)
class IfZero:
    cond: Term
    then: Term
    orelse: Term


@dataclasses.dataclass(frozen=True)
class BRConst:
    tau: FinType
    sigma: FinType


Term = Union[
    Var, Zero, Succ, NatLit, Rec, Lam, App, EmptySeq, Append, Concat, Len, Hat, Index,
    Truncate, Pair, Fst, Snd, Lt, Geq, Max, Plus, Monus, IfZero, BRConst,
]

BINARY_NAT = (Lt, Geq, Max, Plus, Monus)


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def lam(binders: list[tuple[str, FinType]], body: Term) -> Term:
    for name, ty in reversed(binders):
        body = Lam(name, ty, body)
    return body


def children(t: Term) -> Iterator[Term]:
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        if isinstance(v, (str, int)) or _is_type(v):
            continue
        yield v


def _is_type(v) -> bool:
    return isinstance(v, (Nat, Arrow, Seq, Prod))


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal; shared subterms are visited once per occurrence."""
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(list(children(u))))


def contains_br(t: Term) -> bool:
    return any(isinstance(u, BRConst) for u in subterms(t))


def is_pure_t(t: Term) -> bool:
    return not contains_br(t)


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.binder}
    out: frozenset[str] = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def zero_term(tau: FinType) -> Term:
    if isinstance(tau, Nat):
        return Zero()
    if isinstance(tau, Arrow):
        return Lam(f"z{RESERVED}", tau.dom, zero_term(tau.cod))
    if isinstance(tau, Seq):
        return EmptySeq(tau.elem)
    if isinstance(tau, Prod):
        return Pair(zero_term(tau.left), zero_term(tau.right))
    raise TypeError(f"not a finite type: {tau!r}")


def nat_lit(n: int) -> Term:
    return Zero() if n == 0 else NatLit(n)


# -- substitution -------------------------------------------------------------

def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    stem = base.split(RESERVED)[0] or "v"
    for i in itertools.count():
        candidate = f"{stem}{RESERVED}{i}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding substitution ``t[u/x]``."""
    return _subst(t, x, u, free_vars(u))


def _subst(t: Term, x: str, u: Term, fv_u: frozenset[str]) -> Term:
    if isinstance(t, Var):
        return u if t.name == x else t
    if isinstance(t, Lam):
        if t.binder == x:
            return t
        if x not in free_vars(t.body):
            return t
        if t.binder in fv_u:
            new = fresh_name(t.binder, fv_u | free_vars(t.body) | {x})
            body = _subst(t.body, t.binder, Var(new), frozenset([new]))
            return Lam(new, t.binder_type, _subst(body, x, u, fv_u))
        return Lam(t.binder, t.binder_type, _subst(t.body, x, u, fv_u))
    changes = {}
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        if isinstance(v, (str, int)) or _is_type(v):
            continue
        changes[f.name] = _subst(v, x, u, fv_u)
    return dataclasses.replace(t, **changes) if changes else t


def alpha_equal(a: Term, b: Term) -> bool:
    return _alpha_eq(a, b, {}, {}, 0)


def _alpha_eq(a: Term, b: Term, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = env_a.get(a.name), env_b.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, Lam):
        if a.binder_type != b.binder_type:
            return False
        return _alpha_eq(a.body, b.body, {**env_a, a.binder: depth}, {**env_b, b.binder: depth}, depth + 1)
    for f in dataclasses.fields(a):
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, (str, int)) or _is_type(va):
            if va != vb:
                return False
        elif not _alpha_eq(va, vb, env_a, env_b, depth):
            return False
    return True


# -- typing -------------------------------------------------------------------

TypingContext = Mapping[str, FinType]


def br_type(tau: FinType, sigma: FinType) -> FinType:
    seq = Seq(tau)
    return arrow(
        Arrow(seq, sigma),
        arrow(seq, Arrow(tau, sigma), sigma),
        Arrow(Arrow(N, tau), N),
        seq,
        sigma,
    )


def rec_type(rho: FinType) -> FinType:
    return arrow(rho, arrow(N, rho, rho), N, rho)


def typecheck(t: Term, ctx: TypingContext | None = None) -> FinType:
    return _check(t, dict(ctx or {}))


def _expect(actual: FinType, expected: FinType, what: str) -> None:
    if actual != expected:
        raise TypeCheckError(f"{what}: expected {format_type(expected)}, got {format_type(actual)}")


def _check(t: Term, ctx: dict[str, FinType]) -> FinType:
    if isinstance(t, Var):
        try:
            return ctx[t.name]
        except KeyError:
            raise TypeCheckError(f"unbound variable {t.name!r}") from None
    if isinstance(t, (Zero, NatLit)):
        return N
    if isinstance(t, Succ):
        _expect(_check(t.arg, ctx), N, "argument of S")
        return N
    if isinstance(t, Rec):
        return rec_type(t.rho)
    if isinstance(t, Lam):
        inner = dict(ctx)
        inner[t.binder] = t.binder_type
        return Arrow(t.binder_type, _check(t.body, inner))
    if isinstance(t, App):
        ft = _check(t.fun, ctx)
        if not isinstance(ft, Arrow):
            raise TypeCheckError(f"applying a non-function of type {format_type(ft)}")
        _expect(_check(t.arg, ctx), ft.dom, "argument type mismatch")
        return ft.cod
    if isinstance(t, EmptySeq):
        return Seq(t.elem)
    if isinstance(t, Append):
        st = _seq_type(t.seq, ctx, "append")
        _expect(_check(t.item, ctx), st.elem, "appended item")
        return st
    if isinstance(t, Concat):
        st = _seq_type(t.left, ctx, "concat")
        _expect(_check(t.right, ctx), st, "concat right operand")
        return st
    if isinstance(t, Len):
        _seq_type(t.seq, ctx, "len")
        return N
    if isinstance(t, Hat):
        return Arrow(N, _seq_type(t.seq, ctx, "hat").elem)
    if isinstance(t, Index):
        tt = _check(t.target, ctx)
        _expect(_check(t.idx, ctx), N, "index")
        if isinstance(tt, Seq):
            return tt.elem
        if isinstance(tt, Arrow) and tt.dom == N:
            return tt.cod
        raise TypeCheckError(f"index applied to {format_type(tt)}")
    if isinstance(t, Truncate):
        ft = _check(t.fn, ctx)
        if not (isinstance(ft, Arrow) and ft.dom == N):
            raise TypeCheckError(f"trunc expects an infinite sequence N->tau, got {format_type(ft)}")
        _expect(_check(t.n, ctx), N, "trunc length")
        return Seq(ft.cod)
    if isinstance(t, Pair):
        return Prod(_check(t.left, ctx), _check(t.right, ctx))
    if isinstance(t, (Fst, Snd)):
        pt = _check(t.pair, ctx)
        if not isinstance(pt, Prod):
            raise TypeCheckError(f"projection from non-pair of type {format_type(pt)}")
        return pt.left if isinstance(t, Fst) else pt.right
    if isinstance(t, BINARY_NAT):
        _expect(_check(t.left, ctx), N, f"{type(t).__name__.lower()} left operand")
        _expect(_check(t.right, ctx), N, f"{type(t).__name__.lower()} right operand")
        return N
    if isinstance(t, IfZero):
        _expect(_check(t.cond, ctx), N, "if0 condition")
        then = _check(t.then, ctx)
        _expect(_check(t.orelse, ctx), then, "if0 branches")
        return then
    if isinstance(t, BRConst):
        return br_type(t.tau, t.sigma)
    raise TypeCheckError(f"not a term: {t!r}")


def _seq_type(t: Term, ctx, op: str) -> Seq:
    st = _check(t, ctx)
    if not isinstance(st, Seq):
        raise TypeCheckError(f"{op} applied to non-sequence of type {format_type(st)}")
    return st
