"""Finite types, type levels and the circle type map."""

from __future__ import annotations

import dataclasses
import itertools
from typing import Iterator, Union


class TypeSyntaxError(ValueError):
    pass


class UnsupportedType(ValueError):
    """Raised when a type lies outside the fragment a routine accepts."""


@dataclasses.dataclass(frozen=True)
class Nat:
    def __str__(self) -> str:
        return format_type(self)


@dataclasses.dataclass(frozen=True)
class Arrow:
    dom: FinType
    cod: FinType

    def __str__(self) -> str:
        return format_type(self)


@dataclasses.dataclass(frozen=True)
class Seq:
    elem: FinType

    def __str__(self) -> str:
        return format_type(self)


@dataclasses.dataclass(frozen=True)
class Prod:
    left: FinType
    right: FinType

    def __str__(self) -> str:
        return format_type(self)


FinType = Union[Nat, Arrow, Seq, Prod]

N = Nat()


def arrow(*types: FinType) -> FinType:
    """Right-nested arrow: ``arrow(a, b, c)`` is ``a -> b -> c``."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def level(t: FinType) -> int:
    if isinstance(t, Nat):
        return 0
    if isinstance(t, Arrow):
        return max(1 + level(t.dom), level(t.cod))
    if isinstance(t, Seq):
        return level(t.elem)
    if isinstance(t, Prod):
        return max(level(t.left), level(t.right))
    raise TypeError(f"not a finite type: {t!r}")


def is_arrow_only(t: FinType) -> bool:
    if isinstance(t, Nat):
        return True
    if isinstance(t, Arrow):
        return is_arrow_only(t.dom) and is_arrow_only(t.cod)
    return False


@dataclasses.dataclass(frozen=True)
class CircContext:
    """Fixed element type ``tau`` and result type ``sigma`` of the bar recursion.

    ``tau`` is restricted to ``N`` or ``N -> N``.
    """

    tau: FinType
    sigma: FinType

    def __post_init__(self):
        if self.tau not in (N, Arrow(N, N)):
            raise UnsupportedType(
                f"tau must be N or N->N (bar recursion of type level 0 or 1), got {format_type(self.tau)}"
            )

    # Shorthands for the types that recur throughout the constructions.
    @property
    def seq(self) -> FinType:
        return Seq(self.tau)

    @property
    def g_type(self) -> FinType:
        return Arrow(self.seq, self.sigma)

    @property
    def h_type(self) -> FinType:
        return arrow(self.seq, Arrow(self.tau, self.sigma), self.sigma)

    @property
    def xi_type(self) -> FinType:
        """Type of a general bar recursor: ``(t*->s) -> (t*->(t->s)->s) -> t* -> s``."""
        return arrow(self.g_type, self.h_type, self.seq, self.sigma)

    @property
    def alpha_type(self) -> FinType:
        return Arrow(N, self.tau)

    @property
    def y_type(self) -> FinType:
        return Arrow(self.alpha_type, N)

    @property
    def nat_circ(self) -> FinType:
        return Prod(self.y_type, self.xi_type)

    @property
    def br_type(self) -> FinType:
        return arrow(self.g_type, self.h_type, self.y_type, self.seq, self.sigma)


def circ_type(eta: FinType, ctx: CircContext) -> FinType:
    if isinstance(eta, Nat):
        return ctx.nat_circ
    if isinstance(eta, Arrow):
        return Arrow(circ_type(eta.dom, ctx), circ_type(eta.cod, ctx))
    raise UnsupportedType(f"circle translation is only defined on N and arrow types, got {format_type(eta)}")


def level_bound(eta: FinType, ctx: CircContext) -> int:
    if not is_arrow_only(eta):
        raise UnsupportedType(f"circle translation is only defined on N and arrow types, got {format_type(eta)}")
    return 2 + max(1 + level(ctx.tau), level(ctx.sigma)) + level(eta)


def arrow_types(depth: int) -> Iterator[FinType]:
    """All types built from N and arrows with nesting depth at most ``depth``."""
    if depth == 0:
        yield N
        return
    smaller = list(arrow_types(depth - 1))
    seen = set()
    for t in itertools.chain(smaller, (Arrow(a, b) for a in smaller for b in smaller)):
        if t not in seen:
            seen.add(t)
            yield t


# -- surface syntax ---------------------------------------------------------

_PREC_ARROW, _PREC_PROD, _PREC_POSTFIX = 0, 1, 2


def format_type(t: FinType, prec: int = _PREC_ARROW) -> str:
    if isinstance(t, Nat):
        return "N"
    if isinstance(t, Arrow):
        s = f"{format_type(t.dom, _PREC_PROD)}->{format_type(t.cod, _PREC_ARROW)}"
        return f"({s})" if prec > _PREC_ARROW else s
    if isinstance(t, Prod):
        s = f"{format_type(t.left, _PREC_PROD)} x {format_type(t.right, _PREC_POSTFIX)}"
        return f"({s})" if prec > _PREC_PROD else s
    if isinstance(t, Seq):
        return f"{format_type(t.elem, _PREC_POSTFIX)}*"
    raise TypeError(f"not a finite type: {t!r}")


def parse_type(text: str) -> FinType:
    from barelim.parse import ParseError, Parser

    try:
        p = Parser(text)
        t = p.parse_type()
        p.expect_end()
    except ParseError as exc:
        raise TypeSyntaxError(str(exc)) from exc
    return t
