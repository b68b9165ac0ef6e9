"""The circle translation of pure-T terms and elimination of bar recursion.

A term ``t : eta`` (built from ``N`` and arrows, with the distinguished
sequence variable ``alpha : N -> tau`` free) is mapped to ``t° : eta°``.
At ground type ``t°`` is a pair: its first component recomputes ``t`` as a
functional of ``alpha``, its second is a general bar recursor for a bar that
secures that functional.  Feeding the second component to ``Phi^t`` yields a
pure-T definition of Spector bar recursion for ``Y = fun alpha. t``.
"""

from __future__ import annotations

import dataclasses
import functools
from typing import Mapping

from barelim import syntax as sx
from barelim.constructions import build_phi, build_psi
from barelim.syntax import (
    App, Fst, Hat, Lam, Max, NatLit, Pair, Snd, Succ, Var, app, lam,
)
from barelim.types import N, Arrow, CircContext, FinType, circ_type, format_type, is_arrow_only

MANGLE = "$o"


class TranslationError(ValueError):
    pass


def mangle(name: str) -> str:
    return name + MANGLE


@dataclasses.dataclass(frozen=True)
class CircResult:
    source: sx.Term
    translated: sx.Term
    ctx: CircContext
    varmap: Mapping[str, str]
    source_type: FinType

    @property
    def circ_type(self) -> FinType:
        return circ_type(self.source_type, self.ctx)


# -- fixed combinators ----------------------------------------------------------

def nat_circ(ctx: CircContext, n: sx.Term) -> sx.Term:
    """``n° = <fun alpha. n, fun G H. G>`` for a numeral-valued ``n`` not mentioning ``alpha``."""
    return Pair(
        Lam("a$", ctx.alpha_type, n),
        lam([("G$", ctx.g_type), ("H$", ctx.h_type)], Var("G$")),
    )


@functools.lru_cache(maxsize=None)
def zero_circ(ctx: CircContext) -> sx.Term:
    return nat_circ(ctx, sx.Zero())


@functools.lru_cache(maxsize=None)
def succ_circ(ctx: CircContext) -> sx.Term:
    x, a = Var("x$"), Var("a$")
    return Lam("x$", ctx.nat_circ, Pair(
        Lam("a$", ctx.alpha_type, Succ(App(Fst(x), a))),
        Snd(x),
    ))


@functools.lru_cache(maxsize=None)
def alpha_circ(ctx: CircContext) -> sx.Term:
    psi = build_psi(ctx).term
    x, a, G, H, s1 = Var("x$"), Var("a$"), Var("G$"), Var("H$"), Var("t$")
    gh = [("G$", ctx.g_type), ("H$", ctx.h_type)]
    if ctx.tau == N:
        val = Lam("a$", ctx.alpha_type, App(a, App(Fst(x), a)))
        g_arg = Lam("t$", ctx.seq, app(psi, App(Fst(x), Hat(s1)), G, H, s1))
        b = lam(gh, app(Snd(x), g_arg, H))
        return Lam("x$", ctx.nat_circ, Pair(val, b))
    # tau = N -> N: alpha takes two numeric arguments.
    y = Var("y$")
    val = Lam("a$", ctx.alpha_type, app(a, App(Fst(x), a), App(Fst(y), a)))
    bound = Max(App(Fst(x), Hat(s1)), App(Fst(y), Hat(s1)))
    g_arg = Lam("t$", ctx.seq, app(psi, bound, G, H, s1))
    b = lam(gh, app(Snd(y), app(Snd(x), g_arg, H), H))
    return lam([("x$", ctx.nat_circ), ("y$", ctx.nat_circ)], Pair(val, b))


def rec_arg_type(eta: FinType) -> FinType | None:
    """``rho`` when ``eta = rho -> N``, ``None`` when ``eta = N``; otherwise rejected."""
    if eta == N:
        return None
    if isinstance(eta, Arrow) and eta.cod == N and is_arrow_only(eta.dom):
        return eta.dom
    raise TranslationError(
        f"recursor at type {format_type(eta)} is not supported: the translation handles "
        "Rec at N or at rho -> N only (tuple further arguments into rho)")


@functools.lru_cache(maxsize=None)
def rec_circ(eta: FinType, ctx: CircContext) -> sx.Term:
    rho = rec_arg_type(eta)
    eta_c = circ_type(eta, ctx)
    base, step, x, a = Var("b$"), Var("F$"), Var("x$"), Var("a$")
    G, H, s, s1 = Var("G$"), Var("H$"), Var("s$"), Var("t$")
    k_circ = nat_circ(ctx, Var("k$"))
    iterate = app(sx.Rec(eta_c), base, Lam("k$", N, App(step, k_circ)))

    def r(n: sx.Term) -> sx.Term:
        return App(App(iterate, n), Var("v$")) if rho is not None else App(iterate, n)

    val = Lam("a$", ctx.alpha_type, App(Fst(r(App(Fst(x), a))), a))
    g_arg = Lam("t$", ctx.seq, app(Snd(r(App(Fst(x), Hat(s1)))), G, H, s1))
    b = lam([("G$", ctx.g_type), ("H$", ctx.h_type), ("s$", ctx.seq)], app(Snd(x), g_arg, H, s))
    binders = [
        ("b$", eta_c),
        ("F$", circ_type(sx.arrow(N, eta, eta), ctx)),
        ("x$", ctx.nat_circ),
    ]
    if rho is not None:
        binders.append(("v$", circ_type(rho, ctx)))
    return lam(binders, Pair(val, b))


# -- desugaring of arithmetic primitives ------------------------------------------

def _nn(body_fn) -> sx.Term:
    return lam([("x$", N), ("y$", N)], body_fn(Var("x$"), Var("y$")))


def _rec_n(base, step, n):
    return app(sx.Rec(N), base, lam([("k$", N), ("r$", N)], step), n)


PRED = Lam("x$", N, _rec_n(sx.Zero(), Var("k$"), Var("x$")))
PLUS = _nn(lambda x, y: _rec_n(x, Succ(Var("r$")), y))
MONUS = _nn(lambda x, y: _rec_n(x, App(PRED, Var("r$")), y))
SIGN = Lam("x$", N, _rec_n(sx.Zero(), NatLit(1), Var("x$")))
LT = _nn(lambda x, y: App(SIGN, app(MONUS, y, x)))
GEQ = _nn(lambda x, y: _rec_n(NatLit(1), sx.Zero(), app(LT, x, y)))
MAX = _nn(lambda x, y: app(PLUS, x, app(MONUS, y, x)))

_PRIM_DEFS = {sx.Plus: PLUS, sx.Monus: MONUS, sx.Lt: LT, sx.Geq: GEQ, sx.Max: MAX}


def desugar(t: sx.Term, types: Mapping[str, FinType]) -> sx.Term:
    """Rewrite arithmetic primitives and ``if0`` into plain recursor terms."""
    if isinstance(t, tuple(_PRIM_DEFS)):
        return app(_PRIM_DEFS[type(t)], desugar(t.left, types), desugar(t.right, types))
    if isinstance(t, sx.IfZero):
        eta = sx.typecheck(t.then, types)
        orelse = desugar(t.orelse, types)
        avoid = sx.free_vars(orelse)
        k, r = sx.fresh_name("k", avoid), sx.fresh_name("r", avoid)
        step = lam([(k, N), (r, eta)], orelse)
        return app(sx.Rec(eta), desugar(t.then, types), step, desugar(t.cond, types))
    if isinstance(t, Lam):
        return Lam(t.binder, t.binder_type, desugar(t.body, {**types, t.binder: t.binder_type}))
    if isinstance(t, App):
        return App(desugar(t.fun, types), desugar(t.arg, types))
    if isinstance(t, Succ):
        return Succ(desugar(t.arg, types))
    return t


# -- the translation --------------------------------------------------------------

_CORE = (Var, sx.Zero, NatLit, Succ, sx.Rec, Lam, App)


def validate_source(t: sx.Term, ctx: CircContext, alpha: str,
                    free_types: Mapping[str, FinType]) -> FinType:
    for u in sx.subterms(t):
        if isinstance(u, sx.BRConst):
            raise TranslationError("source term must be pure T (it contains br)")
        if not isinstance(u, _CORE + tuple(_PRIM_DEFS) + (sx.IfZero,)):
            raise TranslationError(f"construct {type(u).__name__} is outside the translatable fragment")
        if isinstance(u, Var) and sx.RESERVED in u.name:
            raise TranslationError(f"source names may not contain {sx.RESERVED!r}: {u.name}")
        if isinstance(u, Lam):
            if sx.RESERVED in u.binder:
                raise TranslationError(f"source names may not contain {sx.RESERVED!r}: {u.binder}")
            if not is_arrow_only(u.binder_type):
                raise TranslationError(f"binder {u.binder} has type {format_type(u.binder_type)}, "
                                       "which is not built from N and arrows")
    for name, ty in free_types.items():
        if not is_arrow_only(ty):
            raise TranslationError(f"free variable {name} has non-arrow type {format_type(ty)}")
    unknown = sx.free_vars(t) - set(free_types) - {alpha}
    if unknown:
        raise TranslationError(f"free variables not in the variable map: {sorted(unknown)}")
    return sx.typecheck(t, {alpha: ctx.alpha_type, **free_types})


def circ_term(t: sx.Term, ctx: CircContext, alpha: str = "alpha",
              free_types: Mapping[str, FinType] | None = None) -> CircResult:
    """Translate ``t`` (with ``alpha`` and ``free_types`` free) to ``t°``."""
    free_types = dict(free_types or {})
    ty = validate_source(t, ctx, alpha, free_types)
    core = desugar(t, {alpha: ctx.alpha_type, **free_types})
    varmap = {name: mangle(name) for name in free_types}
    return CircResult(t, translate_core(core, ctx, alpha, varmap), ctx, varmap, ty)


def translate_core(t: sx.Term, ctx: CircContext, alpha: str, env: Mapping[str, str]) -> sx.Term:
    """Translate an already validated and desugared term; ``env`` maps free names to translated names."""
    return _translate(t, ctx, alpha, env)


def _translate(t: sx.Term, ctx: CircContext, alpha: str, env: Mapping[str, str]) -> sx.Term:
    if isinstance(t, Var):
        if t.name in env:
            return Var(env[t.name])
        if t.name == alpha:
            return alpha_circ(ctx)
        raise TranslationError(f"free variable {t.name!r} not in the variable map")
    if isinstance(t, sx.Zero):
        return zero_circ(ctx)
    if isinstance(t, NatLit):
        return nat_circ(ctx, t)
    if isinstance(t, Succ):
        return App(succ_circ(ctx), _translate(t.arg, ctx, alpha, env))
    if isinstance(t, Lam):
        x = mangle(t.binder)
        body = _translate(t.body, ctx, alpha, {**env, t.binder: x})
        return Lam(x, circ_type(t.binder_type, ctx), body)
    if isinstance(t, App):
        return App(_translate(t.fun, ctx, alpha, env), _translate(t.arg, ctx, alpha, env))
    if isinstance(t, sx.Rec):
        return rec_circ(t.rho, ctx)
    raise TranslationError(f"cannot translate {type(t).__name__}")


def split_y(y_term: sx.Term, ctx: CircContext) -> tuple[str, sx.Term]:
    if not isinstance(y_term, Lam):
        raise TranslationError("stopping functional must be written as fun alpha:N->tau. t")
    if y_term.binder_type != ctx.alpha_type:
        raise TranslationError(
            f"stopping functional binds {format_type(y_term.binder_type)}, expected {format_type(ctx.alpha_type)}")
    if sx.free_vars(y_term):
        raise TranslationError(f"stopping functional must be closed, has free {sorted(sx.free_vars(y_term))}")
    return y_term.binder, y_term.body


def eliminate_br(y_term: sx.Term, ctx: CircContext) -> sx.Term:
    """Pure-T term of type ``(tau*->sigma) -> (tau*->(tau->sigma)->sigma) -> tau* -> sigma``
    computing ``fun G H s. BR(G, H, y_term)(s)``."""
    return elimination(y_term, ctx).term


@dataclasses.dataclass(frozen=True)
class Elimination:
    y_term: sx.Term
    circ: CircResult
    bar_recursor: sx.Term  # second component of t°
    term: sx.Term
    phi: object

    def definitions(self) -> list[tuple[str, sx.Term]]:
        """Named shared subterms, for printing with :func:`barelim.parse.format_program`."""
        psi, ctx = self.phi.psi, self.circ.ctx
        present = {id(u) for u in sx.subterms(self.bar_recursor)}
        combinators = [("zero_o", zero_circ(ctx)), ("succ_o", succ_circ(ctx)), ("alpha_o", alpha_circ(ctx))]
        for u in sx.subterms(self.circ.source):
            if isinstance(u, sx.Rec):
                combinators.append((f"rec_o[{format_type(u.rho)}]", rec_circ(u.rho, ctx)))
        used = [(n, d) for n, d in dict((n, d) for n, d in combinators).items() if id(d) in present]
        return [
            ("varphi", psi.varphi),
            ("Psi", psi.term),
            ("calH", self.phi.calH),
            ("Y", self.y_term),
            *used,
            ("B_t", self.bar_recursor),
        ]


def elimination(y_term: sx.Term, ctx: CircContext) -> Elimination:
    alpha, body = split_y(y_term, ctx)
    res = circ_term(body, ctx, alpha)
    if res.source_type != N:
        raise TranslationError(f"body of the stopping functional has type {format_type(res.source_type)}, expected N")
    phi = build_phi(y_term, ctx)
    bar_recursor = Snd(res.translated)
    return Elimination(y_term, res, bar_recursor, phi.apply(bar_recursor), phi)
