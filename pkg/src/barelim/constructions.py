"""Pure-T combinators: bar recursion for constant stopping functionals and the
transfer from general bar recursion to Spector bar recursion.

All emitted terms are closed, so they can be plugged together by
application without any risk of variable capture.  Binder names carry the
reserved ``$`` marker purely for legibility of printed output.
"""

from __future__ import annotations

import dataclasses
import functools

from barelim import syntax as sx
from barelim.syntax import App, Hat, IfZero, Lam, Len, Lt, Monus, Succ, Var, app
from barelim.types import N, Arrow, CircContext, FinType, format_type

G, H, S, K, F, X = (Var(n) for n in ("G$", "H$", "s$", "k$", "f$", "x$"))


@functools.lru_cache(maxsize=None)
def build_varphi(ctx: CircContext) -> sx.Term:
    """``phi(G, H)(n)``: ``G`` at ``n = 0``, one ``H``-unfolding per successor.

    Defined with a single recursor at type ``tau* -> sigma``.
    """
    prev = Var("p$")
    step = sx.lam(
        [("m$", N), ("p$", ctx.g_type), ("s$", ctx.seq)],
        app(H, S, Lam("x$", ctx.tau, App(prev, sx.Append(S, X)))),
    )
    body = app(sx.Rec(ctx.g_type), G, step, Var("n$"))
    return sx.lam([("G$", ctx.g_type), ("H$", ctx.h_type), ("n$", N)], body)


@dataclasses.dataclass(frozen=True)
class PsiTerm:
    tau: FinType
    sigma: FinType
    term: sx.Term
    varphi: sx.Term

    def __call__(self, k: sx.Term) -> sx.Term:
        return App(self.term, k)


@functools.lru_cache(maxsize=None)
def build_psi(ctx: CircContext) -> PsiTerm:
    """``Psi(k)(G, H)(s)`` is ``G(s)`` when ``|s| > k`` and ``phi(G, H)(k + 1 - |s|)(s)`` otherwise.

    Cached per context, so every caller shares the very same term object.
    """
    varphi = build_varphi(ctx)
    countdown = Monus(Succ(K), Len(S))
    body = IfZero(Lt(K, Len(S)), app(varphi, G, H, countdown, S), App(G, S))
    term = sx.lam([("k$", N), ("G$", ctx.g_type), ("H$", ctx.h_type), ("s$", ctx.seq)], body)
    return PsiTerm(ctx.tau, ctx.sigma, term, varphi)


def _check_y(y_term: sx.Term, ctx: CircContext) -> None:
    if sx.free_vars(y_term):
        raise sx.TypeCheckError(f"stopping functional must be closed, has free {sorted(sx.free_vars(y_term))}")
    ty = sx.typecheck(y_term)
    if ty != ctx.y_type:
        raise sx.TypeCheckError(
            f"stopping functional has type {format_type(ty)}, expected {format_type(ctx.y_type)}")


def build_calH(y_term: sx.Term, ctx: CircContext) -> sx.Term:
    """``H^t(G, H)(s)(f)``: ``G(s)`` once ``t(hat s) < |s|``, else ``H(s)(f)``."""
    _check_y(y_term, ctx)
    guard = Lt(App(y_term, Hat(S)), Len(S))
    body = IfZero(guard, app(H, S, F), App(G, S))
    return sx.lam(
        [("G$", ctx.g_type), ("H$", ctx.h_type), ("s$", ctx.seq), ("f$", Arrow(ctx.tau, ctx.sigma))],
        body,
    )


@dataclasses.dataclass(frozen=True)
class PhiTerm:
    tau: FinType
    sigma: FinType
    y_term: sx.Term
    psi: PsiTerm
    calH: sx.Term
    term: sx.Term  # fun Delta. fun G. fun H. fun s. ...
    ctx: CircContext

    def apply(self, delta: sx.Term) -> sx.Term:
        """``Phi^t(delta)`` with the outer redex already contracted.

        ``delta`` must be closed (it is spliced under the ``G$``/``H$``/``s$`` binders).
        """
        if sx.free_vars(delta):
            raise ValueError("delta must be a closed term")
        return _phi_body(self.ctx, self.y_term, self.psi, self.calH, delta)


def _phi_body(ctx, y_term, psi, calH, delta):
    s1 = Var("t$")
    g_arg = Lam("t$", ctx.seq, app(psi.term, App(y_term, Hat(s1)), G, H, s1))
    body = app(delta, g_arg, app(calH, G, H), S)
    return sx.lam([("G$", ctx.g_type), ("H$", ctx.h_type), ("s$", ctx.seq)], body)


def build_phi(y_term: sx.Term, ctx: CircContext) -> PhiTerm:
    calH = build_calH(y_term, ctx)
    psi = build_psi(ctx)
    term = Lam("D$", ctx.xi_type, _phi_body(ctx, y_term, psi, calH, Var("D$")))
    return PhiTerm(ctx.tau, ctx.sigma, y_term, psi, calH, term, ctx)
