import itertools

import pytest

from barelim import syntax as sx
from barelim.constructions import build_calH, build_phi, build_psi, build_varphi
from barelim.evaluator import FunV, evaluate, hat, seq_of
from barelim.harness import G_GRAMMAR, H_GRAMMAR, Sample, analyze_fragment, realize
from barelim.parse import parse
from barelim.types import N, Arrow, CircContext, level

NN = Arrow(N, N)
CTX = CircContext(N, N)
LEN = FunV(lambda s: len(s.items), "len")
F0 = FunV(lambda s: FunV(lambda f: f(0)), "f0")
# records its continuation so tests can compare it pointwise
SPY = FunV(lambda s: FunV(lambda f: (len(s.items), f(0), f(1), f(2))), "spy")
CONTEXTS = [CircContext(t, s) for t in (N, NN) for s in (N, NN, Arrow(NN, N))]


def test_varphi_zero_is_g():
    phi = evaluate(build_varphi(CTX))
    for items in ([], [1], [2, 0]):
        assert phi(LEN)(F0)(0)(seq_of(items)) == len(items)


def test_varphi_one_unfolding():
    phi = evaluate(build_varphi(CTX))
    assert phi(LEN)(SPY)(1)(seq_of([])) == (0, 1, 1, 1)


def test_psi_examples():
    psi = evaluate(build_psi(CTX).term)
    assert psi(2)(LEN)(F0)(seq_of([5, 7, 9])) == 3
    assert psi(0)(LEN)(SPY)(seq_of([])) == (0, 1, 1, 1)
    assert psi(1)(LEN)(F0)(seq_of([])) == 2


@pytest.mark.parametrize("ctx", CONTEXTS)
def test_psi_census_and_type(ctx):
    psi = build_psi(ctx)
    census = analyze_fragment(psi.term)
    assert [ty for ty, _ in census.entries] == [Arrow(ctx.seq, ctx.sigma)]
    assert census.max_level == max(1 + level(ctx.tau), level(ctx.sigma))
    assert sx.typecheck(psi.term) == sx.arrow(N, ctx.g_type, ctx.h_type, ctx.seq, ctx.sigma)
    assert sx.is_pure_t(psi.term)


def test_psi_shared_per_context():
    assert build_psi(CTX) is build_psi(CircContext(N, N))


def _grid(k):
    for n in range(k + 3):
        for items in itertools.product(range(3), repeat=n):
            for g, h in itertools.product(G_GRAMMAR, H_GRAMMAR):
                yield realize(Sample(g, h, 2, 2, items), CTX, 3)


@pytest.mark.parametrize("k", range(4))
def test_psi_branch_equations(k):
    psi = evaluate(build_psi(CTX).term)(k)
    for G, H, s in _grid(k):
        got = psi(G)(H)(s)
        if len(s.items) > k:
            assert got == G(s)
        else:
            assert got == H(s)(FunV(lambda x: psi(G)(H)(s.append(x))))


def test_calH_examples():
    calH0 = evaluate(build_calH(parse("fun a:N->N. 0"), CTX))
    boom = FunV(lambda x: 1 / 0)
    assert calH0(LEN)(F0)(seq_of([1]))(boom) == 1
    calHa = evaluate(build_calH(parse("fun a:N->N. a 0"), CTX))
    f = FunV(lambda x: 40 + x)
    assert calHa(LEN)(F0)(seq_of([]))(f) == 40


def test_calH_ignores_f_exactly_when_guard_holds():
    y = parse("fun a:N->N. a 1")
    calH, Y = evaluate(build_calH(y, CTX)), evaluate(y)
    for G, H, s in _grid(1):
        a = calH(G)(H)(s)(FunV(lambda x: 100 + x))
        b = calH(G)(H)(s)(FunV(lambda x: 200 + x))
        assert (a == b) or Y(hat(s)) >= len(s.items)
        if Y(hat(s)) < len(s.items):
            assert a == G(s)


def test_calH_rejects_bad_y():
    with pytest.raises(sx.TypeCheckError):
        build_calH(parse("fun a:N. a"), CTX)
    with pytest.raises(sx.TypeCheckError):
        build_calH(parse("fun a:N->N. z"), CTX)


@pytest.mark.parametrize("k", range(4))
def test_phi_of_trivial_delta_is_psi(k):
    y = parse(f"fun a:N->N. {k}")
    phi = build_phi(y, CTX)
    delta = parse("fun G:N*->N. fun H:N*->(N->N)->N. fun s:N*. G s")
    got = evaluate(phi.apply(delta))
    psi = evaluate(build_psi(CTX).term)(k)
    for G, H, s in _grid(2):
        assert got(G)(H)(s) == psi(G)(H)(s)
    assert sx.typecheck(phi.term) == Arrow(CTX.xi_type, CTX.xi_type)
    assert sx.is_pure_t(phi.term)


def test_phi_apply_requires_closed_delta():
    phi = build_phi(parse("fun a:N->N. 0"), CTX)
    with pytest.raises(ValueError):
        phi.apply(sx.Var("D"))
