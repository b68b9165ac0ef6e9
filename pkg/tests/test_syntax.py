import pytest
from hypothesis import given, strategies as st

from barelim import syntax as sx
from barelim.parse import ParseError, format_term, parse
from barelim.types import N, Arrow, Prod, Seq, arrow

NN = Arrow(N, N)


def test_typecheck_examples():
    assert sx.typecheck(parse("fun a:N->N. a 0")) == arrow(NN, N)
    assert sx.typecheck(parse("rec[N] 0 (fun k:N. fun r:N. S r) 3")) == N
    with pytest.raises(sx.TypeCheckError):
        sx.typecheck(parse("fun a:N->N. a a"))


def test_typecheck_errors():
    for bad in ["x", "rec[N] 0 (fun k:N. fun r:N. r) (fun x:N. x)", "hat 0", "fst 0"]:
        with pytest.raises(sx.TypeCheckError):
            sx.typecheck(parse(bad))


def test_br_constant_type():
    assert sx.typecheck(sx.BRConst(N, N)) == arrow(
        Arrow(Seq(N), N), arrow(Seq(N), NN, N), arrow(NN, N), Seq(N), N)


def test_zero_term():
    assert sx.zero_term(N) == sx.Zero()
    z = sx.zero_term(NN)
    assert isinstance(z, sx.Lam) and z.binder_type == N and z.body == sx.Zero()
    assert sx.zero_term(Prod(N, N)) == sx.Pair(sx.Zero(), sx.Zero())
    assert sx.zero_term(Seq(N)) == sx.EmptySeq(N)


def test_parse_lambda():
    assert parse("fun a:N->N. a 0") == sx.Lam("a", NN, sx.App(sx.Var("a"), sx.Zero()))


def test_print_pair():
    assert format_term(sx.Pair(sx.Zero(), sx.Zero())) == "<0, 0>"


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("fun a:N->N.\n  a )")
    assert (info.value.line, info.value.col) == (2, 5)


def test_nat_literal_normalizes():
    assert sx.NatLit(2).expand() == sx.Succ(sx.Succ(sx.Zero()))
    assert sx.nat_lit(0) == sx.Zero()


def test_subst():
    x, y = sx.Var("x"), sx.Var("y")
    assert sx.subst(x, "x", sx.Zero()) == sx.Zero()
    ident = sx.Lam("x", N, x)
    assert sx.subst(ident, "x", sx.Zero()) == ident
    out = sx.subst(sx.Lam("y", N, x), "x", y)
    assert isinstance(out, sx.Lam) and out.binder != "y" and out.body == y
    assert sx.RESERVED in out.binder


def test_alpha_equal():
    assert sx.alpha_equal(parse("fun x:N. x"), parse("fun y:N. y"))
    assert not sx.alpha_equal(parse("fun x:N. fun y:N. x"), parse("fun x:N. fun y:N. y"))


# random well-typed terms over N and N->N, for parser/printer round trips

NAMES = ["x", "y", "f", "k"]


def terms(depth):
    leaf = st.one_of(st.just(sx.Zero()), st.integers(1, 9).map(sx.NatLit), st.sampled_from(NAMES).map(sx.Var))
    if depth == 0:
        return leaf
    sub = terms(depth - 1)
    return st.one_of(
        leaf,
        st.builds(sx.Succ, sub),
        st.builds(sx.App, sub, sub),
        st.builds(sx.Lam, st.sampled_from(NAMES), st.sampled_from([N, NN]), sub),
        st.builds(sx.Pair, sub, sub),
        st.builds(sx.Lt, sub, sub),
        st.builds(sx.Monus, sub, sub),
        st.builds(sx.IfZero, sub, sub, sub),
        st.builds(sx.Fst, sub),
        st.builds(sx.Hat, sub),
        st.builds(sx.Append, sub, sub),
        st.sampled_from([sx.Rec(N), sx.Rec(NN), sx.EmptySeq(N), sx.BRConst(N, N)]),
    )


@given(terms(4))
def test_parse_print_round_trip(t):
    assert parse(format_term(t)) == t


@given(terms(4))
def test_print_parse_stable(t):
    text = format_term(t)
    assert format_term(parse(text)) == text


def test_demo_term_round_trip():
    src = "fun alpha:N->N. rec[N] 0 (fun k:N. alpha) (alpha 0)"
    t = parse(src)
    assert format_term(t) == src
    assert parse(format_term(t)) == t


@given(terms(3), terms(2))
def test_subst_removes_variable(t, u):
    out = sx.subst(t, "x", u)
    if "x" not in sx.free_vars(u):
        assert "x" not in sx.free_vars(out)
    assert sx.free_vars(out) <= (sx.free_vars(t) - {"x"}) | sx.free_vars(u)
