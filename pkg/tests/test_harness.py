import json

import pytest

from barelim import harness
from barelim.constructions import build_psi
from barelim.evaluator import evaluate
from barelim.harness import (
    CORPUS, DEMO_SOURCE, G_GRAMMAR, H_GRAMMAR, Checker, Sample, SampleSpec, analyze_fragment,
    check_equivalence, realize, run_demo, sample_at, sample_inputs, shrink,
)
from barelim.parse import parse
from barelim.translator import eliminate_br, elimination
from barelim.types import N, Arrow, CircContext, UnsupportedType

NN = Arrow(N, N)
CTX = CircContext(N, N)


def test_samples_are_reproducible():
    spec = SampleSpec(seed=42)
    assert sample_at(spec, 0) == sample_at(SampleSpec(seed=42), 0)
    a, b = realize(sample_at(spec, 0), CTX, 3), realize(sample_at(spec, 0), CTX, 3)
    assert a[0].label == b[0].label and a[1].label == b[1].label and a[2] == b[2]
    assert sample_at(spec, 0) != sample_at(spec, 1) or sample_at(spec, 1) != sample_at(spec, 2)


def test_sample_bounds():
    spec = SampleSpec(seed=7, n_samples=300, seq_alphabet_bound=3, max_seq_len=4)
    for _, _, s in sample_inputs(spec, CTX):
        assert len(s.items) <= 4 and all(0 <= x < 3 for x in s.items)
    lens = {len(sample_at(spec, i).items) for i in range(spec.n_samples)}
    assert lens == set(range(5))


def test_spec_validation():
    with pytest.raises(ValueError):
        SampleSpec(g_ids=("nope",))
    with pytest.raises(ValueError):
        SampleSpec(seq_alphabet_bound=0)


@pytest.mark.parametrize("tau", [N, NN])
def test_grammar_terminates_against_psi(tau):
    ctx = CircContext(tau, N)
    psi = evaluate(build_psi(ctx).term)(3)
    seen = 0
    for x, (G, H, s) in harness.grid(ctx, 3, 4):
        assert isinstance(psi(G)(H)(s), int)
        seen += 1
    assert seen == sum(3 ** n for n in range(5)) * len(G_GRAMMAR) * len(H_GRAMMAR)


@pytest.mark.parametrize("src", ["fun a:N->N. a 0", DEMO_SOURCE, "fun a:N->N. max (a 0) (a 1)"])
def test_equivalence_examples(src):
    report = check_equivalence(parse(src), CTX, SampleSpec(seed=42, n_samples=100))
    assert report.passed and len(report.samples) == 100
    assert report.counterexample is None


def test_arrow_sigma_uses_probes():
    report = check_equivalence(parse("fun a:N->N. a (a 0)"), CircContext(N, NN), SampleSpec(n_samples=30))
    assert report.passed
    assert report.to_json()["comparison"] == "equal on probes [0, 1, 5]"


def test_report_json_fields():
    report = check_equivalence(parse(DEMO_SOURCE), CTX, SampleSpec(n_samples=5))
    data = json.loads(report.dumps())
    for key in ("term", "tau", "sigma", "samples", "census", "max_level", "bound_j", "seed"):
        assert key in data
    assert set(data["samples"][0]) >= {"s", "oracle", "translated", "equal"}
    assert "wall_time" not in data
    assert data["witness"]["bar_note"] == "sampled, fuel-bounded"
    # the census covers every recursor of the output term
    assert len(data["census"]) == len(analyze_fragment(eliminate_br(parse(DEMO_SOURCE), CTX)).entries)


def test_fragment_examples():
    psi = analyze_fragment(build_psi(CTX).term)
    assert psi.max_level == 1 and [str(lvl) for _, lvl in psi.entries] == ["1"]
    assert analyze_fragment(eliminate_br(parse("fun a:N->N. a 0"), CTX)).max_level <= 3
    empty = analyze_fragment(parse("fun a:N->N. a (a 0)"))
    assert empty.entries == () and empty.max_level == 0
    assert "T_0" in empty.table()


def test_primitives_count_as_level_zero():
    census = analyze_fragment(parse("fun a:N->N. max (lt (a 0) 1) (monus 3 (a 2))"))
    assert census.max_level == 0


def _broken(monkeypatch):
    real = harness.elimination
    monkeypatch.setattr(harness, "elimination",
                        lambda y, ctx: real(parse("fun a:N->N. a 1"), ctx))


def test_mismatch_is_reported_and_shrunk(monkeypatch):
    _broken(monkeypatch)
    y = parse("fun a:N->N. a 0")
    report = check_equivalence(y, CTX, SampleSpec(seed=3, n_samples=60), witness=False)
    assert not report.passed
    cx = report.counterexample
    small = Sample(**{**cx["sample"], "items": tuple(cx["sample"]["items"])})
    # the shrunk sample still fails when re-run on its own
    checker = Checker(y, CTX, elim=elimination(parse("fun a:N->N. a 1"), CTX))
    assert not checker.run(small, 3)[2]
    first_bad = next(sample_at(SampleSpec(seed=3), i) for i, v in enumerate(report.samples) if not v["equal"])
    assert len(small.items) <= len(first_bad.items)


def test_shrink_is_greedy_minimum():
    x = Sample("sum-mod", "const", 3, 2, (2, 1, 2, 0))
    out = shrink(x, lambda s: 1 in s.items)
    assert out == Sample(G_GRAMMAR[0], H_GRAMMAR[0], 0, 1, (1,))


def test_reports_are_byte_identical():
    y = parse(CORPUS[8].source)
    a = check_equivalence(y, CTX, SampleSpec(seed=11, n_samples=40)).dumps()
    b = check_equivalence(y, CTX, SampleSpec(seed=11, n_samples=40)).dumps()
    assert a == b


def test_sigma_level_two_rejected_by_sampler():
    with pytest.raises(UnsupportedType):
        realize(Sample("len", "const", 0, 1, ()), CircContext(N, Arrow(NN, N)), 3)


def test_demo_runs(capsys):
    assert run_demo(n_samples=20) == 0
    out = capsys.readouterr().out
    assert "B_t (fun t$:N*. Psi (Y (hat t$)) G$ H$ t$) (calH G$ H$) s$" in out
    assert "20/20 samples agree" in out


def test_function_elements_are_bounded():
    ctx = CircContext(NN, N)
    spec = SampleSpec(n_samples=50)
    for _, _, s in sample_inputs(spec, ctx):
        assert all(0 <= f(n) < 3 for f in s.items for n in range(6))


def test_bound_counts_higher_type_if0():
    y = parse("fun a:N->N. if0 (a 0) (fun n:N. n) (fun n:N. S n) 3")
    ctx = CircContext(N, N)
    assert harness.fragment_bound(y, ctx) == 2 + 1 + 1
    report = check_equivalence(y, ctx, SampleSpec(n_samples=30))
    assert report.passed and report.max_level <= report.bound_j
