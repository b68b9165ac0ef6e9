"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import itertools
import time

from barelim.cli import main
from barelim.constructions import build_psi
from barelim.evaluator import FunV, eval_br_oracle, evaluate
from barelim.harness import (
    CORPUS, G_GRAMMAR, H_GRAMMAR, Sample, SampleSpec, analyze_fragment, check_equivalence, check_val,
    check_witness, fragment_bound, realize,
)
from barelim.translator import eliminate_br
from barelim.types import N, Arrow, CircContext, arrow_types, circ_type, level, level_bound

NN = Arrow(N, N)
CTX = CircContext(N, N)
# every grammar pair, with two choices of the constants c and m
GRAMMAR_PAIRS = [(g, h, c, m) for g, h in itertools.product(G_GRAMMAR, H_GRAMMAR) for c, m in [(0, 1), (3, 2)]]


def psi_grid(k):
    for n in range(k + 3):
        for items in itertools.product(range(3), repeat=n):
            for g, h, c, m in GRAMMAR_PAIRS:
                yield realize(Sample(g, h, c, m, items), CTX, 3)


def test_psi_specification(criterion):
    start = time.perf_counter()
    psi = evaluate(build_psi(CTX).term)
    checked = bad = 0
    for k in range(6):
        pk = psi(k)
        for G, H, s in psi_grid(k):
            got = pk(G)(H)(s)
            if len(s.items) > k:
                want = G(s)
            else:
                want = H(s)(FunV(lambda x, G=G, H=H, s=s: pk(G)(H)(s.append(x))))
            checked += 1
            bad += got != want
    dt = time.perf_counter() - start
    criterion(1, bad == 0, f"Psi branch equations: {checked - bad}/{checked} exact ({dt:.2f}s, expected < 5s)")
    assert bad == 0


def test_elimination_equivalence(criterion):
    start = time.perf_counter()
    failed, arrow_cases = [], 0
    for entry in CORPUS:
        report = check_equivalence(entry.term(), CircContext(entry.tau, N), SampleSpec(seed=42, n_samples=100),
                                   witness=False)
        if not report.passed or len(report.samples) < 100:
            failed.append(entry.name)
        arrow_cases += entry.tau == NN
    dt = time.perf_counter() - start
    ok = not failed and arrow_cases >= 2 and any(c.name == "demo" for c in CORPUS)
    criterion(2, ok, f"{len(CORPUS) - len(failed)}/{len(CORPUS)} corpus terms agree with the oracle on 100 "
                     f"samples each, {arrow_cases} with tau = N->N ({dt:.2f}s, expected < 30s)")
    assert ok, failed


def test_fragment_bound(criterion):
    rows = []
    for entry in CORPUS:
        ctx = CircContext(entry.tau, N)
        y = entry.term()
        got = analyze_fragment(eliminate_br(y, ctx)).max_level
        bound = fragment_bound(y, ctx)
        t0 = analyze_fragment(y).max_level == 0 and entry.tau == N
        rows.append((entry.name, got, bound, got <= bound and (not t0 or got <= 3)))
    ok = all(r[3] for r in rows)
    detail = ", ".join(f"{n} {g}<={b}" for n, g, b, _ in rows)
    criterion(3, ok, f"recursor levels within bound: {detail}")
    assert ok


def test_level_formula(criterion):
    count = bad = 0
    for tau in (N, NN):
        for sigma in (N, NN, Arrow(NN, N)):
            ctx = CircContext(tau, sigma)
            for eta in arrow_types(3):
                count += 1
                bad += level(circ_type(eta, ctx)) != level_bound(eta, ctx)
    criterion(4, bad == 0, f"level of the translated type matches the closed form on {count - bad}/{count} cases")
    assert bad == 0


def test_val_component(criterion):
    failures = {e.name: len(check_val(e.term(), CircContext(e.tau, N), n=50)) for e in CORPUS}
    ok = not any(failures.values())
    criterion(5, ok, f"first component equals the source term on 50 alphas for {len(CORPUS)} corpus terms")
    assert ok, failures


def test_general_equation_with_witness(criterion):
    summaries = {e.name: check_witness(e.term(), CircContext(e.tau, N)) for e in CORPUS}
    ok = all(w.ok for w in summaries.values())
    eq = sum(w.equation_samples for w in summaries.values())
    secured = sum(w.check.securing for w in summaries.values())
    criterion(6, ok, f"witness samplers and general equation hold for {len(summaries)} corpus terms "
                     f"({secured} securing checks, {eq} equation samples; bar sampled, fuel-bounded)")
    assert ok, {k: w.to_json() for k, w in summaries.items() if not w.ok}


def test_constant_y_matches_psi(criterion):
    psi = evaluate(build_psi(CTX).term)
    checked = bad = 0
    for k in range(6):
        Y = FunV(lambda _a, k=k: k)
        pk = psi(k)
        for G, H, s in psi_grid(k):
            checked += 1
            bad += eval_br_oracle(G, H, Y, s) != pk(G)(H)(s)
    criterion(7, bad == 0, f"oracle with constant Y equals Psi(k): {checked - bad}/{checked}")
    assert bad == 0


def test_report_determinism(criterion, tmp_path):
    src = tmp_path / "y.t"
    src.write_text(CORPUS[8].source + "\n")
    paths = [tmp_path / "r1.json", tmp_path / "r2.json"]
    codes = [main(["check", "--input", str(src), "--seed", "1234", "--samples", "100", "--report", str(p)])
             for p in paths]
    ok = codes == [0, 0] and paths[0].read_bytes() == paths[1].read_bytes()
    criterion(8, ok, "two check runs with seed 1234 wrote byte-identical reports")
    assert ok
