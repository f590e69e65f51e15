"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion still reports its measured value.
"""
import math
import time

import numpy as np

from amalgam.cli import main
from amalgam.grid import dyadic_ladder, integrate, make_grid, make_weight, sample
from amalgam.harness import (
    HEADROOM, REFERENCE_N, config_hash, default_family, pointwise_maximal_check, read_fixtures, sweep_config,
    weight_identity_suite,
)
from amalgam.operators import (
    MultiplierSpec, bochner_riesz, bochner_riesz_maximal, cz_apply, hardy_op, maximal_centered,
    riesz_gamma, riesz_potential,
)
from amalgam.spaces import SpaceParams, amalgam_norm, holder_defect, lp_norm, weak_amalgam_norm
from amalgam.suites import (
    DEFAULT_T_GRID, IDENTITY_WEIGHTS, band_limited, holder_triples, identity_family, theorem_sweeps,
)
from amalgam.weights import ap_constant, ball_family


def test_criterion_01_slice_identity(criterion):
    start = time.perf_counter()
    g = make_grid(1, 4.0, 1024)
    one = make_weight("1", g)
    ts = [g.L / 2 / 2 ** k for k in range(7)]
    worst = 0.0
    for p in (1.5, 2.0, 3.0):
        for spec in ("gaussian:0.3", "indicator:0,1", "bump:0,1"):
            f = sample(spec, g, confine=True)
            ref = lp_norm(f, p=p)
            for t in ts:
                worst = max(worst, abs(amalgam_norm(f, SpaceParams(p, p, t, one, one)) - ref) / ref)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-3 and elapsed < 10
    criterion(1, "slice identity", ok, f"max rel error {worst:.2e} < 1e-3", elapsed)
    assert ok


def test_criterion_02_holder(criterion):
    start = time.perf_counter()
    triples = holder_triples(make_grid(1, 4.0, 256), n=100, seed=0)
    defects = [holder_defect(f, g, params) for f, g, params in triples]
    elapsed = time.perf_counter() - start
    bad = [(d, p.describe()) for d, (_, _, p) in zip(defects, triples) if d < -1e-9]
    n_q1 = sum(p.q == 1 for _, _, p in triples)
    ok = not bad and elapsed < 30
    detail = f"min defect {min(defects):.3e} >= -1e-9, {len(bad)}/100 below ({n_q1} with q = 1)"
    if bad:
        detail += f"; worst at {min(bad, key=lambda b: b[0])[1]}"
    criterion(2, "Hölder", ok, detail, elapsed)
    assert ok


def test_criterion_03_weak_below_strong(criterion):
    start = time.perf_counter()
    triples = holder_triples(make_grid(1, 4.0, 256), n=100, seed=0)
    worst = max(weak_amalgam_norm(f, p) / amalgam_norm(f, p) - 1 for f, _, p in triples)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9
    criterion(3, "weak <= strong", ok, f"max weak/strong - 1 = {worst:.3e} <= 1e-9", elapsed)
    assert ok


def test_criterion_04_ap_algebra(criterion):
    start = time.perf_counter()
    g = make_grid(1, 4.0, 256)
    fam = identity_family(g, 200)
    rep = weight_identity_suite(list(IDENTITY_WEIGHTS), [1.5, 2.0, 4 / 3], [3.0, 4.0, 4.0], fam)
    full = ball_family(g, dyadic_ladder(g, r_max=g.L))
    unit = [ap_constant(make_weight("1", g), p, full).constant_estimate for p in (1.5, 2.0, 3.0)]
    elapsed = time.perf_counter() - start
    ok = len(fam) == 200 and rep.passed(1e-10) and all(c == 1.0 for c in unit)
    criterion(4, "A_p algebra", ok, f"duality {rep.max_duality_error:.1e}, power {rep.max_power_error:.1e} "
              f"over {len(fam)} balls x {len(IDENTITY_WEIGHTS)} weights; [1]_Ap = {unit}", elapsed)
    assert ok


def _a2(a, n):
    g = make_grid(1, 4.0, n)
    fam = ball_family(g, dyadic_ladder(g, r_min=1 / 64, r_max=g.L))
    return ap_constant(make_weight(f"power:{a}", g), 2.0, fam).constant_estimate


def test_criterion_05_power_weight_boundary(criterion):
    start = time.perf_counter()
    half = {n: _a2(0.5, n) for n in (4096, 8192)}
    steep = {n: _a2(1.2, n) for n in (1024, 8192)}
    elapsed = time.perf_counter() - start
    change = abs(half[8192] / half[4096] - 1)
    growth = steep[8192] / steep[1024]
    ok = min(half.values()) >= 4 / 3 and change <= 0.05 and growth >= 1.3
    criterion(5, "power-weight boundary", ok, f"[|x|^0.5]_A2 = {half[8192]:.4f} >= 4/3, change {change:.2%} <= 5%, "
              f"[|x|^1.2]_A2 growth {growth:.2f}x >= 1.3x", elapsed)
    assert ok


def test_criterion_06_operator_oracles(criterion):
    start = time.perf_counter()
    g = make_grid(1, 4.0, 1024)
    ind01 = sample("indicator:0,1", g)
    m_err = abs(maximal_centered(ind01, dyadic_ladder(g, r_max=2 * g.L)).at(2.0) - 0.25)
    g2 = make_grid(1, 4.0, 2048)
    h_err = abs(cz_apply(sample("indicator:-1,1", g2)).at(2.0) - math.log(3) / math.pi)
    i_err = abs(riesz_potential(ind01, 0.5).at(0.0) - 2 / riesz_gamma(0.5, 1))
    x = g.axis
    exact = np.where(np.abs(x) <= 1, 2.0, 2.0 / np.abs(x))
    hardy_err = float(np.max(np.abs(hardy_op(sample("indicator:-1,1", g)).values - exact)))
    elapsed = time.perf_counter() - start
    ok = m_err <= 2 * g.h and h_err <= 1e-2 and i_err <= 1e-3 and hardy_err <= 2 * g.h
    criterion(6, "operator oracles", ok, f"M {m_err:.1e} <= 2h, Hilbert {h_err:.1e} <= 1e-2, "
              f"I_1/2 {i_err:.1e} <= 1e-3, Hardy {hardy_err:.1e} <= 2h", elapsed)
    assert ok


def test_criterion_07_pointwise_maximal_split(criterion):
    start = time.perf_counter()
    g = make_grid(1, 4.0, 512)
    reps = [pointwise_maximal_check(sample(s, g, confine=True), 0.5)
            for s in ("indicator:0,1", "gaussian:0.5", "random_smooth:1")]
    elapsed = time.perf_counter() - start
    v = sum(r.violations for r in reps)
    ok = v == 0
    criterion(7, "pointwise maximal split", ok, f"{v} violations over {sum(r.pairs_checked for r in reps)} pairs",
              elapsed)
    assert ok


def test_criterion_08_bochner_riesz(criterion):
    start = time.perf_counter()
    g = make_grid(1, 4.0, 1024)
    f = sample("random_smooth:1", g, confine=True)
    mean_err = max(abs(integrate(bochner_riesz(f, MultiplierSpec(d, R))) - integrate(f))
                   for d in (0.0, 0.5) for R in (1.0, 4.0, 16.0))
    bl = band_limited(g, 1.0)
    rec = lp_norm(bochner_riesz(bl, MultiplierSpec(0.0, 100.0)) - bl) / lp_norm(bl)
    ladder = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    mx = bochner_riesz_maximal(f, 0.5, ladder).values
    slack = min(float(np.min(mx - np.abs(bochner_riesz(f, MultiplierSpec(0.5, R)).values))) for R in ladder)
    elapsed = time.perf_counter() - start
    ok = mean_err <= 1e-10 and rec < 1e-2 and slack >= 0
    criterion(8, "Bochner-Riesz contract", ok, f"mean {mean_err:.1e} <= 1e-10, recovery {rec:.1e} < 1e-2, "
              f"maximal slack {slack:.1e} >= 0", elapsed)
    assert ok


def test_criterion_09_t_uniformity(criterion):
    start = time.perf_counter()
    g = make_grid(1, 4.0, 1024)
    ref = make_grid(1, 4.0, REFERENCE_N[1])
    fixtures = read_fixtures()
    family = default_family(1)
    failures, worst = [], 0.0
    for case, sw, fam, ts in theorem_sweeps(g, t_text=DEFAULT_T_GRID):
        fx = fixtures.get(case.suite_id)
        if fx is None or fx.config_hash != config_hash(sweep_config(case, family, ref, ts)):
            failures.append(f"{case.suite_id}: no matching fixture")
            continue
        worst = max(worst, sw.spread / fx.value)
        if sw.spread > fx.value * HEADROOM:
            failures.append(f"{case.suite_id}: spread {sw.spread:.4f} > {HEADROOM} x {fx.value:.4f}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300
    criterion(9, "t-uniformity", ok, f"16 cases, max spread/fixture {worst:.3f} <= {HEADROOM}"
              + (f"; {failures}" if failures else ""), elapsed)
    assert ok


def test_criterion_10_determinism(criterion, tmp_path, capsys):
    start = time.perf_counter()
    outs, codes = [], []
    for k in range(2):
        path = tmp_path / f"verify{k}.json"
        codes.append(main(["verify", "all", "--out", str(path)]))
        outs.append((path.read_bytes(), capsys.readouterr().out))
    elapsed = time.perf_counter() - start
    ok = outs[0] == outs[1] and codes[0] == codes[1]
    criterion(10, "determinism", ok, f"reports and summaries byte-identical across 2 runs (exit {codes})", elapsed)
    assert ok
