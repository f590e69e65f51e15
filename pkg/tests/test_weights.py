import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amalgam.grid import ParameterError, WeightField, dyadic_ladder, make_grid, make_weight
from amalgam.weights import (
    Ball, a1_constant, ap_constant, ap_quantity, apq_constant, apq_quantity, ball_family,
    conjugate, density_check, doubling_constant, dual_weight,
)


@pytest.fixture(scope="module")
def g():
    return make_grid(1, 4.0, 256)


@pytest.fixture(scope="module")
def fam(g):
    return ball_family(g, dyadic_ladder(g, r_max=g.L), stride=4)


def test_conjugate():
    assert conjugate(2) == 2
    assert conjugate(1) == math.inf and conjugate(math.inf) == 1
    assert conjugate(conjugate(1.7)) == pytest.approx(1.7)
    with pytest.raises(ParameterError):
        conjugate(0.5)


def test_unit_weight_constants(g, fam):
    one = make_weight("1", g)
    for p in (1.2, 2.0, 5.0):
        assert ap_constant(one, p, fam).constant_estimate == 1.0
        assert apq_constant(one, p, 3.0, fam).constant_estimate == 1.0
    assert apq_constant(one, 1, 3.0, fam).constant_estimate == 1.0
    assert a1_constant(one, dyadic_ladder(g)) == 1.0


def test_power_half_origin_balls_closed_form():
    # avg |x|^(1/2) = (2/3) r^(1/2), avg |x|^(-1/2) = 2 r^(-1/2) on B(0, r).
    # The midpoint error of the singular average decays like sqrt(h/r), so
    # 2% needs a few hundred cells per ball.
    for n, radii in ((1024, (2.0, 4.0)), (16384, (0.25, 1.0))):
        g = make_grid(1, 4.0, n)
        w = make_weight("power:0.5", g)
        for r in radii:
            assert ap_quantity(w, Ball((0.0,), r), 2.0) == pytest.approx(4 / 3, rel=0.02)


def test_ap_report_fields(g, fam):
    rep = ap_constant(make_weight("power:0.5", g), 2.0, fam)
    d = json.loads(rep.to_json())
    assert set(d) == {"constant", "center", "radius", "family_size"}
    assert d["family_size"] == len(fam)
    # reported constant equals the quantity at the argmax ball
    assert ap_quantity(make_weight("power:0.5", g), rep.argmax_ball, 2.0) == pytest.approx(rep.constant_estimate, rel=1e-12)


WEIGHTS = ["power:0.5", "power:-0.4", "shifted_power:-0.5", "exp:0.5", "power:0.9"]


@pytest.mark.parametrize("spec", WEIGHTS)
def test_duality_identity_per_ball(g, fam, spec):
    w = make_weight(spec, g)
    for p in (1.5, 3.0):
        pc = conjugate(p)
        wd = dual_weight(w, p)
        for b in list(fam)[::7]:
            assert ap_quantity(wd, b, pc) == pytest.approx(ap_quantity(w, b, p) ** (pc - 1), rel=1e-10)


@pytest.mark.parametrize("spec", WEIGHTS)
def test_duality_identity_family_sup(g, fam, spec):
    w = make_weight(spec, g)
    p = 1.5
    a = ap_constant(dual_weight(w, p), conjugate(p), fam).constant_estimate
    b = ap_constant(w, p, fam).constant_estimate
    assert a == pytest.approx(b ** (conjugate(p) - 1), rel=1e-10)


@pytest.mark.parametrize("spec", WEIGHTS)
def test_apq_power_identity(g, fam, spec):
    w = make_weight(spec, g)
    for p, q in ((4 / 3, 4.0), (1.5, 3.0), (2.0, 2.5)):
        s = 1 + q / conjugate(p)
        for b in list(fam)[::11]:
            assert apq_quantity(w, b, p, q) ** q == pytest.approx(ap_quantity(w.power(q), b, s), rel=1e-10)


def test_family_constant_matches_per_ball(g, fam):
    w = make_weight("exp:0.7", g)
    best = max(ap_quantity(w, b, 2.5) for b in fam)
    assert ap_constant(w, 2.5, fam).constant_estimate == pytest.approx(best, rel=1e-12)
    best = max(apq_quantity(w, b, 1, 2.0) for b in fam)
    assert apq_constant(w, 1, 2.0, fam).constant_estimate == pytest.approx(best, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.floats(1.05, 6.0), r=st.floats(1.0, 4.0), c=st.floats(0.01, 100))
def test_ap_invariants(seed, p, r, c):
    g = make_grid(1, 4.0, 64)
    rng = np.random.default_rng(seed)
    w = WeightField(g, np.exp(rng.normal(size=g.N + 2 * g.pad)))
    ball = Ball((float(rng.uniform(-3, 3)),), max(g.h, r))
    qp = ap_quantity(w, ball, p)
    assert qp >= 1 - 1e-9  # Jensen
    assert ap_quantity(w, ball, p + r) <= qp * (1 + 1e-9)  # decreasing in p
    assert ap_quantity(w.scaled(c), ball, p) == pytest.approx(qp, rel=1e-12)


def test_dual_weight_examples(g):
    w = make_weight("shifted_power:0.7", g)
    np.testing.assert_allclose(dual_weight(w, 2.0).padded, 1 / w.padded, rtol=1e-15)
    back = dual_weight(dual_weight(w, 3.0), 1.5)
    np.testing.assert_allclose(back.padded, w.padded, rtol=1e-12)
    np.testing.assert_array_equal(dual_weight(make_weight("1", g), 4.0).padded, 1.0)
    with pytest.raises(ParameterError):
        dual_weight(w, 1.0)


def test_power_weight_outside_a2_diverges():
    est = []
    for n in (1024, 4096):
        g = make_grid(1, 4.0, n)
        fam = ball_family(g, dyadic_ladder(g, r_min=1 / 64, r_max=g.L))
        est.append(ap_constant(make_weight("power:1.2", g), 2.0, fam).constant_estimate)
    assert est[1] > 1.2 * est[0]


def test_a1_examples():
    vals = []
    for n in (1024, 2048):
        g = make_grid(1, 4.0, n)
        vals.append(a1_constant(make_weight("shifted_power:-0.5", g), dyadic_ladder(g, r_max=2 * g.L)))
    assert np.isfinite(vals[0]) and abs(vals[1] / vals[0] - 1) < 0.05
    g = make_grid(1, 4.0, 512)
    w = make_weight("exp:1", g)
    growth = [a1_constant(w, dyadic_ladder(g, r_max=top)) for top in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(b > a for a, b in zip(growth, growth[1:]))


def test_apq_example_grid_stable():
    vals = []
    for n in (2048, 4096):
        g = make_grid(1, 4.0, n)
        fam = ball_family(g, dyadic_ladder(g, r_max=g.L), stride=8)
        vals.append(apq_constant(make_weight("power:-0.125", g), 4 / 3, 4.0, fam).constant_estimate)
    assert abs(vals[1] / vals[0] - 1) < 0.05


def test_doubling_examples():
    g = make_grid(1, 4.0, 512)
    fam = ball_family(g, dyadic_ladder(g, r_min=0.25, r_max=1.0), stride=8)
    d = doubling_constant(make_weight("1", g), fam)
    assert abs(d - 2.0) <= 2 * g.h / 0.25
    vals = []
    for n in (1024, 2048):
        gg = make_grid(1, 4.0, n)
        ff = ball_family(gg, dyadic_ladder(gg, r_min=0.125, r_max=1.0), stride=16)
        vals.append(doubling_constant(make_weight("power:0.5", gg), ff))
    assert abs(vals[1] / vals[0] - 1) < 0.05
    g2 = make_grid(2, 2.0, 64)
    fam2 = ball_family(g2, dyadic_ladder(g2, r_min=0.25, r_max=0.5), stride=8, within=0.5)
    assert doubling_constant(make_weight("1", g2), fam2) == pytest.approx(4.0, rel=0.1)


def test_density_examples():
    g = make_grid(1, 4.0, 1024)
    rep = density_check(make_weight("1", g), Ball((0.0,), 1.0), [0.25, 0.5, 1.0])
    assert rep.pairs[-1] == (1.0, 1.0)
    assert rep.delta == pytest.approx(1.0, abs=1e-3) and rep.C == pytest.approx(1.0, abs=1e-3)
    rep = density_check(make_weight("power:0.5", g), Ball((0.0,), 1.0), [0.125, 0.25, 0.5, 1.0])
    assert rep.delta == pytest.approx(1.5, rel=0.05)
    ratios = [b for _, b in rep.pairs]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    with pytest.raises(ParameterError):
        density_check(make_weight("1", g), Ball((0.0,), 1.0), [1.5])
