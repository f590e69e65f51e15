"""Named verification suites behind ``amalgam verify``.

Each check returns a :class:`Check` with a pass flag, the measured value and
the bound it was held to. Checks are deterministic: no timings or dates
appear in their output.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .grid import (
    SampledField, ball_measure, dyadic_ladder, integrate, make_grid, make_weight, parse_spec, sample,
)
from .harness import (
    HEADROOM, REFERENCE_N, config_hash, default_cases, default_family, parse_t_grid,
    pointwise_maximal_check, read_fixtures, scaling_check, sweep_config, sweep_t, weight_identity_suite,
)
from .operators import (
    MultiplierSpec, bochner_riesz, bochner_riesz_maximal, cz_apply, hardy_op, maximal_centered,
    riesz_gamma, riesz_potential,
)
from .spaces import SpaceParams, amalgam_norm, holder_defect, lp_norm, weak_amalgam_norm
from .weights import BallFamily, ap_constant, ball_family

SUITES = ("grid", "weights", "spaces", "operators", "lemmas", "theorems")
DEFAULT_T_GRID = "0.125:2:dyadic"
SCALING_SPEC = ("gaussian:0.5", "power:0.5", 2.0, 2.0, 0.25, (1.0, 2.0, 4.0))


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    bound: str
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.suite:<10} {self.name:<34} value={self.value:.6g}  {self.bound}" + (
            f"  [{self.detail}]" if self.detail else "")

    def to_dict(self):
        return asdict(self)


def _check(suite, name, value, ok, bound, detail=""):
    return Check(suite, name, bool(ok), float(value), bound, detail)


# -- grid ------------------------------------------------------------------

def grid_suite():
    out = []
    g = make_grid(1, 4.0, 8)
    one = sample(parse_spec("1"), g)
    out.append(_check("grid", "integrate constant", integrate(one), integrate(one) == 8.0, "== 8"))
    g = make_grid(1, 8.0, 1024)
    val = integrate(sample(parse_spec("gaussian:1"), g))
    err = abs(val - math.sqrt(2 * math.pi))
    out.append(_check("grid", "gaussian integral", err, err < 1e-6, "< 1e-6"))
    g = make_grid(2, 4.0, 128)
    err = abs(ball_measure(make_weight("1", g), (0.0, 0.0), 1.0) - math.pi)
    out.append(_check("grid", "disc measure", err, err <= 4 * g.h, f"<= 4h = {4 * g.h:g}"))
    a = sample(parse_spec("random_smooth:7"), g).values
    b = sample(parse_spec("random_smooth:7"), g).values
    out.append(_check("grid", "seeded sampling deterministic", float(np.any(a != b)), np.array_equal(a, b), "== 0"))
    return out


# -- weights ---------------------------------------------------------------

IDENTITY_WEIGHTS = ("power:0.5", "power:-0.3", "power:0.8", "shifted_power:-0.5", "exp:0.3")


def identity_family(grid, size=200, seed=0):
    """Seeded subset of grid-centered dyadic balls with about ``size`` balls."""
    ladder = dyadic_ladder(grid, r_max=grid.L)
    idx = grid.indices()
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(len(idx), size // len(ladder), replace=False))
    return BallFamily(grid, idx[pick], ladder)


def weights_suite(grid=None):
    grid = grid or make_grid(1, 4.0, 256)
    out = []
    fam = ball_family(grid, dyadic_ladder(grid, r_max=grid.L))
    one = make_weight("1", grid)
    for p in (1.5, 2.0, 3.0):
        c = ap_constant(one, p, fam).constant_estimate
        out.append(_check("weights", f"[1]_A{p:g}", c, c == 1.0, "== 1 exactly"))
    sub = identity_family(grid)
    specs = list(IDENTITY_WEIGHTS)
    rep = weight_identity_suite(specs, [1.5, 2.0, 4.0 / 3.0], [3.0, 4.0, 4.0], sub)
    out.append(_check("weights", "A_p duality identity", rep.max_duality_error,
                      rep.max_duality_error <= 1e-10, "<= 1e-10 rel", f"{rep.balls} balls, {len(specs)} weights"))
    out.append(_check("weights", "A_(p,q) power identity", rep.max_power_error,
                      rep.max_power_error <= 1e-10, "<= 1e-10 rel", rep.notes[0]))
    w = make_weight("power:0.5", grid)
    c = ap_constant(w, 2.0, fam).constant_estimate
    out.append(_check("weights", "[|x|^0.5]_A2 lower bound", c, c >= 4 / 3, ">= 4/3"))
    return out


def ap_boundary_checks(n_small=1024, n_mid=4096, n_big=8192):
    """Refinement behavior of power-weight A_2 estimates."""
    est = {}
    for a in (0.5, 1.2):
        for n in sorted({n_small, n_mid, n_big}):
            g = make_grid(1, 4.0, n)
            fam = ball_family(g, dyadic_ladder(g, r_min=1 / 64, r_max=g.L))
            est[a, n] = ap_constant(make_weight(f"power:{a}", g), 2.0, fam).constant_estimate
    change = abs(est[0.5, n_big] / est[0.5, n_mid] - 1)
    growth = est[1.2, n_big] / est[1.2, n_small]
    return [
        _check("weights", "[|x|^0.5]_A2 >= 4/3", est[0.5, n_big], est[0.5, n_big] >= 4 / 3, ">= 4/3"),
        _check("weights", "[|x|^0.5]_A2 refinement", change, change <= 0.05, f"<= 5% (N={n_mid} vs {n_big})"),
        _check("weights", "[|x|^1.2]_A2 divergence", growth, growth >= 1.3, f">= 1.3x (N={n_small} to {n_big})"),
    ]


# -- spaces ----------------------------------------------------------------

def slice_checks(N=1024):
    g = make_grid(1, 4.0, N)
    one = make_weight("1", g)
    ts = [g.L / 2 / 2 ** k for k in range(7)][::-1]
    worst = 0.0
    for p in (1.5, 2.0, 3.0):
        for spec in ("gaussian:0.3", "indicator:0,1", "bump:0,1"):
            f = sample(parse_spec(spec), g, confine=True)
            ref = lp_norm(f, p=p)
            for t in ts:
                worst = max(worst, abs(amalgam_norm(f, SpaceParams(p, p, t, one, one)) - ref) / ref)
    return [_check("spaces", "slice identity", worst, worst < 1e-3, "< 1e-3 rel", f"7 t values in [{ts[0]:g}, {ts[-1]:g}]")]


HOLDER_W = ("1", "power:0.3")
HOLDER_V = ("1", "power:0.2", "power:-0.2")


def holder_triples(grid, n=100, seed=0):
    """Seeded ``(f, g, params)`` triples; every fourth has ``q = 1`` (dual ``q' = inf``)."""
    rng = np.random.default_rng(seed)
    fam = default_family(grid.dim, seed).specs
    ts = dyadic_ladder(grid, r_max=grid.L / 2).radii
    weights = {s: make_weight(s, grid) for s in HOLDER_W + HOLDER_V}
    out = []
    for k in range(n):
        f = sample(fam[rng.integers(len(fam))], grid, confine=True)
        g = sample(fam[rng.integers(len(fam))], grid, confine=True)
        p = float(rng.choice([1.5, 2.0, 3.0]))
        q = 1.0 if k % 4 == 0 else float(rng.choice([1.5, 2.0, 3.0]))
        t = float(ts[rng.integers(len(ts))])
        w, v = HOLDER_W[rng.integers(len(HOLDER_W))], HOLDER_V[rng.integers(len(HOLDER_V))]
        out.append((f, g, SpaceParams(p, q, t, weights[w], weights[v])))
    return out


def holder_checks(N=256, seed=0):
    grid = make_grid(1, 4.0, N)
    triples = holder_triples(grid, seed=seed)
    worst, worst_at, bad, weak_bad, weak_worst = math.inf, None, 0, 0, -math.inf
    for f, g, params in triples:
        d = holder_defect(f, g, params)
        if d < worst:
            worst, worst_at = d, params.describe()
        bad += d < -1e-9
        s = amalgam_norm(f, params)
        wk = weak_amalgam_norm(f, params)
        weak_worst = max(weak_worst, wk / s - 1)
        weak_bad += wk > s * (1 + 1e-9)
    return [
        _check("spaces", "Hölder defect", worst, bad == 0, ">= -1e-9",
               f"{bad} of {len(triples)} triples below; worst at {worst_at}"),
        _check("spaces", "weak <= strong", weak_worst, weak_bad == 0, "weak/strong - 1 <= 1e-9",
               f"{weak_bad} of {len(triples)} above"),
    ]


def homogeneity_checks():
    g = make_grid(1, 4.0, 256)
    f = sample(parse_spec("random_smooth:1"), g, confine=True)
    params = SpaceParams(2.0, 1.5, 0.5, make_weight("power:0.3", g), make_weight("power:0.2", g))
    a, b = amalgam_norm(f * -3.0, params), 3.0 * amalgam_norm(f, params)
    err = abs(a - b) / b
    return [_check("spaces", "homogeneity", err, err <= 1e-12, "<= 1e-12 rel")]


def spaces_suite():
    return slice_checks() + holder_checks() + homogeneity_checks()


# -- operators -------------------------------------------------------------

def oracle_checks():
    out = []
    g = make_grid(1, 4.0, 1024)
    f = sample(parse_spec("indicator:0,1"), g)
    m = maximal_centered(f, dyadic_ladder(g, r_max=2 * g.L)).at((2.0,))
    out.append(_check("operators", "M chi[0,1](2)", abs(m - 0.25), abs(m - 0.25) <= 2 * g.h, f"<= 2h = {2 * g.h:g}"))
    g2 = make_grid(1, 4.0, 2048)
    f2 = sample(parse_spec("indicator:-1,1"), g2)
    hv = cz_apply(f2).at((2.0,))
    err = abs(hv - math.log(3) / math.pi)
    out.append(_check("operators", "Hilbert chi[-1,1](2)", err, err <= 1e-2, "<= 1e-2 (N=2048)"))
    iv = riesz_potential(f, 0.5).at((0.0,))
    err = abs(iv - 2 / riesz_gamma(0.5, 1))
    out.append(_check("operators", "I_1/2 chi[0,1](0)", err, err <= 1e-3, "<= 1e-3"))
    fh = sample(parse_spec("indicator:-1,1"), g)
    x = g.axis
    exact = np.where(np.abs(x) <= 1, 2.0, 2.0 / np.abs(x))
    err = float(np.max(np.abs(hardy_op(fh).values - exact)))
    out.append(_check("operators", "Hardy chi[-1,1] closed form", err, err <= 2 * g.h, f"<= 2h = {2 * g.h:g}"))
    return out


def band_limited(grid, cutoff, seed=0):
    """Seeded real trigonometric sum over the discrete frequencies with ``|xi| <= cutoff``."""
    rng = np.random.default_rng(seed)
    xi = 2 * math.pi * np.fft.fftfreq(grid.N, d=grid.h)
    mesh = np.meshgrid(*([xi] * grid.dim), indexing="ij")
    band = sum(m * m for m in mesh) <= cutoff ** 2
    coef = np.where(band, rng.normal(size=band.shape) + 1j * rng.normal(size=band.shape), 0)
    return SampledField(grid, np.real(np.fft.ifftn(coef)) * grid.N ** grid.dim)


def bochner_riesz_checks(N=1024):
    out = []
    g = make_grid(1, 4.0, N)
    f = sample(parse_spec("random_smooth:1"), g, confine=True)
    delta = (g.dim - 1) / 2
    err = 0.0
    for R in (1.0, 4.0, 16.0):
        tf = bochner_riesz(f, MultiplierSpec(delta, R))
        err = max(err, abs(integrate(tf) - integrate(f)))
    out.append(_check("operators", "BR mean preservation", err, err <= 1e-10, "<= 1e-10"))
    bl = band_limited(g, 1.0)
    bl_err = lp_norm(bochner_riesz(bl, MultiplierSpec(delta, 100.0)) - bl) / lp_norm(bl)
    out.append(_check("operators", "BR band-limited recovery", bl_err, bl_err < 1e-2, "< 1e-2 rel L2 (R=100)"))
    ladder = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    mx = bochner_riesz_maximal(f, 0.5, ladder).values
    slack = min(float(np.min(mx - np.abs(bochner_riesz(f, MultiplierSpec(0.5, R)).values))) for R in ladder)
    out.append(_check("operators", "BR maximal dominates", slack, slack >= 0, ">= 0"))
    return out


def operators_suite():
    return oracle_checks() + bochner_riesz_checks()


# -- lemmas ----------------------------------------------------------------

def pointwise_checks(N=512, t=0.5):
    g = make_grid(1, 4.0, N)
    out = []
    for spec in ("indicator:0,1", "gaussian:0.5", "random_smooth:1"):
        rep = pointwise_maximal_check(sample(parse_spec(spec), g, confine=True), t)
        out.append(_check("lemmas", f"maximal split {spec}", rep.violations, rep.violations == 0, "== 0 violations",
                          f"{rep.pairs_checked} pairs"))
    return out


def scaling_run(grid):
    f_spec, w_spec, p, q, t, alphas = SCALING_SPEC
    params = SpaceParams(p, q, t, make_weight(w_spec, grid), make_weight("1", grid))
    return scaling_check(sample(parse_spec(f_spec), grid, confine=True), params, alphas)


def scaling_config(grid):
    f_spec, w_spec, p, q, t, alphas = SCALING_SPEC
    return {"case": "Lemma-scaling", "f": f_spec, "w": w_spec, "v": "1", "p": p, "q": q, "t": t,
            "alphas": list(alphas), "grid": [grid.dim, grid.L, grid.N]}


def lemmas_suite(grid=None, fixtures=None):
    grid = grid or make_grid(1, 4.0, 1024)
    out = pointwise_checks()
    rep = scaling_run(grid)
    ref = make_grid(grid.dim, grid.L, REFERENCE_N[grid.dim])
    fx = _fixture(fixtures, "Lemma-scaling", scaling_config(ref))
    if fx is None:
        out.append(_check("lemmas", "dilation constant K", rep.K, False, "no matching fixture"))
    else:
        out.append(_check("lemmas", "dilation constant K", rep.K, rep.K <= fx * HEADROOM,
                          f"<= {HEADROOM:g} x pinned {fx:.6g}"))
    return out


# -- theorems --------------------------------------------------------------

def _fixture(fixtures, suite_id, config):
    if fixtures is None:
        try:
            fixtures = read_fixtures()
        except FileNotFoundError:
            return None
    fx = fixtures.get(suite_id)
    if fx is None or fx.config_hash != config_hash(config):
        return None
    return fx.value


def theorem_sweeps(grid, cases=None, t_text=DEFAULT_T_GRID, seed=0):
    family = default_family(grid.dim, seed)
    ts = parse_t_grid(t_text, grid)
    cases = default_cases(grid.dim) if cases is None else cases
    return [(c, sweep_t(c, family, grid, ts), family, ts) for c in cases]


def theorems_suite(grid=None, fixtures=None, seed=0):
    grid = grid or make_grid(1, 4.0, 1024)
    ref = make_grid(grid.dim, grid.L, REFERENCE_N[grid.dim])
    out = []
    for case, sw, family, ts in theorem_sweeps(grid, seed=seed):
        fx = _fixture(fixtures, case.suite_id, sweep_config(case, family, ref, ts))
        if fx is None:
            out.append(_check("theorems", f"spread {case.suite_id}", sw.spread, False, "no matching fixture"))
        else:
            out.append(_check("theorems", f"spread {case.suite_id}", sw.spread, sw.spread <= fx * HEADROOM,
                              f"<= {HEADROOM:g} x pinned {fx:.6g}"))
    return out


def run_suite(name, grid=None, fixtures=None, seed=0):
    if name == "grid":
        return grid_suite()
    if name == "weights":
        return weights_suite()
    if name == "spaces":
        return spaces_suite()
    if name == "operators":
        return operators_suite()
    if name == "lemmas":
        return lemmas_suite(grid, fixtures)
    if name == "theorems":
        return theorems_suite(grid, fixtures, seed)
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, grid, fixtures, seed)]
    raise KeyError(name)
