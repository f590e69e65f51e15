"""Empirical verification suites: operator-norm ratios, t-sweeps, scaling,
the pointwise maximal split and the weight-algebra identities.

Boundedness statements ``||Op f|| <= C ||f||`` are read as measurable ratios
over a seeded family of test functions. Constants that are left implicit are
measured once at a reference resolution and stored in a fixtures file; later
runs assert against them with 20% headroom.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .grid import (
    Grid, ParameterError, SampledField, dyadic_ladder, make_grid, make_weight, parse_spec,
    sample, ball_sums, lattice_count,
)
from .operators import make_operator, maximal_centered, maximal_uncentered
from .spaces import SpaceParams, amalgam_norm, weak_amalgam_norm
from .weights import (
    ap_quantity, apq_quantity, ball_family, conjugate, dual_weight, ap_constant,
)

__all__ = [
    "TestFamily", "default_family", "SpaceConfig", "TheoremCase", "default_cases", "RatioReport",
    "SweepReport", "op_norm_estimate", "sweep_t", "ScalingReport", "scaling_check",
    "MaximalCheckReport", "pointwise_maximal_check", "IdentityReport", "weight_identity_suite",
    "Fixture", "read_fixtures", "write_fixtures", "config_hash", "REFERENCE_N", "HEADROOM",
    "CSV_COLUMNS", "reports_to_csv", "parse_t_grid",
]

REFERENCE_N = {1: 2048, 2: 128}
HEADROOM = 1.2
CSV_COLUMNS = ("theorem_id", "t", "spec", "source_norm", "target_norm", "ratio")


# -- families --------------------------------------------------------------

@dataclass(frozen=True)
class TestFamily:
    specs: tuple
    seed: int = 0
    label: str = "custom"

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if len(self.specs) == 0:
            raise ParameterError("test family is empty")
        object.__setattr__(self, "specs", tuple(parse_spec(s) if isinstance(s, str) else s for s in self.specs))

    def sample(self, grid: Grid):
        return [sample(s, grid, confine=True) for s in self.specs]

    def extended(self, more) -> "TestFamily":
        return TestFamily(self.specs + tuple(more), self.seed, self.label + "+")


def default_family(dim: int = 1, seed: int = 0) -> TestFamily:
    """Three indicators, three Gaussians, two bumps, two oscillatory, two random_smooth."""
    if dim == 1:
        specs = ["indicator:0,1", "indicator:-1.5,-0.5", "indicator:-0.25,0.25",
                 "gaussian:0.25", "gaussian:0.5,0.5", "gaussian:0.1,-1",
                 "bump:0,1", "bump:0.75,0.5", "oscillatory:3", "oscillatory:8"]
    else:
        specs = ["indicator:0,1,0,1", "indicator:-1.5,-0.5,-0.5,0.5", "indicator:-0.25,0.25,-0.25,0.25",
                 "gaussian:0.25", "gaussian:0.5,0.5,0", "gaussian:0.1,-1,1",
                 "bump:0,0,1", "bump:0.75,0,0.5", "oscillatory:3", "oscillatory:8"]
    specs += [f"random_smooth:{seed + 1}", f"random_smooth:{seed + 2}"]
    return TestFamily(tuple(specs), seed, "default")


# -- theorem cases ---------------------------------------------------------

@dataclass(frozen=True)
class SpaceConfig:
    """Exponents and weight specs of an amalgam space; ``t`` is supplied per run."""

    p: float
    q: float
    w: str = "1"
    v: str = "1"

    def params(self, grid: Grid, t: float, cache=None) -> SpaceParams:
        cache = {} if cache is None else cache
        ws = []
        for s in (self.w, self.v):
            if s not in cache:
                cache[s] = make_weight(s, grid)
            ws.append(cache[s])
        return SpaceParams(self.p, self.q, t, ws[0], ws[1])

    def describe(self):
        return {"p": self.p, "q": "inf" if math.isinf(self.q) else self.q, "w": self.w, "v": self.v}


def _power_exponent(spec: str) -> Optional[float]:
    fs = parse_spec(spec)
    if fs.kind == "const":
        return 0.0
    if fs.kind == "power":
        return float(fs.params[0])
    return None


def _in_ap(a, p, n):
    if p == 1:
        return -n < a <= 0
    return -n < a < n * (p - 1)


def _in_apq(a, p, q, n):
    if p == 1:
        return a <= 0 and a * q > -n
    return a * q > -n and a * conjugate(p) < n


@dataclass(frozen=True)
class TheoremCase:
    """One boundedness claim: operator, source and target spaces, strong or weak target norm."""

    theorem_id: str
    operator: str
    source: SpaceConfig
    target: SpaceConfig
    norm_selector: str = "strong"
    dim: int = 1
    extra: tuple = ()

    @property
    def suite_id(self):
        return f"{self.theorem_id}/{self.norm_selector}"

    def option(self, key, default=None):
        return dict(self.extra).get(key, default)

    def validate(self) -> list:
        """Check the theorem's exponent and weight hypotheses; returns notes for
        weights whose class membership cannot be decided from their spec."""
        s, tg, n = self.source, self.target, self.dim
        notes = []
        if self.norm_selector not in ("strong", "weak"):
            raise ParameterError(f"norm selector must be strong or weak, got {self.norm_selector!r}")
        weak = self.norm_selector == "weak"
        if weak != (s.q == 1):
            raise ParameterError(f"{self.suite_id}: weak targets go with q = 1 sources")
        aw, av = _power_exponent(s.w), _power_exponent(s.v)
        tid = self.theorem_id

        def need(ok, what):
            if not ok:
                raise ParameterError(f"{self.suite_id}: hypothesis fails: {what}")

        if tid == "Thm-Riesz":
            alpha = float(self.option("alpha"))
            need(0 < alpha < n, "0 < alpha < n")
            for a0, a1, lab in ((s.p, tg.p, "p"), (s.q, tg.q, "q")):
                need(abs(alpha / n - (1 / a0 - 1 / a1)) < 1e-12, f"alpha/n = 1/{lab}0 - 1/{lab}")
            need(1 < s.p < n / alpha, "1 < p0 < n/alpha")
            need((weak and s.q == 1) or 1 < s.q < n / alpha, "1 < q0 < n/alpha")
            if aw is not None:
                need(_in_apq(aw, s.p, tg.p, n), "w in A_(p0,p)")
            if av is not None:
                need(_in_apq(av, s.q, tg.q, n), "v in A_(q0,q)")
        else:
            need(s == tg, "source and target spaces agree")
            need(1 < s.p < math.inf, "1 < p < inf")
            pw, qv = s.p, s.q
            if tid == "Thm-TOmega":
                theta, gam = float(self.option("theta")), float(self.option("gamma"))
                need(s.p >= conjugate(theta), "theta' <= p")
                pw = s.p / conjugate(theta)
                if not weak:
                    need(s.q >= conjugate(gam), "gamma' <= q")
                    qv = s.q / conjugate(gam)
            if not weak:
                need(1 < s.q <= math.inf if tid == "Thm-M" else 1 < s.q < math.inf, "range of q")
            if aw is not None:
                need(_in_ap(aw, pw, n), f"w in A_{pw:g}")
            if av is not None and not math.isinf(qv):
                need(_in_ap(av, qv, n), f"v in A_{qv:g}")
        for spec, a in ((s.w, aw), (s.v, av)):
            if a is None:
                notes.append(f"class membership of {spec} not checked")
        return notes


def default_cases(dim: int = 1) -> list:
    """The default weighted configuration, ``w = power:0.3``, ``v = power:0.2``
    for strong cases and the A_1 weight ``v = power:-0.2`` for weak ones."""
    w, v, v1 = "power:0.3", "power:0.2", "power:-0.2"
    strong, weak = SpaceConfig(2.0, 2.0, w, v), SpaceConfig(2.0, 1.0, w, v1)
    br = "0.5" if dim == 1 else f"{(dim - 1) / 2:g}"
    ops = [
        ("Thm-M", "M", "M", ()),
        ("Thm-CZ", "CZ:hilbert" if dim == 1 else "CZ:riesz1", None, ()),
        ("Thm-TOmega", "TOmega:sgn" if dim == 1 else "TOmega:cos", None, (("theta", 10.0), ("gamma", 10.0))),
        ("Thm-Mu", "mu:sgn" if dim == 1 else "mu:cos", None, ()),
        ("Thm-BR", f"BRmax:delta={br}", f"BR:delta={br},R=8", ()),
        ("Thm-g", "g", None, ()),
        ("Thm-S", "S:alpha=1,K=8", None, ()),
    ]
    cases = []
    for tid, op, weak_op, extra in ops:
        cases.append(TheoremCase(tid, op, strong, strong, "strong", dim, extra))
        cases.append(TheoremCase(tid, weak_op or op, weak, weak, "weak", dim, extra))
    alpha = 0.5 if dim == 1 else 1.0
    p0, q0 = (1.6, 1.5) if dim == 1 else (1.6, 1.5)
    tp, tq = 1 / (1 / p0 - alpha / dim), 1 / (1 / q0 - alpha / dim)
    riesz = (("alpha", alpha),)
    cases.append(TheoremCase("Thm-Riesz", f"I:alpha={alpha:g}", SpaceConfig(p0, q0, w, v),
                             SpaceConfig(tp, tq, w, v), "strong", dim, riesz))
    tq1 = 1 / (1 - alpha / dim)
    cases.append(TheoremCase("Thm-Riesz", f"I:alpha={alpha:g}", SpaceConfig(p0, 1.0, w, v1),
                             SpaceConfig(tp, tq1, w, v1), "weak", dim, riesz))
    for c in cases:
        c.validate()
    return cases


# -- ratio estimation ------------------------------------------------------

@dataclass
class RatioReport:
    theorem_id: str
    t: float
    specs: list
    source_norms: list
    target_norms: list
    ratios: list
    max_ratio: float
    argmax_spec: str
    params: dict
    notes: list = field(default_factory=list)

    def rows(self):
        for s, a, b, r in zip(self.specs, self.source_norms, self.target_norms, self.ratios):
            yield {"theorem_id": self.theorem_id, "t": self.t, "spec": s,
                   "source_norm": a, "target_norm": b, "ratio": r}

    def to_dict(self):
        return asdict(self)


def _target_norm(case, f, params):
    return weak_amalgam_norm(f, params) if case.norm_selector == "weak" else amalgam_norm(f, params)


def op_norm_estimate(case: TheoremCase, family: TestFamily, grid: Grid, t: float,
                     _outputs=None, _cache=None) -> RatioReport:
    """Ratios ``||Op f||_target / ||f||_source`` over the family at scale ``t``."""
    cache = {} if _cache is None else _cache
    src = case.source.params(grid, t, cache)
    tgt = case.target.params(grid, t, cache)
    fields = family.sample(grid)
    if _outputs is None:
        op = make_operator(case.operator, grid)
        _outputs = [op(f) for f in fields]
    specs, sn, tn, ratios, notes = [], [], [], [], []
    for spec, f, g in zip(family.specs, fields, _outputs):
        a = amalgam_norm(f, src)
        if a == 0:
            notes.append(f"{spec.text()}: zero source norm, skipped")
            continue
        b = _target_norm(case, g, tgt)
        specs.append(spec.text())
        sn.append(a)
        tn.append(b)
        ratios.append(b / a)
    if not ratios:
        raise ParameterError("every family member has zero norm")
    k = int(np.argmax(ratios))
    echo = {"operator": case.operator, "norm": case.norm_selector, "source": case.source.describe(),
            "target": case.target.describe(), "grid": [grid.dim, grid.L, grid.N], "t": src.t}
    return RatioReport(case.suite_id, src.t, specs, sn, tn, ratios, ratios[k], specs[k], echo, notes)


@dataclass
class SweepReport:
    theorem_id: str
    t_values: list
    max_ratios: list
    spread: float
    reports: list = field(default_factory=list)

    def to_dict(self):
        return {"theorem_id": self.theorem_id, "t_values": self.t_values,
                "max_ratios": self.max_ratios, "spread": self.spread}


def parse_t_grid(text: str, grid: Grid) -> list:
    """``a:b:dyadic`` (powers of two from a to b), ``a:b:n`` (n geometric points) or a comma list.

    Values outside ``[h, L/2]`` are dropped.
    """
    parts = text.split(":")
    if len(parts) == 3:
        a, b = float(parts[0]), float(parts[1])
        if not 0 < a <= b:
            raise ParameterError(f"bad t range {text!r}")
        if parts[2] == "dyadic":
            vals, t = [], a
            while t <= b * (1 + 1e-12):
                vals.append(t)
                t *= 2
        else:
            vals = list(np.geomspace(a, b, int(parts[2])))
    else:
        vals = [float(x) for x in text.split(",") if x.strip()]
    lo, hi = grid.h * (1 - 1e-12), grid.L / 2 * (1 + 1e-12)
    kept = sorted(set(v for v in vals if lo <= v <= hi))
    if not kept:
        raise ParameterError(f"no t value of {text!r} lies in [h, L/2] = [{grid.h:g}, {grid.L / 2:g}]")
    return kept


def sweep_t(case: TheoremCase, family: TestFamily, grid: Grid, t_grid) -> SweepReport:
    """Family max ratio at each ``t``; ``spread`` is max/min over ``t``."""
    t_grid = [float(t) for t in t_grid]
    if not t_grid:
        raise ParameterError("empty t grid")
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ParameterError("t values must be strictly increasing")
    op = make_operator(case.operator, grid)
    outputs = [op(f) for f in family.sample(grid)]
    cache = {}
    reports = [op_norm_estimate(case, family, grid, t, outputs, cache) for t in t_grid]
    maxes = [r.max_ratio for r in reports]
    return SweepReport(case.suite_id, t_grid, maxes, max(maxes) / min(maxes), reports)


def reports_to_csv(reports, argmax_only=False) -> str:
    """CSV in ``CSV_COLUMNS`` order, one row per family member, or with
    ``argmax_only`` just the maximizing member of each report (one row per ``t``)."""
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    wr.writeheader()
    for r in reports:
        rows = list(r.rows())
        if argmax_only:
            rows = [rows[r.specs.index(r.argmax_spec)]]
        for row in rows:
            wr.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


# -- dilation comparability ------------------------------------------------

@dataclass
class ScalingReport:
    alphas: list
    ratios: list
    normalized: list
    K: float

    def to_dict(self):
        return asdict(self)


def scaling_check(f: SampledField, params: SpaceParams, alphas) -> ScalingReport:
    """``||f||_(alpha t) / ||f||_t`` and that ratio over ``alpha^(n p)``.

    ``K`` is the smallest constant with ``1/K <= ratio <= K alpha^(n p)`` for
    every alpha.
    """
    grid = params.grid
    base = amalgam_norm(f, params)
    if base == 0:
        raise ParameterError("zero function has no scaling ratio")
    ratios, normed = [], []
    for a in alphas:
        at = a * params.t
        if at < grid.h * (1 - 1e-12) or at > grid.L / 2 * (1 + 1e-12):
            raise ParameterError(f"alpha*t = {at} outside [h, L/2]")
        r = 1.0 if a == 1 else amalgam_norm(f, params.with_t(at)) / base
        ratios.append(r)
        normed.append(r / a ** (grid.dim * params.p))
    K = max(max(normed), 1.0 / min(ratios), 1.0)
    return ScalingReport(list(alphas), ratios, normed, K)


# -- pointwise maximal split -----------------------------------------------

@dataclass
class MaximalCheckReport:
    pairs_checked: int
    violations_small: int
    violations_large: int
    worst_slack_small: float
    worst_slack_large: float

    @property
    def violations(self):
        return self.violations_small + self.violations_large

    def to_dict(self):
        d = asdict(self)
        d["violations"] = self.violations
        return d


def pointwise_maximal_check(f: SampledField, t: float, ladder=None) -> MaximalCheckReport:
    """Check the two-scale split of ``M f`` at every grid ``x`` and ``y`` in ``B(x, t)``.

    Small radii ``tau <= t``: the ``B(y, tau)`` average of ``|f|`` is at most
    ``M(f chi_{B(x,2t)})(y)``. Large radii ``tau > t``: it is at most
    ``2^n Mbar(u_t)(x) + 1e-9`` with ``u_t`` the ``t``-ball average of ``|f|``
    and ``Mbar`` uncentered over all grid balls with ladder radii. Slack is
    right side minus left side.
    """
    grid = f.grid
    if ladder is None:
        ladder = dyadic_ladder(grid, r_max=grid.L)
    if t < grid.h or 2 * t > 2 * grid.L:
        raise ParameterError("t and 2t must be admissible radii")
    radii = np.asarray(ladder.radii)
    small, large = radii[radii <= t * (1 + 1e-12)], radii[radii > t * (1 + 1e-12)]
    absf = np.abs(f.values)
    n = grid.dim
    counts = np.array([lattice_count(n, r, grid.h) for r in radii], float)
    avgs = ball_sums(absf, grid, radii) / counts.reshape((-1,) + (1,) * n)
    avgs = avgs.reshape(len(radii), -1)
    pts = grid.points()
    ut = ball_sums(absf, grid, [t])[0] / lattice_count(n, t, grid.h)
    fam_ladder = dyadic_ladder(grid, r_max=2 * grid.L)
    mbar = maximal_uncentered(SampledField(grid, ut), ball_family(grid, fam_ladder)).values.ravel()
    small_avg = avgs[: len(small)].max(axis=0) if len(small) else np.zeros(len(pts))
    large_avg = avgs[len(small):].max(axis=0) if len(large) else np.zeros(len(pts))
    small_ladder = type(ladder)(tuple(small)) if len(small) else None
    pairs = vs = vl = 0
    ws = wl = math.inf
    for i, x in enumerate(pts):
        d2 = np.sum((pts - x) ** 2, axis=1)
        ys = np.nonzero(d2 < t * t * (1 - 1e-12))[0]
        pairs += len(ys)
        if small_ladder is not None:
            mask = (d2 < 4 * t * t * (1 - 1e-12)).reshape(grid.shape)
            local = maximal_centered(SampledField(grid, f.values * mask), small_ladder).values.ravel()
            slack = local[ys] - small_avg[ys]
            vs += int(np.sum(slack < 0))
            ws = min(ws, float(slack.min()))
        if len(large):
            slack = 2 ** n * mbar[i] + 1e-9 - large_avg[ys]
            vl += int(np.sum(slack < 0))
            wl = min(wl, float(slack.min()))
    return MaximalCheckReport(pairs, vs, vl, 0.0 if ws == math.inf else ws, 0.0 if wl == math.inf else wl)


# -- weight identities -----------------------------------------------------

@dataclass
class IdentityReport:
    balls: int
    max_duality_error: float
    max_power_error: float
    evidence: list
    notes: list

    def passed(self, tol=1e-10):
        return self.max_duality_error <= tol and self.max_power_error <= tol

    def to_dict(self):
        return asdict(self)


PROPOSITION_NOTE = (
    "A_(p,q) power identity is checked at index 1 + q/p' = q(n-alpha)/n; "
    "the stated index p(n-alpha)/n differs and can fall below 1"
)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def weight_identity_suite(w_specs, p_list, q_list, family, grid=None, stability=False) -> IdentityReport:
    """Per-ball duality and A_(p,q) power identities on every family ball.

    ``q_list`` pairs index-wise with ``p_list`` as ``(p, q)`` for the power
    identity. With ``stability`` the estimated ``[w^q]_{A_(1+q/p')}`` is also
    recomputed on a doubled grid as refinement evidence.
    """
    grid = family.grid if grid is None else grid
    dual_err = power_err = 0.0
    evidence = []
    balls = list(family)
    for spec in w_specs:
        w = make_weight(spec, grid)
        for p in p_list:
            wd = dual_weight(w, p)
            pc = conjugate(p)
            for b in balls:
                dual_err = max(dual_err, _rel(ap_quantity(wd, b, pc), ap_quantity(w, b, p) ** (pc - 1)))
        for p, q in zip(p_list, q_list):
            s = 1 + q / conjugate(p)
            wq = w.power(q)
            for b in balls:
                power_err = max(power_err, _rel(apq_quantity(w, b, p, q) ** q, ap_quantity(wq, b, s)))
            if stability:
                est = [ap_constant(make_weight(spec, g).power(q), s, ball_family(g)).constant_estimate
                       for g in (grid, make_grid(grid.dim, grid.L, 2 * grid.N))]
                evidence.append({"w": spec, "p": p, "q": q, "index": s, "estimates": est,
                                 "change": _rel(est[0], est[1])})
    return IdentityReport(len(balls), dual_err, power_err, evidence, [PROPOSITION_NOTE])


# -- fixtures --------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    suite_id: str
    config_hash: str
    value: float
    date: str

    def line(self):
        return f"{self.suite_id} {self.config_hash} {self.value!r} {self.date}"


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def sweep_config(case: TheoremCase, family: TestFamily, grid: Grid, t_grid) -> dict:
    return {"case": case.suite_id, "operator": case.operator, "source": case.source.describe(),
            "target": case.target.describe(), "family": [s.text() for s in family.specs],
            "grid": [grid.dim, grid.L, grid.N], "t": [float(t) for t in t_grid]}


def default_fixture_path():
    return resources.files("amalgam") / "data" / "fixtures.txt"


def read_fixtures(path=None) -> dict:
    """Fixtures keyed by suite id. Lines starting with ``#`` are comments."""
    path = default_fixture_path() if path is None else path
    out = {}
    with open(path) as fh:
        for k, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ParameterError(f"{path}:{k}: expected 'suite hash value date'")
            out[parts[0]] = Fixture(parts[0], parts[1], float(parts[2]), parts[3])
    return out


def write_fixtures(fixtures: dict, path, header=None):
    with open(path, "w") as fh:
        if header:
            for h in header:
                fh.write(f"# {h}\n")
        for key in sorted(fixtures):
            fh.write(fixtures[key].line() + "\n")


def pin(suite_id, config, value, date=None) -> Fixture:
    date = date or _dt.date.today().isoformat()
    return Fixture(suite_id, config_hash(config), float(value), date)
