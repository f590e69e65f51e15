"""Muckenhoupt-type weight quantities on sampled weights.

Suprema over "all balls" become maxima over a finite :class:`BallFamily`, so
every constant reported here is a lower bound for the true one. Averages
over a ball are means of the padded samples it contains; essential sup/inf
over a ball is the max/min over those samples.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import (
    DegenerateBallError, Grid, ParameterError, RadiusLadder, WeightField,
    ball_measure, ball_offsets, dyadic_ladder, make_weight, radius_cells,
)

__all__ = [
    "WeightField", "make_weight", "Ball", "BallFamily", "ball_family", "ApReport",
    "ap_quantity", "ap_constant", "a1_constant", "apq_quantity", "apq_constant",
    "dual_weight", "conjugate", "doubling_constant", "DensityReport", "density_check",
]


def conjugate(p: float) -> float:
    """Hölder conjugate; 1 <-> inf."""
    if p == 1:
        return np.inf
    if p == np.inf:
        return 1.0
    if p <= 1:
        raise ParameterError(f"exponent must be >= 1, got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float


@dataclass(frozen=True)
class BallFamily:
    """Grid-centered balls: every center in ``center_index`` times every ladder radius.

    Family order is center-major, radius-minor.
    """

    grid: Grid
    center_index: np.ndarray
    ladder: RadiusLadder

    def __post_init__(self):
        if len(self.center_index) == 0:
            raise ParameterError("ball family is empty")
        self.ladder.check(self.grid)

    @property
    def centers(self) -> np.ndarray:
        ax = self.grid.axis
        return ax[self.center_index]

    def __len__(self):
        return len(self.center_index) * len(self.ladder)

    def ball(self, k) -> Ball:
        c, r = divmod(k, len(self.ladder))
        return Ball(tuple(float(x) for x in self.centers[c]), self.ladder.radii[r])

    def __iter__(self):
        return (self.ball(k) for k in range(len(self)))


def ball_family(grid: Grid, ladder: RadiusLadder = None, stride=1, within=None) -> BallFamily:
    """Balls centered at every ``stride``-th grid point (optionally with ``|x|_inf <= within``)."""
    ladder = dyadic_ladder(grid) if ladder is None else ladder
    idx = grid.indices()
    keep = np.all(idx % stride == (stride // 2), axis=1) if stride > 1 else np.ones(len(idx), bool)
    if within is not None:
        pts = grid.axis[idx]
        keep &= np.all(np.abs(pts) <= within, axis=1)
    return BallFamily(grid, idx[keep], ladder)


@dataclass
class ApReport:
    constant_estimate: float
    argmax_ball: Ball
    family_size: int

    def to_dict(self):
        return {
            "constant": self.constant_estimate,
            "center": list(self.argmax_ball.center),
            "radius": self.argmax_ball.radius,
            "family_size": self.family_size,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _ball_samples(w: WeightField, ball) -> np.ndarray:
    center, r = (ball.center, ball.radius) if isinstance(ball, Ball) else ball
    grid = w.grid
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if r < grid.h * (1 - 1e-12):
        raise ParameterError(f"radius {r} below grid spacing")
    d2 = sum((c - m) ** 2 for c, m in zip(grid.coords(padded=True), center))
    vals = w.padded[d2 < r * r * (1 - 1e-12)]
    if vals.size == 0:
        raise DegenerateBallError(f"no sample in B({tuple(center)}, {r})")
    return vals


def ap_quantity(w: WeightField, ball, p: float) -> float:
    """``(avg_B w) * (avg_B w^(1/(1-p)))^(p-1)``."""
    if not p > 1:
        raise ParameterError(f"A_p needs p > 1, got {p}")
    s = _ball_samples(w, ball)
    return float(np.mean(s) * np.mean(s ** (1.0 / (1.0 - p))) ** (p - 1.0))


def apq_quantity(w: WeightField, ball, p: float, q: float) -> float:
    """``(avg_B w^q)^(1/q) * (avg_B w^(-p'))^(1/p')``; for p = 1 the second factor is ``max_B 1/w``."""
    _check_pq(p, q)
    s = _ball_samples(w, ball)
    first = np.mean(s ** q) ** (1.0 / q)
    if p == 1:
        return float(first * np.max(1.0 / s))
    pc = conjugate(p)
    return float(first * np.mean(s ** (-pc)) ** (1.0 / pc))


def _check_pq(p, q):
    if not p >= 1 or not q > 1:
        raise ParameterError(f"A_(p,q) needs p >= 1 and q > 1, got p={p}, q={q}")


def _family_sums(fields, family: BallFamily):
    """Ball sums of each padded field over every family ball, shape (fields, centers, radii)."""
    grid = family.grid
    rcs = [radius_cells(r, grid.h) for r in family.ladder]
    off, d2 = ball_offsets(grid.dim, max(rcs))
    stops = [int(np.searchsorted(d2, rc * rc, side="left")) for rc in rcs]
    centers = family.center_index + grid.pad
    out = [kernels.stencil_cumsum(f, off, stops, centers).T for f in fields]
    return out, off, stops, centers


def _report(q, family):
    k = int(np.argmax(q.ravel()))
    return ApReport(float(q.ravel()[k]), family.ball(k), len(family))


def ap_constant(w: WeightField, p: float, family: BallFamily) -> ApReport:
    """Largest :func:`ap_quantity` over the family (a lower bound for ``[w]_{A_p}``)."""
    if not p > 1:
        raise ParameterError(f"A_p needs p > 1, got {p}")
    (s1, s2, cnt), *_ = _family_sums([w.padded, w.padded ** (1.0 / (1.0 - p)), np.ones_like(w.padded)], family)
    q = (s1 / cnt) * (s2 / cnt) ** (p - 1.0)
    return _report(q, family)


def apq_constant(w: WeightField, p: float, q: float, family: BallFamily) -> ApReport:
    _check_pq(p, q)
    P = w.padded
    if p == 1:
        (s1, cnt), off, stops, centers = _family_sums([P ** q, np.ones_like(P)], family)
        inv = 1.0 / P
        second = np.empty_like(s1)
        for r, stop in enumerate(stops):
            second[:, r] = kernels.stencil_max(inv, off[:stop], centers)
        vals = (s1 / cnt) ** (1.0 / q) * second
    else:
        pc = conjugate(p)
        (s1, s2, cnt), *_ = _family_sums([P ** q, P ** (-pc), np.ones_like(P)], family)
        vals = (s1 / cnt) ** (1.0 / q) * (s2 / cnt) ** (1.0 / pc)
    return _report(vals, family)


def a1_constant(w: WeightField, ladder: RadiusLadder) -> float:
    """``max_x M(w)(x) / w(x)`` over cube samples, the sup in M restricted to the ladder."""
    grid = w.grid
    ladder.check(grid)
    rcs = [radius_cells(r, grid.h) for r in ladder]
    off, d2 = ball_offsets(grid.dim, max(rcs))
    stops = [int(np.searchsorted(d2, rc * rc, side="left")) for rc in rcs]
    centers = grid.indices() + grid.pad
    sums = kernels.stencil_cumsum(w.padded, off, stops, centers)
    counts = np.asarray(stops, dtype=float)[:, None]
    mw = np.max(sums / counts, axis=0)
    return float(np.max(mw / w.values.ravel()))


def dual_weight(w: WeightField, p: float) -> WeightField:
    """``w^(1-p')``."""
    if not p > 1:
        raise ParameterError(f"dual weight needs p > 1, got {p}")
    return w.power(1.0 - conjugate(p))


def doubling_constant(w: WeightField, family: BallFamily) -> float:
    """``max w(2B)/w(B)`` over family balls whose double stays in the cube."""
    grid = w.grid
    best = None
    for c, center in zip(family.center_index, family.centers):
        for r in family.ladder:
            if np.any(np.abs(center) + 2 * r > grid.L * (1 + 1e-12)):
                continue
            ratio = ball_measure(w, center, 2 * r) / ball_measure(w, center, r)
            best = ratio if best is None else max(best, ratio)
    if best is None:
        raise ParameterError("no family ball has its double inside the cube")
    return float(best)


@dataclass
class DensityReport:
    pairs: list
    C: float
    delta: float


def density_check(w: WeightField, ball, fractions) -> DensityReport:
    """Measure pairs ``(|E|/|B|, w(E)/w(B))`` for concentric ``E = B(c, f r)``, and fit ``C, delta``.

    The fit is least squares of ``log w(E)/w(B)`` against ``log |E|/|B|``.
    """
    center, r = (ball.center, ball.radius) if isinstance(ball, Ball) else ball
    ones = make_weight("1", w.grid)
    wb, lb = ball_measure(w, center, r), ball_measure(ones, center, r)
    pairs = []
    for f in fractions:
        if not 0 < f <= 1:
            raise ParameterError(f"sub-radius fraction must lie in (0, 1], got {f}")
        if f == 1:
            pairs.append((1.0, 1.0))
            continue
        pairs.append((ball_measure(ones, center, f * r) / lb, ball_measure(w, center, f * r) / wb))
    x = np.log([a for a, _ in pairs])
    y = np.log([b for _, b in pairs])
    if len(pairs) > 1 and np.ptp(x) > 0:
        delta, logc = np.polyfit(x, y, 1)
    else:
        delta, logc = np.nan, np.nan
    return DensityReport(pairs, float(np.exp(logc)), float(delta))
