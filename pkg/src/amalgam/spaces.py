"""Weighted Lebesgue and weighted amalgam norms of sampled functions.

The amalgam norm of ``f`` with parameters ``(p, q, t, w, v)`` is the outer
``L^q_v`` norm of the local field

    x -> ( w(B(x,t))^-1 * integral_{B(x,t)} |f|^p w )^(1/p),

with ``q = inf`` meaning the plain maximum of that field.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .grid import (
    ParameterError, SampledField, WeightField, ball_offsets, ball_sums,
    integrate, radius_cells,
)
from .weights import conjugate

log = logging.getLogger(__name__)

__all__ = [
    "SpaceParams", "DualParams", "LevelSet", "lp_norm", "weak_lp_norm", "level_set",
    "inner_ball_norm", "amalgam_norm", "weak_amalgam_norm", "dual_params", "holder_defect",
    "weak_candidates",
]

WEAK_SHRINK = 1.0 - 1e-9


@dataclass(frozen=True)
class SpaceParams:
    p: float
    q: float
    t: float
    w: WeightField
    v: WeightField

    def __post_init__(self):
        if not self.p > 1 or math.isinf(self.p):
            raise ParameterError(f"inner exponent must lie in (1, inf), got {self.p}")
        if not self.q >= 1:
            raise ParameterError(f"outer exponent must lie in [1, inf], got {self.q}")
        if self.w.grid != self.v.grid:
            raise ParameterError("inner and outer weights live on different grids")
        if not self.t > 0:
            raise ParameterError(f"t must be positive, got {self.t}")
        grid = self.w.grid
        lo, hi = grid.h, grid.L / 2
        if self.t < lo * (1 - 1e-12) or self.t > hi * (1 + 1e-12):
            clamped = min(max(self.t, lo), hi)
            log.warning("t=%g outside [h, L/2]; clamped to %g", self.t, clamped)
            object.__setattr__(self, "t", clamped)

    @property
    def grid(self):
        return self.w.grid

    def with_t(self, t):
        return replace(self, t=t)

    def describe(self) -> dict:
        tag = lambda u: u.closed_form.text() if u.closed_form is not None else "sampled"
        return {"p": self.p, "q": "inf" if math.isinf(self.q) else self.q, "t": self.t,
                "w": tag(self.w), "v": tag(self.v)}


@dataclass(frozen=True)
class DualParams:
    p: float
    q: float
    inner_dual: WeightField
    outer_dual: WeightField

    def space(self, t) -> SpaceParams:
        return SpaceParams(self.p, self.q, t, self.inner_dual, self.outer_dual)


@dataclass
class LevelSet:
    threshold: float
    indicator: SampledField


def level_set(f: SampledField, lam: float) -> LevelSet:
    if not lam > 0:
        raise ParameterError("level threshold must be positive")
    return LevelSet(lam, SampledField(f.grid, (np.abs(f.values) > lam).astype(float)))


def lp_norm(f: SampledField, w: WeightField = None, p: float = 2.0) -> float:
    """``(integral |f|^p w)^(1/p)``; ``p = inf`` gives ``max |f|``."""
    if not p > 0:
        raise ParameterError(f"exponent must be positive, got {p}")
    if math.isinf(p):
        return float(np.max(np.abs(f.values)))
    return integrate(SampledField(f.grid, np.abs(f.values) ** p), w) ** (1.0 / p)


def weak_candidates(f: SampledField):
    """Descending distinct positive magnitudes and, per candidate ``lam = (1-1e-9) a``,
    the number of samples with ``|f| > lam``. Also returns the sort order."""
    a = np.abs(f.values).ravel()
    order = np.argsort(-a, kind="stable")
    sorted_a = a[order]
    distinct = np.unique(sorted_a[sorted_a > 0])[::-1]
    lams = distinct * WEAK_SHRINK
    # count of entries strictly greater than lam in a descending array
    counts = np.searchsorted(-sorted_a, -lams, side="left")
    return lams, counts, order


def weak_lp_norm(f: SampledField, w: WeightField = None, p: float = 2.0) -> float:
    """``sup_lam lam * w({|f| > lam})^(1/p)`` over the sample-magnitude candidates."""
    if not 0 < p < np.inf:
        raise ParameterError(f"weak exponent must lie in (0, inf), got {p}")
    lams, counts, order = weak_candidates(f)
    if lams.size == 0:
        return 0.0
    wv = np.ones(f.values.size) if w is None else w.values.ravel()
    meas = np.concatenate([[0.0], np.cumsum(wv[order])]) * f.grid.cell
    return float(np.max(lams * meas[counts] ** (1.0 / p)))


def _den(w: WeightField, t) -> np.ndarray:
    key = radius_cells(t, w.grid.h)
    if key not in w._measure_cache:
        w._measure_cache[key] = ball_sums(w.padded, w.grid, [t], padded=True)[0]
    return w._measure_cache[key]


def _local_means(f_abs_p: np.ndarray, w: WeightField, t) -> np.ndarray:
    num = ball_sums(f_abs_p * w.values, w.grid, [t])[0]
    return num / _den(w, t)


def inner_ball_norm(f: SampledField, w: WeightField, p: float, t: float) -> SampledField:
    """Local weighted ``L^p`` averages over ``B(x, t)`` at every sample ``x``."""
    if t < f.grid.h * (1 - 1e-12):
        raise ParameterError(f"t={t} below grid spacing {f.grid.h}")
    return SampledField(f.grid, _local_means(np.abs(f.values) ** p, w, t) ** (1.0 / p))


def _outer(field: np.ndarray, v: WeightField, q: float) -> float:
    if math.isinf(q):
        return float(np.max(field))
    return float(np.sum(field ** q * v.values) * v.grid.cell) ** (1.0 / q)


def amalgam_norm(f: SampledField, params: SpaceParams) -> float:
    if f.grid != params.grid:
        raise ParameterError("field and space live on different grids")
    inner = inner_ball_norm(f, params.w, params.p, params.t)
    return _outer(inner.values, params.v, params.q)


def weak_amalgam_norm(f: SampledField, params: SpaceParams) -> float:
    """``sup_lam lam * ||chi_{|f| > lam}||`` over the sample-magnitude candidates.

    The level sets are nested, so the indicators' norms come from a single
    incremental sweep that switches samples on in decreasing ``|f|`` order.
    """
    if f.grid != params.grid:
        raise ParameterError("field and space live on different grids")
    lams, counts, order = weak_candidates(f)
    if lams.size == 0:
        return 0.0
    norms = level_norms(f.grid, order, counts, params)
    return float(np.max(lams * norms))


def level_norms(grid, order, counts, params: SpaceParams) -> np.ndarray:
    off, _ = ball_offsets(grid.dim, radius_cells(params.t, grid.h))
    idx = np.stack(np.unravel_index(order[: counts[-1]], grid.shape), axis=1)
    return kernels.level_sweep(
        params.w.values, _den(params.w, params.t), params.v.values * grid.cell,
        idx, counts, off, params.p, params.q,
    )


def dual_params(params: SpaceParams) -> DualParams:
    """Conjugate exponents with ``w^(1-p')`` inside and ``v^(1-q')`` outside.

    For ``q = 1`` the dual outer space is the unweighted sup, so the outer dual
    weight is returned as the constant 1.
    """
    pc = conjugate(params.p)
    if math.isinf(params.q):
        raise ParameterError("q = inf has no amalgam dual in this setting")
    qc = conjugate(params.q)
    inner = params.w.power(1.0 - pc)
    if math.isinf(qc):
        outer = WeightField(params.grid, np.ones_like(params.v.padded), None)
    else:
        outer = params.v.power(1.0 - qc)
    return DualParams(pc, qc, inner, outer)


def holder_defect(f: SampledField, g: SampledField, params: SpaceParams) -> float:
    """``||f|| * ||g||_dual - integral |f g|``."""
    dual = dual_params(params).space(params.t)
    return amalgam_norm(f, params) * amalgam_norm(g, dual) - integrate(abs(f * g))
