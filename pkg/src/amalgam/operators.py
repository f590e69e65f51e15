"""Discrete versions of the maximal, singular, fractional and square-function operators.

All operators act on a :class:`~amalgam.grid.SampledField` (zero outside the
cube) and return one on the same grid. Every ``sup`` over radii, frequencies
or test bumps runs over a finite ladder or dictionary, so maximal outputs are
lower bounds for their continuum counterparts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import gamma as gamma_fn

from . import kernels
from .grid import (
    Grid, ParameterError, RadiusLadder, SampledField, ball_offsets, ball_sums,
    dyadic_ladder, lattice_count, radius_cells,
)
from .weights import BallFamily

__all__ = [
    "maximal_centered", "maximal_uncentered", "hardy_op", "cz_apply", "SphereFunction",
    "sphere_function", "rough_singular", "marcinkiewicz", "riesz_gamma", "riesz_potential",
    "MultiplierSpec", "bochner_riesz", "bochner_riesz_maximal", "Profile", "mexican_hat",
    "g_function", "BumpDictionary", "bump_dictionary", "ConeDiscretization", "cone",
    "intrinsic_square", "log_weights", "dyadic_levels", "make_operator", "Operator",
]


def _field(grid, values):
    return SampledField(grid, np.asarray(values).reshape(grid.shape))


def _all_offsets(grid: Grid):
    """Every lattice offset that connects two cube samples, nearest first."""
    off, d2 = ball_offsets(grid.dim, math.sqrt(grid.dim) * grid.N, closed=True)
    keep = np.all(np.abs(off) < grid.N, axis=1)
    return np.ascontiguousarray(off[keep]), d2[keep]


def _convolve(f: SampledField, off, coeffs, stops=None):
    if stops is None:
        stops = [len(off)]
    return kernels.stencil_cumsum(f.values, off, stops, f.grid.indices(), coeffs)


# -- maximal functions -----------------------------------------------------

def maximal_centered(f: SampledField, ladder: RadiusLadder) -> SampledField:
    """``max_r |B(x,r)|^-1 integral_{B(x,r)} |f|`` over the ladder radii."""
    grid = f.grid
    ladder.check(grid)
    sums = ball_sums(np.abs(f.values), grid, ladder.radii)
    counts = np.array([lattice_count(grid.dim, r, grid.h) for r in ladder], dtype=float)
    avg = sums / counts.reshape((-1,) + (1,) * grid.dim)
    return SampledField(grid, np.max(avg, axis=0))


def maximal_uncentered(f: SampledField, family: BallFamily) -> SampledField:
    """``max`` of ``|f|``-averages over the family balls that contain ``x``."""
    grid = f.grid
    if family.grid != grid:
        raise ParameterError("family and field live on different grids")
    best = np.full(grid.N ** grid.dim, -np.inf)
    absf = np.abs(f.values)
    all_idx = grid.indices()
    for r in family.ladder:
        rc = radius_cells(r, grid.h)
        off, _ = ball_offsets(grid.dim, rc)
        sums = kernels.stencil_cumsum(absf, off, [len(off)], family.center_index)[0]
        avg = np.full(grid.shape, -np.inf)
        avg[tuple(family.center_index.T)] = sums / len(off)
        best = np.maximum(best, kernels.stencil_max(avg, off, all_idx))
    if not np.all(np.isfinite(best)):
        raise ParameterError("ball family does not cover every grid point")
    return _field(grid, best)


def hardy_op(f: SampledField) -> SampledField:
    """``|x|^-n integral_{|y| <= |x|} |f|``; samples on the sphere ``|y| = |x|`` count half."""
    grid = f.grid
    # squared radii in units of (h/2)^2 are exact integers on the midpoint lattice
    odd = 2 * grid.indices() - (grid.N - 1)
    r2 = np.sum(odd * odd, axis=1)
    a = np.abs(f.values).ravel()
    order = np.argsort(r2, kind="stable")
    r2s, cum = r2[order], np.concatenate([[0.0], np.cumsum(a[order])])
    lo = np.searchsorted(r2s, r2, side="left")
    hi = np.searchsorted(r2s, r2, side="right")
    inside = cum[lo] + 0.5 * (cum[hi] - cum[lo])
    radius = np.sqrt(r2) * grid.h / 2
    return _field(grid, inside * grid.cell / radius ** grid.dim)


# -- singular integrals ----------------------------------------------------

def _truncated(grid, eps):
    if eps < grid.h * (1 - 1e-12):
        raise ParameterError(f"truncation radius {eps} below grid spacing {grid.h}")
    off, d2 = _all_offsets(grid)
    ec = radius_cells(eps, grid.h)
    keep = d2 > ec * ec
    return off[keep], d2[keep]


def cz_apply(f: SampledField, kernel: str = "hilbert", eps: Optional[float] = None) -> SampledField:
    """Truncated convolution ``sum_{|x-y| > eps} K(x-y) f(y) h^n``.

    ``hilbert`` (dim 1) is ``1/(pi x)``; ``riesz1``/``riesz2`` (dim 2) are
    ``x_j / (2 pi |x|^3)``.
    """
    grid = f.grid
    eps = grid.h if eps is None else eps
    off, d2 = _truncated(grid, eps)
    y = -off * grid.h  # f(x + e h) = f(x - y)
    if kernel == "hilbert":
        if grid.dim != 1:
            raise ParameterError("hilbert kernel needs dim 1")
        K = 1.0 / (math.pi * y[:, 0])
    elif kernel in ("riesz1", "riesz2"):
        if grid.dim != 2:
            raise ParameterError(f"{kernel} kernel needs dim 2")
        j = int(kernel[-1]) - 1
        K = y[:, j] / (2.0 * math.pi * (np.sqrt(d2) * grid.h) ** 3)
    else:
        raise ParameterError(f"unknown kernel {kernel!r}")
    return _field(grid, _convolve(f, off, K * grid.cell)[0])


@dataclass(frozen=True)
class SphereFunction:
    """Mean-zero function on the unit sphere sampled at equispaced nodes.

    dim 1: ``samples = (Omega(+1), Omega(-1))``; dim 2: ``samples[k] = Omega(2 pi k / M)``.
    """

    dim: int
    samples: np.ndarray
    mean_zero_enforced: bool = True

    def __call__(self, y: np.ndarray) -> np.ndarray:
        """Evaluate at the directions of the nonzero vectors ``y`` (shape ``(K, dim)``)."""
        if self.dim == 1:
            return np.where(y[:, 0] > 0, self.samples[0], self.samples[1])
        M = len(self.samples)
        theta = np.arctan2(y[:, 1], y[:, 0])
        k = np.rint(theta / (2 * math.pi / M)).astype(int) % M
        return self.samples[k]


def sphere_function(dim: int, spec="sgn", M: int = 64) -> SphereFunction:
    """Build Omega from ``sgn``, ``cos[:k]``, ``sin[:k]``, ``rough:seed`` or explicit samples."""
    if dim == 1:
        nodes = np.array([0.0, math.pi])
    else:
        nodes = 2 * math.pi * np.arange(M) / M
    if callable(spec):
        vals = np.asarray(spec(nodes), dtype=float)
    elif isinstance(spec, str):
        name, _, arg = spec.partition(":")
        if name == "sgn":
            vals = np.cos(nodes) if dim == 1 else np.sign(np.cos(nodes))
        elif name in ("cos", "sin"):
            k = int(arg) if arg else 1
            vals = getattr(np, name)(k * nodes)
        elif name == "rough":
            vals = np.random.default_rng(int(arg or 0)).uniform(-1, 1, len(nodes))
        else:
            raise ParameterError(f"unknown sphere function {spec!r}")
    else:
        vals = np.asarray(spec, dtype=float)
    if vals.shape != nodes.shape:
        raise ParameterError(f"expected {len(nodes)} sphere samples")
    vals = vals - np.mean(vals)
    vals[np.abs(vals) < 1e-15] = 0.0
    return SphereFunction(dim, vals)


def rough_singular(f: SampledField, omega: SphereFunction, eps: Optional[float] = None) -> SampledField:
    """``sum_{|y| > eps} Omega(y') |y|^-n f(x - y) h^n``."""
    grid = f.grid
    if omega.dim != grid.dim:
        raise ParameterError("sphere function dimension does not match grid")
    eps = grid.h if eps is None else eps
    off, d2 = _truncated(grid, eps)
    y = -off * grid.h
    K = omega(y) / (np.sqrt(d2) * grid.h) ** grid.dim
    return _field(grid, _convolve(f, off, K * grid.cell)[0])


def dyadic_levels(grid: Grid, t_min=None, t_max=None) -> np.ndarray:
    return np.asarray(dyadic_ladder(grid, t_min, t_max).radii)


def log_weights(levels) -> np.ndarray:
    """Midpoint-rule cell widths in ``log t`` for increasing ``levels``."""
    u = np.log(np.asarray(levels, dtype=float))
    if u.size == 1:
        return np.array([math.log(2.0)])
    edges = np.concatenate([[u[0] - (u[1] - u[0]) / 2], (u[1:] + u[:-1]) / 2, [u[-1] + (u[-1] - u[-2]) / 2]])
    return np.diff(edges)


def marcinkiewicz(f: SampledField, omega: SphereFunction, t_levels) -> SampledField:
    """``(integral_0^inf |F_t|^2 dt/t^3)^(1/2)`` with
    ``F_t(x) = sum_{h <= |x-y| <= t} Omega((x-y)') |x-y|^(1-n) f(y) h^n``.

    The ``t`` integral is the midpoint rule in ``log t`` over ``t_levels``;
    above the last cell ``F_t`` is frozen at its top-level value and the
    remaining ``integral dt/t^3`` is added exactly.
    """
    grid = f.grid
    levels = np.asarray(t_levels, dtype=float)
    if levels.size == 0:
        raise ParameterError("no t levels")
    if np.any(np.diff(levels) <= 0) or levels[0] < grid.h * (1 - 1e-12):
        raise ParameterError("t levels must increase and start at or above h")
    rcs = [radius_cells(t, grid.h) for t in levels]
    off, d2 = ball_offsets(grid.dim, max(rcs), closed=True)
    off, d2 = off[1:], d2[1:]  # drop the singular self offset
    stops = [int(np.searchsorted(d2, rc * rc, side="right")) for rc in rcs]
    x_minus_y = -off * grid.h
    K = omega(x_minus_y) * (np.sqrt(d2) * grid.h) ** (1 - grid.dim) * grid.cell
    F = _convolve(f, off, K, stops)
    wts = log_weights(levels) / levels ** 2
    top = levels[-1] * math.exp(log_weights(levels)[-1] / 2)
    total = np.sum(F ** 2 * wts[:, None], axis=0) + F[-1] ** 2 / (2 * top ** 2)
    return _field(grid, np.sqrt(total))


def riesz_gamma(alpha: float, n: int) -> float:
    return math.pi ** (n / 2) * 2 ** alpha * gamma_fn(alpha / 2) / gamma_fn((n - alpha) / 2)


def _square_self_integral(alpha, h):
    """``integral`` of ``|u|^(alpha-2)`` over the square ``[-h/2, h/2]^2``."""
    ang, _ = sp_integrate.quad(lambda th: math.cos(th) ** (-alpha), 0.0, math.pi / 4)
    return 8.0 / alpha * (h / 2) ** alpha * ang


def riesz_potential(f: SampledField, alpha: float) -> SampledField:
    """``gamma(alpha)^-1 integral f(xi) |x - xi|^(alpha-n) dxi``.

    dim 1 integrates the kernel exactly over every cell (f piecewise
    constant per cell); dim 2 uses the exact self-cell integral and the
    midpoint rule elsewhere.
    """
    grid = f.grid
    n = grid.dim
    if not 0 < alpha < n:
        raise ParameterError(f"alpha must lie in (0, {n}), got {alpha}")
    off, d2 = _all_offsets(grid)
    h = grid.h
    if n == 1:
        e = np.abs(off[:, 0]).astype(float)
        hi = (e + 0.5) ** alpha
        lo = np.where(e > 0, np.abs(e - 0.5) ** alpha, -(0.5 ** alpha))
        coeffs = (hi - lo) * h ** alpha / alpha
    else:
        coeffs = np.empty(len(off))
        coeffs[0] = _square_self_integral(alpha, h)
        coeffs[1:] = (np.sqrt(d2[1:]) * h) ** (alpha - n) * grid.cell
    return _field(grid, _convolve(f, off, coeffs / riesz_gamma(alpha, n))[0])


# -- Fourier multipliers ---------------------------------------------------

@dataclass(frozen=True)
class MultiplierSpec:
    delta: float
    R: float

    def __post_init__(self):
        if not self.delta >= 0 or not self.R > 0:
            raise ParameterError("Bochner-Riesz needs delta >= 0 and R > 0")


def _frequencies(grid):
    xi = 2 * math.pi * np.fft.fftfreq(grid.N, d=grid.h)
    if grid.dim == 1:
        return xi ** 2
    a, b = np.meshgrid(xi, xi, indexing="ij")
    return a ** 2 + b ** 2


def bochner_riesz(f: SampledField, spec: MultiplierSpec) -> SampledField:
    """Apply ``(1 - |xi|^2/R^2)_+^delta`` to the periodized DFT (frequencies ``pi k / L``)."""
    s = _frequencies(f.grid) / spec.R ** 2
    m = np.where(s < 1, np.abs(1 - s) ** spec.delta, 0.0)
    return SampledField(f.grid, np.real(np.fft.ifftn(np.fft.fftn(f.values) * m)))


def bochner_riesz_maximal(f: SampledField, delta: float, R_ladder: Sequence[float]) -> SampledField:
    fhat = np.fft.fftn(f.values)
    s2 = _frequencies(f.grid)
    out = np.zeros(f.grid.shape)
    for R in R_ladder:
        spec = MultiplierSpec(delta, R)
        s = s2 / spec.R ** 2
        m = np.where(s < 1, np.abs(1 - s) ** delta, 0.0)
        out = np.maximum(out, np.abs(np.real(np.fft.ifftn(fhat * m))))
    return SampledField(f.grid, out)


# -- square functions ------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Radial-or-not test profile ``phi`` with a nonnegative envelope used for
    the per-level mean correction. ``reach`` bounds the support (or the
    effective support) in units of the scale ``t``."""

    name: str
    phi: Callable
    envelope: Callable
    reach: float

    def stencil(self, grid: Grid, t: float):
        """Offsets and mean-zero coefficients of ``phi_t(x - y) h^n`` for ``y = x + e h``."""
        rc = min(self.reach * t / grid.h, math.sqrt(grid.dim) * grid.N)
        off, _ = ball_offsets(grid.dim, rc, closed=True)
        u = -off * grid.h / t
        c = self.phi(u)
        env = self.envelope(u)
        if np.sum(env) > 0:
            c = c - env * (np.sum(c) / np.sum(env))
        return off, c * grid.cell / t ** grid.dim


def _r2(u):
    return np.sum(u * u, axis=1)


def mexican_hat(dim: int) -> Profile:
    """``(n - |x|^2) exp(-|x|^2/2) / (2 pi)^(n/2)``: mean zero, Gaussian decay."""
    norm = (2 * math.pi) ** (dim / 2)
    return Profile(
        "mexican_hat",
        lambda u: (dim - _r2(u)) * np.exp(-_r2(u) / 2) / norm,
        lambda u: np.exp(-_r2(u) / 2),
        reach=9.0,
    )


def _check_mean_zero(profile: Profile, dim: int, tol=1e-8):
    ax = np.linspace(-profile.reach, profile.reach, 2001 if dim == 1 else 301)
    h = ax[1] - ax[0]
    pts = ax.reshape(-1, 1) if dim == 1 else np.stack([g.ravel() for g in np.meshgrid(ax, ax)], 1)
    vals = profile.phi(pts)
    if abs(np.sum(vals)) * h ** dim > tol * max(1.0, np.sum(np.abs(vals)) * h ** dim):
        raise ParameterError(f"profile {profile.name} does not have mean zero")


def g_function(f: SampledField, phi: Optional[Profile] = None, t_levels=None) -> SampledField:
    """``(integral_0^inf |phi_t * f|^2 dt/t)^(1/2)``, midpoint rule in ``log t``."""
    grid = f.grid
    phi = mexican_hat(grid.dim) if phi is None else phi
    _check_mean_zero(phi, grid.dim)
    levels = dyadic_levels(grid) if t_levels is None else np.asarray(t_levels, dtype=float)
    if levels.size == 0:
        raise ParameterError("no t levels")
    total = np.zeros(grid.N ** grid.dim)
    for t, wt in zip(levels, log_weights(levels)):
        off, c = phi.stencil(grid, t)
        total += wt * _convolve(f, off, c)[0] ** 2
    return _field(grid, np.sqrt(total))


@dataclass
class BumpDictionary:
    """Finite stand-in for the family of unit-ball-supported, mean-zero,
    ``alpha``-Hölder bumps with seminorm at most 1."""

    alpha: float
    profiles: list
    reference_axis: np.ndarray

    def __len__(self):
        return len(self.profiles)

    def reference_values(self, k):
        dim = self.profiles[k].dim
        return self.profiles[k].evaluate(_ref_points(self.reference_axis, dim))

    def subset(self, idx):
        return BumpDictionary(self.alpha, [self.profiles[i] for i in idx], self.reference_axis)


def _ref_points(ax, dim):
    if dim == 1:
        return ax.reshape(-1, 1)
    a, b = np.meshgrid(ax, ax, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel()])


def _cutoff(u):
    return np.clip(1.0 - _r2(u), 0.0, None) ** 2


@dataclass
class _Bump:
    dim: int
    a: np.ndarray
    b: np.ndarray
    width: float
    shift: float = 0.0
    scale: float = 1.0

    def raw(self, u):
        ga = np.exp(-_r2(u - self.a) / (2 * self.width ** 2))
        gb = np.exp(-_r2(u - self.b) / (2 * self.width ** 2))
        return (ga - gb - self.shift) * _cutoff(u)

    def evaluate(self, u):
        return self.scale * self.raw(u)


def _holder_seminorm(vals, pts, alpha):
    best = 0.0
    for i in range(len(pts) - 1):
        d = np.sqrt(_r2(pts[i + 1:] - pts[i]))
        best = max(best, float(np.max(np.abs(vals[i + 1:] - vals[i]) / d ** alpha)))
    return best


def bump_dictionary(dim: int, alpha: float, K: int = 8, seed: int = 0, resolution=None) -> BumpDictionary:
    """``K`` differences of Gaussians at seeded offsets, cut off to the unit
    ball, made mean zero on the reference grid and scaled to Hölder seminorm 1
    there."""
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if K < 1:
        raise ParameterError("dictionary needs at least one profile")
    res = resolution or (201 if dim == 1 else 31)
    ax = np.linspace(-1.0, 1.0, res)
    pts = _ref_points(ax, dim)
    rng = np.random.default_rng(seed)
    profiles = []
    for _ in range(K):
        a, b = (_random_in_ball(rng, dim, 0.5) for _ in range(2))
        bump = _Bump(dim, a, b, float(rng.uniform(0.15, 0.4)))
        base = bump.raw(pts)
        bump.shift = float(np.sum(base) / np.sum(_cutoff(pts)))
        vals = bump.raw(pts)
        bump.scale = 1.0 / _holder_seminorm(vals, pts, alpha)
        profiles.append(bump)
    return BumpDictionary(alpha, profiles, ax)


def _random_in_ball(rng, dim, radius):
    while True:
        p = rng.uniform(-radius, radius, dim)
        if np.sum(p * p) < radius * radius:
            return p


@dataclass(frozen=True)
class ConeDiscretization:
    t_levels: tuple
    offsets: tuple

    @property
    def weights(self):
        return log_weights(self.t_levels)


def cone(grid: Grid, t_levels=None) -> ConeDiscretization:
    """Levels (default dyadic in ``[h, L/2]``) with the open-ball offsets ``|e| h < t``."""
    levels = dyadic_levels(grid, t_max=grid.L / 2) if t_levels is None else np.asarray(t_levels, float)
    if len(levels) == 0:
        raise ParameterError("cone has no levels")
    offs = tuple(ball_offsets(grid.dim, radius_cells(t, grid.h))[0] for t in levels)
    return ConeDiscretization(tuple(float(t) for t in levels), offs)


def _bump_profile(bump: _Bump) -> Profile:
    return Profile("bump", bump.evaluate, _cutoff, reach=1.0)


def intrinsic_square(f: SampledField, alpha: float, dictionary: BumpDictionary,
                     cone_disc: ConeDiscretization) -> SampledField:
    """``(sum_t w_t t^-n sum_{|x-y|<t} A(y,t)^2 h^n)^(1/2)`` with
    ``A(y,t) = max_phi |f * phi_t (y)|`` over the dictionary."""
    grid = f.grid
    if len(dictionary) == 0:
        raise ParameterError("empty bump dictionary")
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    total = np.zeros(grid.N ** grid.dim)
    for t, wt, off in zip(cone_disc.t_levels, cone_disc.weights, cone_disc.offsets):
        A = np.zeros(grid.N ** grid.dim)
        for bump in dictionary.profiles:
            o, c = _bump_profile(bump).stencil(grid, t)
            A = np.maximum(A, np.abs(_convolve(f, o, c)[0]))
        cone_sum = kernels.stencil_cumsum(A.reshape(grid.shape) ** 2, off, [len(off)], grid.indices())[0]
        total += wt * t ** (-grid.dim) * cone_sum * grid.cell
    return _field(grid, np.sqrt(total))


# -- operator spec grammar -------------------------------------------------

@dataclass
class Operator:
    """A configured operator: ``apply(f) -> SampledField`` plus its spec text."""

    text: str
    apply: Callable
    linear: bool = False

    def __call__(self, f):
        return self.apply(f)


def _kv(arg):
    out = {}
    for part in filter(None, (a.strip() for a in arg.split(","))):
        k, sep, v = part.partition("=")
        if not sep:
            raise ParameterError(f"expected key=value in {arg!r}")
        out[k.strip()] = v.strip()
    return out


def make_operator(text: str, grid: Grid) -> Operator:
    """Build an operator from ``M``, ``Mbar``, ``H``, ``CZ:hilbert``, ``TOmega:<sphere>``,
    ``mu:<sphere>``, ``I:alpha=a``, ``BR:delta=d,R=r``, ``BRmax:delta=d``, ``g``,
    ``S:alpha=a,K=k`` or ``id``."""
    name, _, arg = text.strip().partition(":")
    if name == "id":
        return Operator(text, lambda f: SampledField(f.grid, f.values.copy()), True)
    if name == "M":
        opts = _kv(arg)
        if opts.get("ladder", "dyadic") != "dyadic":
            raise ParameterError("only the dyadic ladder is supported")
        ladder = dyadic_ladder(grid, r_max=2 * grid.L)
        return Operator(text, lambda f: maximal_centered(f, ladder))
    if name == "Mbar":
        from .weights import ball_family
        fam = ball_family(grid, dyadic_ladder(grid, r_max=2 * grid.L))
        return Operator(text, lambda f: maximal_uncentered(f, fam))
    if name == "H":
        return Operator(text, hardy_op)
    if name == "CZ":
        kern = arg or "hilbert"
        return Operator(text, lambda f: cz_apply(f, kern), True)
    if name == "TOmega":
        om = sphere_function(grid.dim, arg or "sgn")
        return Operator(text, lambda f: rough_singular(f, om), True)
    if name == "mu":
        om = sphere_function(grid.dim, arg or "sgn")
        levels = dyadic_levels(grid)
        return Operator(text, lambda f: marcinkiewicz(f, om, levels))
    if name == "I":
        a = float(_kv(arg).get("alpha", 0.5))
        return Operator(text, lambda f: riesz_potential(f, a), True)
    if name == "BR":
        opts = _kv(arg)
        spec = MultiplierSpec(float(opts.get("delta", (grid.dim - 1) / 2)), float(opts.get("R", 8.0)))
        return Operator(text, lambda f: bochner_riesz(f, spec), True)
    if name == "BRmax":
        opts = _kv(arg)
        d = float(opts.get("delta", (grid.dim - 1) / 2))
        ladder = [2.0 ** k for k in range(-2, 1 + int(math.log2(math.pi / grid.h)))]
        return Operator(text, lambda f: bochner_riesz_maximal(f, d, ladder))
    if name == "g":
        return Operator(text, lambda f: g_function(f))
    if name == "S":
        opts = _kv(arg)
        a = float(opts.get("alpha", 1.0))
        dictionary = bump_dictionary(grid.dim, a, int(opts.get("K", 8)), int(opts.get("seed", 0)))
        cd = cone(grid)
        return Operator(text, lambda f: intrinsic_square(f, a, dictionary, cd))
    raise ParameterError(f"unknown operator {text!r}")
