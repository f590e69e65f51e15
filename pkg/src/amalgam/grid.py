"""Uniform midpoint grids, sampled fields, and quadrature primitives.

Fields live on the cube ``[-L, L]^dim`` sampled at cell midpoints and are
treated as zero outside it. Weights additionally carry samples on a padded
grid covering ``[-3L, 3L]^dim``, so the weight measure of any ball centered
in the cube with radius up to ``2L`` is available without truncation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels

__all__ = [
    "ParameterError", "DegenerateBallError", "Grid", "make_grid", "SampledField",
    "WeightField", "FunctionSpec", "parse_spec", "sample", "make_weight",
    "RadiusLadder", "dyadic_ladder", "integrate", "ball_average", "ball_measure",
    "ball_offsets", "radius_cells", "ball_sums",
]


class ParameterError(ValueError):
    """Invalid parameters for an operation."""


class DegenerateBallError(ValueError):
    """A ball contains no grid sample."""


@dataclass(frozen=True)
class Grid:
    dim: int
    L: float
    N: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ParameterError(f"dim must be 1 or 2, got {self.dim}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ParameterError(f"half width must be positive, got {self.L}")
        if int(self.N) != self.N or self.N < 8 or self.N % 2:
            raise ParameterError(f"points per axis must be an even integer >= 8, got {self.N}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.dim

    @property
    def cell(self) -> float:
        """Cell volume ``h**dim``."""
        return self.h ** self.dim

    @property
    def pad(self) -> int:
        return self.N

    @property
    def axis(self) -> np.ndarray:
        return -self.L + (np.arange(self.N) + 0.5) * self.h

    @property
    def padded_axis(self) -> np.ndarray:
        n = self.N + 2 * self.pad
        return -self.L - self.pad * self.h + (np.arange(n) + 0.5) * self.h

    def coords(self, padded=False):
        """Tuple of coordinate arrays, one per axis, shaped like the field."""
        ax = self.padded_axis if padded else self.axis
        if self.dim == 1:
            return (ax,)
        return tuple(np.meshgrid(ax, ax, indexing="ij"))

    def points(self) -> np.ndarray:
        """All sample points, shape ``(N**dim, dim)`` in C order."""
        return np.stack([c.ravel() for c in self.coords()], axis=1)

    def indices(self) -> np.ndarray:
        """All multi-indices, shape ``(N**dim, dim)`` in C order."""
        return np.stack([i.ravel() for i in np.indices(self.shape)], axis=1)

    def nearest_index(self, point) -> tuple:
        point = np.atleast_1d(np.asarray(point, dtype=float))
        idx = np.clip(np.floor((point + self.L) / self.h), 0, self.N - 1).astype(int)
        return tuple(int(i) for i in idx)


def make_grid(dim, L, N) -> Grid:
    return Grid(int(dim), float(L), int(N) if float(N) == int(N) else N)


@dataclass
class SampledField:
    grid: Grid
    values: np.ndarray
    support_hint: Optional[tuple] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ParameterError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("field values must be finite")

    def _check(self, other):
        if isinstance(other, SampledField):
            if other.grid != self.grid:
                raise ParameterError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return SampledField(self.grid, self.values + self._check(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledField(self.grid, self.values - self._check(other))

    def __mul__(self, other):
        return SampledField(self.grid, self.values * self._check(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SampledField(self.grid, -self.values)

    def __abs__(self):
        return SampledField(self.grid, np.abs(self.values))

    def __pow__(self, e):
        return SampledField(self.grid, self.values ** e)

    def at(self, point) -> float:
        """Value at an arbitrary point by (bi)linear interpolation of the samples."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        ax = self.grid.axis
        if self.grid.dim == 1:
            return float(np.interp(point[0], ax, self.values))
        u = (point + self.grid.L) / self.grid.h - 0.5
        i = np.clip(np.floor(u).astype(int), 0, self.grid.N - 2)
        a = u - i
        v = self.values
        return float(
            (1 - a[0]) * (1 - a[1]) * v[i[0], i[1]] + a[0] * (1 - a[1]) * v[i[0] + 1, i[1]]
            + (1 - a[0]) * a[1] * v[i[0], i[1] + 1] + a[0] * a[1] * v[i[0] + 1, i[1] + 1]
        )


class WeightField(SampledField):
    """Strictly positive field with samples on the padded grid as well.

    ``closed_form`` keeps the generating spec (e.g. ``power:0.5``) when known.
    """

    def __init__(self, grid, padded, closed_form=None):
        padded = np.asarray(padded, dtype=np.float64)
        expected = (grid.N + 2 * grid.pad,) * grid.dim
        if padded.shape != expected:
            raise ParameterError(f"padded weight must have shape {expected}")
        if not (np.all(np.isfinite(padded)) and np.all(padded > 0)):
            raise ParameterError("weights must be strictly positive and finite")
        P = grid.pad
        core = padded[(slice(P, P + grid.N),) * grid.dim]
        super().__init__(grid, core.copy())
        self.padded = padded
        self.closed_form = closed_form
        self._measure_cache = {}

    @classmethod
    def from_field(cls, f: SampledField, closed_form=None):
        """Weight from cube samples only; the padding repeats the edge samples."""
        return cls(f.grid, np.pad(f.values, f.grid.pad, mode="edge"), closed_form)

    def power(self, s):
        tag = None
        if self.closed_form is not None:
            if self.closed_form.kind == "power":
                tag = FunctionSpec("power", (self.closed_form.params[0] * s,))
            elif self.closed_form.kind == "const":
                tag = FunctionSpec("const", (self.closed_form.params[0] ** s,))
        return WeightField(self.grid, self.padded ** s, tag)

    def scaled(self, c):
        if not c > 0:
            raise ParameterError("weights can only be scaled by positive constants")
        return WeightField(self.grid, self.padded * c)

    def __repr__(self):
        tag = self.closed_form.text() if self.closed_form is not None else "sampled"
        return f"WeightField({tag}, dim={self.grid.dim}, L={self.grid.L}, N={self.grid.N})"


# -- test-function mini language ------------------------------------------

_KINDS = {
    "indicator", "gaussian", "power", "bump", "oscillatory", "random_smooth",
    # weight-only shapes
    "const", "shifted_power", "exp",
}


@dataclass(frozen=True)
class FunctionSpec:
    kind: str
    params: tuple = ()
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown function kind {self.kind!r}")
        p = self.params
        if self.kind == "gaussian" and (not p or p[0] <= 0):
            raise ParameterError("gaussian needs sigma > 0")
        if self.kind == "bump" and (len(p) < 2 or p[-1] <= 0):
            raise ParameterError("bump needs center..., width > 0")
        if self.kind == "indicator" and (len(p) not in (2, 4) or p[0] >= p[1] or (len(p) == 4 and p[2] >= p[3])):
            raise ParameterError("indicator needs a<b (dim 1) or a<b,c<d (dim 2)")
        if self.kind in ("power", "oscillatory", "const", "shifted_power", "exp") and len(p) != 1:
            raise ParameterError(f"{self.kind} takes exactly one parameter")
        if self.kind == "random_smooth" and self.seed is None:
            raise ParameterError("random_smooth needs a seed")

    def text(self) -> str:
        if self.kind == "random_smooth":
            return f"random_smooth:{self.seed}"
        if self.kind == "const" and self.params == (1.0,):
            return "1"
        return self.kind + ":" + ",".join(_fmt(x) for x in self.params)

    def evaluate(self, coords: Sequence[np.ndarray]) -> np.ndarray:
        dim = len(coords)
        x = coords
        r2 = sum(c * c for c in x)
        p = self.params
        k = self.kind
        if k == "indicator":
            if dim == 1:
                return ((x[0] > p[0]) & (x[0] < p[1])).astype(float)
            if len(p) != 4:
                raise ParameterError("2-D indicator needs a,b,c,d")
            return ((x[0] > p[0]) & (x[0] < p[1]) & (x[1] > p[2]) & (x[1] < p[3])).astype(float)
        if k == "gaussian":
            center = _center(p[1:], dim)
            d2 = sum((c - m) ** 2 for c, m in zip(x, center))
            return np.exp(-d2 / (2.0 * p[0] ** 2))
        if k == "power":
            return np.sqrt(r2) ** p[0]
        if k == "shifted_power":
            return (1.0 + np.sqrt(r2)) ** p[0]
        if k == "exp":
            return np.exp(p[0] * x[0])
        if k == "const":
            return np.full(np.shape(x[0]), float(p[0]))
        if k == "bump":
            center = _center(p[:-1], dim)
            s2 = sum((c - m) ** 2 for c, m in zip(x, center)) / p[-1] ** 2
            out = np.zeros(np.shape(x[0]))
            inside = s2 < 1.0
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
            return out
        if k == "oscillatory":
            return np.sin(p[0] * x[0]) * np.exp(-2.0 * r2)
        if k == "random_smooth":
            rng = np.random.default_rng(self.seed)
            count = int(rng.integers(4, 17))
            centers = rng.uniform(-1.0, 1.0, size=(count, dim))
            widths = rng.uniform(0.05, 0.3, size=count)
            amps = rng.uniform(-1.0, 1.0, size=count)
            out = np.zeros(np.shape(x[0]))
            for c, s, a in zip(centers, widths, amps):
                d2 = sum((xc - cc) ** 2 for xc, cc in zip(x, c))
                out += a * np.exp(-d2 / (2.0 * s * s))
            return out
        raise ParameterError(f"unknown function kind {k!r}")  # pragma: no cover

    def support_box(self, dim):
        """Closed box containing the support, or None when unbounded."""
        p = self.params
        if self.kind == "indicator":
            return [(p[0], p[1])] if dim == 1 else [(p[0], p[1]), (p[2], p[3])]
        if self.kind == "bump":
            center = _center(p[:-1], dim)
            return [(c - p[-1], c + p[-1]) for c in center]
        return None


def _center(vals, dim):
    if not vals:
        return (0.0,) * dim
    if len(vals) != dim:
        raise ParameterError(f"center needs {dim} coordinates")
    return tuple(vals)


def _fmt(x):
    return repr(float(x)) if float(x) != int(x) else str(int(x))


def parse_spec(text: str) -> FunctionSpec:
    """Parse ``kind:a,b,...``; a bare number is a constant."""
    text = text.strip()
    try:
        return FunctionSpec("const", (float(text),))
    except ValueError:
        pass
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind not in _KINDS:
        raise ParameterError(f"unknown function kind {kind!r}")
    args = [a for a in rest.split(",") if a.strip()] if rest else []
    try:
        if kind == "random_smooth":
            if len(args) != 1:
                raise ParameterError("random_smooth takes a seed")
            return FunctionSpec(kind, (), int(args[0]))
        return FunctionSpec(kind, tuple(float(a) for a in args))
    except ValueError as exc:
        raise ParameterError(f"bad parameters in {text!r}: {exc}") from None


def sample(spec, grid: Grid, confine=False) -> SampledField:
    """Evaluate a spec at the grid midpoints.

    With ``confine=True`` the field is restricted to ``[-L/2, L/2]^dim``:
    indicators and bumps must already fit there, other kinds are cut to zero
    outside it.
    """
    if isinstance(spec, str):
        spec = parse_spec(spec)
    values = spec.evaluate(grid.coords())
    hint = None
    if confine:
        half = grid.L / 2
        box = spec.support_box(grid.dim)
        if box is not None:
            if any(a < -half or b > half for a, b in box):
                raise ParameterError(f"{spec.text()} is not supported in [-L/2, L/2]^dim")
        else:
            inside = np.ones(grid.shape, dtype=bool)
            for c in grid.coords():
                inside &= np.abs(c) <= half
            values = np.where(inside, values, 0.0)
        hint = ((-half, half),) * grid.dim
    return SampledField(grid, values, hint)


def make_weight(spec, grid: Grid) -> WeightField:
    """Sample a weight spec on the padded grid."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    if spec.kind in ("indicator", "oscillatory", "random_smooth"):
        raise ParameterError(f"{spec.kind} is not a positive weight")
    return WeightField(grid, spec.evaluate(grid.coords(padded=True)), spec)


# -- radii and balls -------------------------------------------------------

@dataclass(frozen=True)
class RadiusLadder:
    radii: tuple

    def __post_init__(self):
        r = tuple(float(x) for x in self.radii)
        if not r:
            raise ParameterError("radius ladder is empty")
        if any(b <= a for a, b in zip(r, r[1:])) or r[0] <= 0:
            raise ParameterError("radii must be positive and strictly increasing")
        object.__setattr__(self, "radii", r)

    def check(self, grid: Grid):
        if self.radii[0] < grid.h * (1 - 1e-12) or self.radii[-1] > 2 * grid.L * (1 + 1e-12):
            raise ParameterError(f"ladder must lie in [h, 2L] = [{grid.h}, {2 * grid.L}]")
        return self

    def __len__(self):
        return len(self.radii)

    def __iter__(self):
        return iter(self.radii)


def dyadic_ladder(grid: Grid, r_min=None, r_max=None) -> RadiusLadder:
    """Radii ``r_min * 2**k`` up to ``r_max`` (defaults: h and L)."""
    r_min = grid.h if r_min is None else r_min
    r_max = grid.L if r_max is None else r_max
    radii = []
    r = r_min
    while r <= r_max * (1 + 1e-12):
        radii.append(r)
        r *= 2.0
    return RadiusLadder(tuple(radii)).check(grid)


def radius_cells(r, h) -> float:
    """``r / h``, snapped to the nearest integer when within rounding of it."""
    u = r / h
    n = round(u)
    return float(n) if abs(u - n) <= 1e-9 * max(1.0, u) else u


def ball_offsets(dim, rc, closed=False):
    """Integer offsets ``d`` with ``|d| < rc`` (``<=`` if closed), nearest first.

    Returns ``(offsets, d2)`` with ``d2`` the squared lengths, sorted
    ascending, ties in lexicographic order.
    """
    m = int(math.floor(rc))
    rng = np.arange(-m, m + 1)
    if dim == 1:
        off = rng.reshape(-1, 1)
    else:
        a, b = np.meshgrid(rng, rng, indexing="ij")
        off = np.column_stack([a.ravel(), b.ravel()])
    d2 = np.sum(off * off, axis=1)
    lim = rc * rc
    keep = d2 <= lim if closed else d2 < lim
    off, d2 = off[keep], d2[keep]
    order = np.lexsort(tuple(off[:, i] for i in reversed(range(dim))) + (d2,))
    return np.ascontiguousarray(off[order]), d2[order]


def _centers(grid, padded):
    idx = grid.indices()
    return idx + grid.pad if padded else idx


def ball_sums(values, grid: Grid, radii, padded=False, closed=False) -> np.ndarray:
    """Sums of samples over ``B(x, r)`` at every cube point, for each radius.

    ``values`` is cube-shaped, or padded-shaped when ``padded``. Returns an
    array of shape ``(len(radii),) + grid.shape``.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    rcs = [radius_cells(r, grid.h) for r in radii]
    off, d2 = ball_offsets(grid.dim, max(rcs), closed=closed)
    stops = [int(np.searchsorted(d2, rc * rc, side="right" if closed else "left")) for rc in rcs]
    out = kernels.stencil_cumsum(values, off, stops, _centers(grid, padded))
    return out.reshape((len(radii),) + grid.shape)


def lattice_count(dim, r, h) -> int:
    """Number of lattice offsets in an open ball of radius ``r``."""
    return len(ball_offsets(dim, radius_cells(r, h))[0])


# -- quadrature ------------------------------------------------------------

def integrate(f: SampledField, weight: Optional[SampledField] = None) -> float:
    """Midpoint rule ``sum f(x_i) w(x_i) h**dim``."""
    vals = f.values
    if weight is not None:
        if weight.grid != f.grid:
            raise ParameterError("field and weight live on different grids")
        vals = vals * weight.values
    return float(np.sum(vals) * f.grid.cell)


def _ball_mask(grid, center, r, padded):
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (grid.dim,):
        raise ParameterError(f"center must have {grid.dim} coordinates")
    if np.any(np.abs(center) > grid.L):
        raise ParameterError("ball center must lie in the cube")
    if r < grid.h * (1 - 1e-12):
        raise ParameterError(f"radius {r} below grid spacing {grid.h}")
    d2 = sum((c - m) ** 2 for c, m in zip(grid.coords(padded), center))
    return d2 < r * r * (1 - 1e-12)


def ball_measure(w: WeightField, center, r) -> float:
    """``w(B(center, r))`` by the midpoint rule."""
    mask = _ball_mask(w.grid, center, r, padded=True)
    if not mask.any():
        raise DegenerateBallError(f"no sample in B({center}, {r})")
    return float(np.sum(w.padded[mask]) * w.grid.cell)


def ball_average(f: SampledField, center, r, weight: WeightField) -> float:
    """``(1/w(B)) * integral_B f w`` over the open ball ``B(center, r)``."""
    if weight.grid != f.grid:
        raise ParameterError("field and weight live on different grids")
    den = ball_measure(weight, center, r)
    mask = _ball_mask(f.grid, center, r, padded=False)
    num = float(np.sum(f.values[mask] * weight.values[mask]) * f.grid.cell)
    return num / den
