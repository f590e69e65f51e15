"""Backend selection for the stencil kernels.

The compiled extension is used when it imports; otherwise the numpy twin.
Set ``AMALGAM_BACKEND=python`` to force the fallback.
"""
import os

import numpy as np

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

_active = "python" if os.environ.get("AMALGAM_BACKEND") == "python" or _compiled is None else "compiled"


def backend():
    """Name of the active backend, ``"compiled"`` or ``"python"``."""
    return _active


def set_backend(name):
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}")
    _active = name


def _as2d(a):
    a = np.asarray(a, dtype=np.float64)
    return np.ascontiguousarray(a.reshape(1, -1) if a.ndim == 1 else a)


def _idx2d(a):
    a = np.asarray(a, dtype=np.intp)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.shape[1] == 1:
        a = np.column_stack([np.zeros(len(a), dtype=np.intp), a[:, 0]])
    return np.ascontiguousarray(a)


def stencil_cumsum(src, offsets, stops, centers, coeffs=None):
    """Partial stencil sums at each center.

    ``out[s, m] = sum_{k < stops[s]} coeffs[k] * src[centers[m] + offsets[k]]``
    with zero extension outside ``src``.
    """
    offsets = _idx2d(offsets)
    coeffs = np.ones(len(offsets)) if coeffs is None else np.ascontiguousarray(coeffs, dtype=np.float64)
    stops = np.ascontiguousarray(stops, dtype=np.intp)
    return BACKENDS[_active].stencil_cumsum(_as2d(src), offsets, coeffs, stops, _idx2d(centers))


def stencil_max(src, offsets, centers):
    """Max of ``src`` over the in-bounds stencil around each center (``-inf`` if none)."""
    return BACKENDS[_active].stencil_max(_as2d(src), _idx2d(offsets), _idx2d(centers))


def level_sweep(weight, den, outer, order, counts, offsets, p, q):
    """Amalgam norms of growing level-set indicators.

    Points are switched on in ``order``; after ``counts[s]`` points the
    indicator's (p, q) norm is recorded in ``out[s]``.
    """
    return BACKENDS[_active].level_sweep(
        _as2d(weight), _as2d(den), _as2d(outer), _idx2d(order),
        np.ascontiguousarray(counts, dtype=np.intp), _idx2d(offsets), float(p), float(q),
    )
