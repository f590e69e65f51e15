"""Pure-numpy stencil kernels.

Same contracts as the compiled module: arrays are 2-D (1-D fields are carried
as shape ``(1, N)``), offsets and centers are ``(K, 2)`` index arrays, and every
center accumulates its stencil terms in offset order.
"""
import numpy as np


def _gather(src, centers, off):
    i = centers[:, 0] + off[0]
    j = centers[:, 1] + off[1]
    ok = (i >= 0) & (i < src.shape[0]) & (j >= 0) & (j < src.shape[1])
    return ok, i[ok], j[ok]


def stencil_cumsum(src, offsets, coeffs, stops, centers):
    S, M = len(stops), len(centers)
    out = np.zeros((S, M))
    acc = np.zeros(M)
    s = 0
    for k in range(len(offsets)):
        while s < S and stops[s] == k:
            out[s] = acc
            s += 1
        ok, i, j = _gather(src, centers, offsets[k])
        acc[ok] = acc[ok] + coeffs[k] * src[i, j]
    while s < S:
        out[s] = acc
        s += 1
    return out


def stencil_max(src, offsets, centers):
    best = np.full(len(centers), -np.inf)
    for k in range(len(offsets)):
        ok, i, j = _gather(src, centers, offsets[k])
        best[ok] = np.maximum(best[ok], src[i, j])
    return best


def level_sweep(weight, den, outer, order, counts, offsets, p, q):
    n0, n1 = weight.shape
    sup_norm = q == np.inf
    expo = 1.0 / p if sup_norm else q / p
    num = np.zeros((n0, n1))
    term = np.zeros((n0, n1))
    out = np.empty(len(counts))
    total = 0.0
    best = 0.0
    ptr = 0
    for s, count in enumerate(counts):
        while ptr < count:
            y = order[ptr]
            ok, i, j = _gather(num, offsets, y)
            num[i, j] += weight[y[0], y[1]]
            new = (num[i, j] / den[i, j]) ** expo
            if sup_norm:
                best = max(best, new.max(initial=0.0))
            else:
                new = new * outer[i, j]
                total += float(np.sum(new - term[i, j]))
                term[i, j] = new
            ptr += 1
        out[s] = best if sup_norm else total ** (1.0 / q)
    return out
