"""Numba kernels for the hot loops: local alignment scoring, brute-force
optima detection, and nearest-measured-neighbor lookups."""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def sw_best(x, t_rev, pair, gap):
    """Best local-alignment score of x against a (pre-reversed) target.

    Linear gap penalty, scores floored at zero (empty alignment allowed).
    """
    n = x.shape[0]
    m = t_rev.shape[0]
    prev = np.zeros(m + 1, dtype=np.int32)
    cur = np.zeros(m + 1, dtype=np.int32)
    best = np.int32(0)
    for i in range(1, n + 1):
        xi = x[i - 1]
        cur[0] = 0
        for j in range(1, m + 1):
            s = prev[j - 1] + pair[xi, t_rev[j - 1]]
            if prev[j] + gap > s:
                s = prev[j] + gap
            if cur[j - 1] + gap > s:
                s = cur[j - 1] + gap
            if s < 0:
                s = 0
            cur[j] = s
            if s > best:
                best = s
        tmp = prev
        prev = cur
        cur = tmp
    return best


@njit(parallel=True, cache=True)
def sw_best_many(xs, t_rev, pair, gap, out):
    for k in prange(xs.shape[0]):
        out[k] = sw_best(xs[k], t_rev, pair, gap)


@njit(parallel=True, cache=True)
def local_optima_mask(fit, length, nsym):
    """Mark codes whose every single-substitution neighbor is strictly lower."""
    n = fit.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    pows = np.empty(length, dtype=np.int64)
    pw = np.int64(1)
    for p in range(length - 1, -1, -1):
        pows[p] = pw
        pw *= nsym
    for code in prange(n):
        f = fit[code]
        ok = True
        for p in range(length):
            step = pows[p]
            digit = (code // step) % nsym
            base = code - digit * step
            for s in range(nsym):
                if s == digit:
                    continue
                if fit[base + s * step] >= f:
                    ok = False
                    break
            if not ok:
                break
        out[code] = ok
    return out


@njit(cache=True)
def nearest_measured(x, mat):
    """Return (min Hamming distance, row index of the first minimizer)."""
    best_d = x.shape[0] + 1
    best_i = -1
    for r in range(mat.shape[0]):
        d = 0
        for c in range(x.shape[0]):
            if mat[r, c] != x[c]:
                d += 1
                if d >= best_d:
                    break
        if d < best_d:
            best_d = d
            best_i = r
            if d == 0:
                break
    return best_d, best_i
