"""Pure-numpy implementations of the hot kernels.

Every function here mirrors a function of the same name in
``_kernels_numba`` and produces bit-identical output.
"""
from __future__ import annotations

import numpy as np
from scipy.signal import lfilter


def ar1_filter(phi: float, x: np.ndarray) -> np.ndarray:
    """Return ``g`` with ``g[0] = x[0]`` and ``g[i] = phi*g[i-1] + x[i]``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.size == 0:
        return x.copy()
    return lfilter(np.array([1.0]), np.array([1.0, -phi]), x)


def ma_filter(coeffs: np.ndarray, z: np.ndarray, offset: int, n: int) -> np.ndarray:
    """Convolution ``out[i] = sum_j coeffs[j] * z[offset + i - j]``.

    Terms are accumulated in increasing ``j`` for every ``i``.
    """
    out = np.zeros(n)
    for j in range(coeffs.size):
        base = offset - j
        out += coeffs[j] * z[base:base + n]
    return out


def _sparse_tables(y: np.ndarray):
    n = y.size
    mins = [y]
    maxs = [y]
    k = 1
    while (1 << k) <= n:
        h = 1 << (k - 1)
        lo, hi = mins[-1], maxs[-1]
        mins.append(np.minimum(lo[:-h], lo[h:]))
        maxs.append(np.maximum(hi[:-h], hi[h:]))
        k += 1
    return mins, maxs


def _query(tables, a: np.ndarray, b: np.ndarray, op) -> np.ndarray:
    # inclusive ranges a <= b, vectorized
    length = b - a + 1
    k = (np.frexp(length.astype(np.float64))[1] - 1).astype(np.int64)
    out = np.empty(a.shape)
    for kk in np.unique(k):
        sel = k == kk
        t = tables[kk]
        out[sel] = op(t[a[sel]], t[b[sel] - (1 << kk) + 1])
    return out


def covers(fb, fy, gb, gy, r: float) -> bool:
    """Whether the completed graph of f lies in the closed r-neighbourhood of g's.

    ``fb``/``gb`` are the jump times, ``fy``/``gy`` the plateau levels
    (one more entry than jump times).
    """
    mg = gb.size
    a = np.empty(mg + 1)
    a[0] = 0.0
    a[1:] = gb
    a -= r
    b = np.empty(mg + 1)
    b[:mg] = gb
    b[mg] = 1.0
    b += r
    ev = np.unique(np.concatenate((np.array([0.0, 1.0]), fb,
                                   np.maximum(a, 0.0), np.minimum(b, 1.0))))
    s = 0.5 * (ev[:-1] + ev[1:])
    fv = fy[np.searchsorted(fb, s, side="right")]
    jhi = np.searchsorted(a, s, side="right") - 1
    jlo = np.searchsorted(b, s, side="left")
    mins, maxs = _sparse_tables(gy)
    mn = _query(mins, jlo, jhi, np.minimum)
    mx = _query(maxs, jlo, jhi, np.maximum)
    if np.any(fv < mn - r) or np.any(fv > mx + r):
        return False
    j1 = np.searchsorted(b, 1.0, side="left")
    mn1 = gy[j1:].min()
    mx1 = gy[j1:].max()
    last = fy[-1]
    if last < mn1 - r or last > mx1 + r:
        return False
    if fb.size > 0 and fb[-1] == 1.0:
        prev = fy[-2]
        if prev < mn1 - r or prev > mx1 + r:
            return False
    return True


def hausdorff_bisect(fb, fy, gb, gy, hi: float, tol: float) -> float:
    """Bisection on the radius for the Hausdorff distance of completed graphs."""
    if hi <= 0.0:
        return 0.0
    while not (covers(fb, fy, gb, gy, hi) and covers(gb, gy, fb, fy, hi)):
        hi *= 2.0
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if covers(fb, fy, gb, gy, mid) and covers(gb, gy, fb, fy, mid):
            hi = mid
        else:
            lo = mid
    return hi


def oscillation_candidates(y: np.ndarray, starts: np.ndarray):
    """Candidate (span, value) pairs for the peak side of the oscillation.

    For every plateau ``i`` the pair ``(i, l)`` with ``l`` the next plateau at
    or below ``y[i]``, and for every ``l`` the pair with the previous plateau
    strictly below ``y[l]``.  Value is the interior maximum minus the larger
    endpoint level.  Troughs follow by negating ``y``.
    """
    m1 = y.size
    if m1 < 3:
        return np.empty(0), np.empty(0)
    mins, maxs = _sparse_tables(y)
    idx = np.arange(m1)
    K = len(mins)

    # next index l > i with y[l] <= y[i]
    pos = idx + 1
    for k in range(K - 1, -1, -1):
        w = 1 << k
        ok = pos + w <= m1
        cand = np.flatnonzero(ok)
        if cand.size:
            good = mins[k][pos[cand]] > y[cand]
            pos[cand[good]] += w
    nxt_i = idx
    nxt_l = pos
    keep = (nxt_l < m1) & (nxt_l >= nxt_i + 2)
    i1, l1 = nxt_i[keep], nxt_l[keep]

    # previous index i < l with y[i] < y[l]
    pos = idx.copy()
    for k in range(K - 1, -1, -1):
        w = 1 << k
        ok = pos - w >= 0
        cand = np.flatnonzero(ok)
        if cand.size:
            good = mins[k][pos[cand] - w] >= y[cand]
            pos[cand[good]] -= w
    prv_i = pos - 1
    keep = (prv_i >= 0) & (idx >= prv_i + 2)
    i2, l2 = prv_i[keep], idx[keep]

    ii = np.concatenate((i1, i2))
    ll = np.concatenate((l1, l2))
    inner = _query(maxs, ii + 1, ll - 1, np.maximum)
    vals = inner - np.maximum(y[ii], y[ll])
    spans = starts[ll] - starts[ii + 1]
    pos_ = vals > 0
    return spans[pos_], vals[pos_]
