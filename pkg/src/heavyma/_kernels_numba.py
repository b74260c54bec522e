"""Numba implementations of the hot kernels (see ``_kernels_numpy``)."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def ar1_filter(phi, x):
    g = np.empty_like(x)
    if x.size == 0:
        return g
    g[0] = x[0]
    for i in range(1, x.size):
        g[i] = x[i] + phi * g[i - 1]
    return g


@njit(cache=True, nogil=True)
def ma_filter(coeffs, z, offset, n):
    out = np.zeros(n)
    for j in range(coeffs.size):
        c = coeffs[j]
        base = offset - j
        for i in range(n):
            out[i] += c * z[base + i]
    return out


@njit(cache=True, nogil=True)
def covers(fb, fy, gb, gy, r):
    mf = fb.size
    mg = gb.size
    # plateau j of g is relevant for s in [a_j, b_j]
    a = np.empty(mg + 1)
    b = np.empty(mg + 1)
    a[0] = -r
    for j in range(mg):
        a[j + 1] = gb[j] - r
        b[j] = gb[j] + r
    b[mg] = 1.0 + r
    # monotone deques over active plateau indices
    dmin = np.empty(mg + 1, dtype=np.int64)
    dmax = np.empty(mg + 1, dtype=np.int64)
    h0 = 0
    t0 = 0
    h1 = 0
    t1 = 0
    jhi = -1
    jlo = 0
    ia = 0
    ib = 0
    kf = 0
    kev = 0
    cur = 0.0
    while cur < 1.0:
        nxt = 1.0
        while ia <= mg and max(a[ia], 0.0) <= cur:
            ia += 1
        if ia <= mg:
            v = max(a[ia], 0.0)
            if v < nxt:
                nxt = v
        while ib <= mg and min(b[ib], 1.0) <= cur:
            ib += 1
        if ib <= mg:
            v = min(b[ib], 1.0)
            if v < nxt:
                nxt = v
        while kev < mf and fb[kev] <= cur:
            kev += 1
        if kev < mf and fb[kev] < nxt:
            nxt = fb[kev]
        s = 0.5 * (cur + nxt)
        while jhi + 1 <= mg and a[jhi + 1] <= s:
            jhi += 1
            yv = gy[jhi]
            while t0 > h0 and gy[dmin[t0 - 1]] >= yv:
                t0 -= 1
            dmin[t0] = jhi
            t0 += 1
            while t1 > h1 and gy[dmax[t1 - 1]] <= yv:
                t1 -= 1
            dmax[t1] = jhi
            t1 += 1
        while b[jlo] < s:
            jlo += 1
        while dmin[h0] < jlo:
            h0 += 1
        while dmax[h1] < jlo:
            h1 += 1
        while kf < mf and fb[kf] <= s:
            kf += 1
        fv = fy[kf]
        if fv < gy[dmin[h0]] - r or fv > gy[dmax[h1]] + r:
            return False
        cur = nxt
    j1 = 0
    while b[j1] < 1.0:
        j1 += 1
    mn1 = gy[j1]
    mx1 = gy[j1]
    for j in range(j1 + 1, mg + 1):
        if gy[j] < mn1:
            mn1 = gy[j]
        if gy[j] > mx1:
            mx1 = gy[j]
    last = fy[mf]
    if last < mn1 - r or last > mx1 + r:
        return False
    if mf > 0 and fb[mf - 1] == 1.0:
        prev = fy[mf - 1]
        if prev < mn1 - r or prev > mx1 + r:
            return False
    return True


@njit(cache=True, nogil=True)
def hausdorff_bisect(fb, fy, gb, gy, hi, tol):
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


@njit(cache=True, nogil=True)
def _log2_table(n):
    lg = np.zeros(n + 1, dtype=np.int64)
    for i in range(2, n + 1):
        lg[i] = lg[i // 2] + 1
    return lg


@njit(cache=True, nogil=True)
def oscillation_candidates(y, starts):
    m1 = y.size
    if m1 < 3:
        return np.empty(0), np.empty(0)
    lg = _log2_table(m1)
    K = lg[m1] + 1
    st = np.empty((K, m1))
    st[0, :] = y
    for k in range(1, K):
        h = 1 << (k - 1)
        for i in range(m1 - (1 << k) + 1):
            u = st[k - 1, i]
            v = st[k - 1, i + h]
            st[k, i] = u if u >= v else v
    ii = np.empty(2 * m1, dtype=np.int64)
    ll = np.empty(2 * m1, dtype=np.int64)
    cnt = 0
    stack = np.empty(m1, dtype=np.int64)
    top = 0
    for l in range(m1):
        while top > 0 and y[stack[top - 1]] >= y[l]:
            i = stack[top - 1]
            top -= 1
            if l >= i + 2:
                ii[cnt] = i
                ll[cnt] = l
                cnt += 1
        if top > 0:
            i = stack[top - 1]
            if l >= i + 2:
                ii[cnt] = i
                ll[cnt] = l
                cnt += 1
        stack[top] = l
        top += 1
    spans = np.empty(cnt)
    vals = np.empty(cnt)
    out = 0
    for c in range(cnt):
        i = ii[c]
        l = ll[c]
        a0 = i + 1
        b0 = l - 1
        k = lg[b0 - a0 + 1]
        u = st[k, a0]
        v = st[k, b0 - (1 << k) + 1]
        inner = u if u >= v else v
        e = y[i] if y[i] >= y[l] else y[l]
        val = inner - e
        if val > 0:
            spans[out] = starts[l] - starts[i + 1]
            vals[out] = val
            out += 1
    return spans[:out], vals[:out]
