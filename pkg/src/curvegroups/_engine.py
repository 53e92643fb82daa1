"""Compiled inner loops for local linear fitting and leave-one-out CV.

All routines take a weighted sample (xs sorted ascending, per-point masses
cs, responses ys) so that raw samples (cs = 1) and binned samples (cs = bin
counts, ys = bin means) share one code path.

The Epanechnikov kernel's compact support makes every evaluation a windowed
sum.  Two complementary strategies are used:

* small bandwidths: direct accumulation over the window, centred at the
  evaluation point (exact, cost proportional to the window size);
* large bandwidths (h >= span / 6): windowed raw moments via prefix sums
  translated to the evaluation point.  The translation amplifies rounding
  by at most (span / (2 h))**4 <= 81, i.e. stays at machine precision.

Weights are unnormalised within each kernel family; the scale cancels in
the weighted least squares solve.
"""

import numpy as np
from numba import njit

# Relative determinant floor below which the 2x2 normal system is treated
# as singular (fewer than two distinct weighted covariate values).
DET_RTOL = 1e-10

# Minimum weighted design spread inside the window, as a fraction of the
# effective bandwidth min(h, span).  A window whose points all sit in a
# tight cluster on one side of the evaluation point passes the determinant
# ratio test yet extrapolates wildly; requiring
# sqrt(det) / s0 >= SPREAD_FRACTION * min(h, span) caps that amplification.
SPREAD_FRACTION = 0.1


@njit(cache=True)
def epa_fit(xs, cs, ys, h, te):
    """Local linear fit with the Epanechnikov kernel at sorted points te.

    Returns (alpha0, alpha1, ok) arrays; ok[i] is False where the local
    system is singular.
    """
    n = len(xs)
    m = len(te)
    a0 = np.zeros(m)
    a1 = np.zeros(m)
    ok = np.zeros(m, dtype=np.bool_)
    lo = 0
    hi = 0
    ih2 = 1.0 / (h * h)
    heff = min(h, xs[n - 1] - xs[0])
    spread_floor = SPREAD_FRACTION * SPREAD_FRACTION * heff * heff
    for i in range(m):
        t = te[i]
        while lo < n and xs[lo] <= t - h:
            lo += 1
        if hi < lo:
            hi = lo
        while hi < n and xs[hi] < t + h:
            hi += 1
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        t0 = 0.0
        t1 = 0.0
        cnt = 0
        for j in range(lo, hi):
            d = xs[j] - t
            w = cs[j] * 0.75 * (1.0 - d * d * ih2)
            if w <= 0.0:
                continue
            cnt += 1
            s0 += w
            wd = w * d
            s1 += wd
            s2 += wd * d
            t0 += w * ys[j]
            t1 += wd * ys[j]
        det = s0 * s2 - s1 * s1
        if (cnt >= 2 and det > DET_RTOL * (s0 * s2 + s1 * s1) and det > 0.0
                and det >= spread_floor * s0 * s0):
            a0[i] = (s2 * t0 - s1 * t1) / det
            a1[i] = (s0 * t1 - s1 * t0) / det
            ok[i] = True
    return a0, a1, ok


@njit(cache=True)
def gauss_fit(xs, cs, ys, h, te):
    """Local linear fit with the Gaussian kernel (full-support loops)."""
    n = len(xs)
    m = len(te)
    a0 = np.zeros(m)
    a1 = np.zeros(m)
    ok = np.zeros(m, dtype=np.bool_)
    w = np.zeros(n)
    heff = min(h, xs[n - 1] - xs[0])
    spread_floor = SPREAD_FRACTION * SPREAD_FRACTION * heff * heff
    for i in range(m):
        t = te[i]
        wmax = 0.0
        for j in range(n):
            u = (xs[j] - t) / h
            wj = cs[j] * np.exp(-0.5 * u * u)
            w[j] = wj
            if wj > wmax:
                wmax = wj
        floor = 1e-12 * wmax
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        t0 = 0.0
        t1 = 0.0
        cnt = 0
        for j in range(n):
            if w[j] <= floor:
                continue
            cnt += 1
            d = xs[j] - t
            wd = w[j] * d
            s0 += w[j]
            s1 += wd
            s2 += wd * d
            t0 += w[j] * ys[j]
            t1 += wd * ys[j]
        det = s0 * s2 - s1 * s1
        if (cnt >= 2 and det > DET_RTOL * (s0 * s2 + s1 * s1) and det > 0.0
                and det >= spread_floor * s0 * s0):
            a0[i] = (s2 * t0 - s1 * t1) / det
            a1[i] = (s0 * t1 - s1 * t0) / det
            ok[i] = True
    return a0, a1, ok


@njit(cache=True)
def epa_cv(xs, cs, ys, cands):
    """Leave-one-out CV sums for every candidate bandwidth (Epanechnikov).

    The LOO fit at x_i removes the held-out point's mass from the 2x2
    normal sums (its off-centre terms vanish at d = 0); binned points are
    held out as whole bins.  Returns
    (cv, excluded) where excluded[c] is the observation mass whose LOO
    fit was singular for candidate c; those points are left out of cv[c].
    """
    n = len(xs)
    nc = len(cands)
    cv = np.zeros(nc)
    excl = np.zeros(nc)
    span = xs[n - 1] - xs[0]
    mid = 0.5 * (xs[0] + xs[n - 1])

    # prefix sums of c * x~**p and c * y * x~**p about the range midpoint
    pa = np.zeros((5, n + 1))
    pb = np.zeros((4, n + 1))
    for j in range(n):
        xt = xs[j] - mid
        cj = cs[j]
        cy = cj * ys[j]
        xp = 1.0
        for p in range(5):
            pa[p, j + 1] = pa[p, j] + cj * xp
            if p < 4:
                pb[p, j + 1] = pb[p, j] + cy * xp
            xp *= xt

    for c in range(nc):
        h = cands[c]
        ih2 = 1.0 / (h * h)
        heff = min(h, span)
        spread_floor = SPREAD_FRACTION * SPREAD_FRACTION * heff * heff
        use_prefix = h >= span / 6.0 and n > 64
        lo = 0
        hi = 0
        for i in range(n):
            t = xs[i]
            while lo < n and xs[lo] <= t - h:
                lo += 1
            if hi < lo:
                hi = lo
            while hi < n and xs[hi] < t + h:
                hi += 1
            if use_prefix:
                tt = t - mid
                A0 = pa[0, hi] - pa[0, lo]
                A1 = pa[1, hi] - pa[1, lo]
                A2 = pa[2, hi] - pa[2, lo]
                A3 = pa[3, hi] - pa[3, lo]
                A4 = pa[4, hi] - pa[4, lo]
                B0 = pb[0, hi] - pb[0, lo]
                B1 = pb[1, hi] - pb[1, lo]
                B2 = pb[2, hi] - pb[2, lo]
                B3 = pb[3, hi] - pb[3, lo]
                tt2 = tt * tt
                tt3 = tt2 * tt
                tt4 = tt3 * tt
                u0 = A0
                u1 = A1 - tt * A0
                u2 = A2 - 2.0 * tt * A1 + tt2 * A0
                u3 = A3 - 3.0 * tt * A2 + 3.0 * tt2 * A1 - tt3 * A0
                u4 = A4 - 4.0 * tt * A3 + 6.0 * tt2 * A2 - 4.0 * tt3 * A1 + tt4 * A0
                v0 = B0
                v1 = B1 - tt * B0
                v2 = B2 - 2.0 * tt * B1 + tt2 * B0
                v3 = B3 - 3.0 * tt * B2 + 3.0 * tt2 * B1 - tt3 * B0
                s0 = 0.75 * (u0 - u2 * ih2)
                s1 = 0.75 * (u1 - u3 * ih2)
                s2 = 0.75 * (u2 - u4 * ih2)
                t0 = 0.75 * (v0 - v2 * ih2)
                t1 = 0.75 * (v1 - v3 * ih2)
            else:
                s0 = 0.0
                s1 = 0.0
                s2 = 0.0
                t0 = 0.0
                t1 = 0.0
                for j in range(lo, hi):
                    d = xs[j] - t
                    w = cs[j] * 0.75 * (1.0 - d * d * ih2)
                    if w <= 0.0:
                        continue
                    wd = w * d
                    s0 += w
                    s1 += wd
                    s2 += wd * d
                    t0 += w * ys[j]
                    t1 += wd * ys[j]
            # drop the held-out point's full mass at x_i; for raw samples
            # (cs = 1) this is exactly one observation, for binned samples
            # the whole bin must go, otherwise the bin's own mean dominates
            # its prediction and CV collapses toward h -> 0
            s0 -= 0.75 * cs[i]
            t0 -= 0.75 * cs[i] * ys[i]
            det = s0 * s2 - s1 * s1
            if (s0 > 0.0 and det > DET_RTOL * (s0 * s2 + s1 * s1)
                    and det > 0.0 and det >= spread_floor * s0 * s0):
                a0 = (s2 * t0 - s1 * t1) / det
                r = ys[i] - a0
                cv[c] += cs[i] * r * r
            else:
                excl[c] += cs[i]
    return cv, excl


@njit(cache=True)
def gauss_cv(xs, cs, ys, cands):
    """Leave-one-out CV sums for every candidate bandwidth (Gaussian)."""
    n = len(xs)
    nc = len(cands)
    cv = np.zeros(nc)
    excl = np.zeros(nc)
    span = xs[n - 1] - xs[0]
    for c in range(nc):
        h = cands[c]
        heff = min(h, span)
        spread_floor = SPREAD_FRACTION * SPREAD_FRACTION * heff * heff
        for i in range(n):
            t = xs[i]
            s0 = 0.0
            s1 = 0.0
            s2 = 0.0
            t0 = 0.0
            t1 = 0.0
            for j in range(n):
                u = (xs[j] - t) / h
                w = cs[j] * np.exp(-0.5 * u * u)
                d = xs[j] - t
                wd = w * d
                s0 += w
                s1 += wd
                s2 += wd * d
                t0 += w * ys[j]
                t1 += wd * ys[j]
            s0 -= cs[i]
            t0 -= cs[i] * ys[i]
            det = s0 * s2 - s1 * s1
            if (s0 > 0.0 and det > DET_RTOL * (s0 * s2 + s1 * s1)
                    and det > 0.0 and det >= spread_floor * s0 * s0):
                a0 = (s2 * t0 - s1 * t1) / det
                r = ys[i] - a0
                cv[c] += cs[i] * r * r
            else:
                excl[c] += cs[i]
    return cv, excl
