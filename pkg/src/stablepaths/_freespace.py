"""Free-space decision kernel for the graph-matching path metric.

Decides whether two polylines (given as vertex arrays) admit a pair of
monotone parametrizations staying within Chebyshev distance eps of each
other, i.e. whether their monotone Frechet distance under
d((t,x),(t',x')) = max(|t-t'|, |x-x'|) is <= eps.

The free space inside each cell is the intersection of two slabs with the
parameter square, hence convex, so interval propagation over cell edges is
exact (the classic decision procedure).  Compiled with numba when available;
the pure-Python body is the fallback.
"""

from __future__ import annotations

import numpy as np

_EMPTY = (1.0, -1.0)


def _point_segment_interval(rc, a, b, eps):
    """Free sub-interval of [0,1] where |a + u*(b-a) - rc| <= eps (one coord)."""
    d = b - a
    c = a - rc
    if d == 0.0:
        if -eps <= c <= eps:
            return 0.0, 1.0
        return 1.0, -1.0
    lo = (-eps - c) / d
    hi = (eps - c) / d
    if lo > hi:
        lo, hi = hi, lo
    if lo < 0.0:
        lo = 0.0
    if hi > 1.0:
        hi = 1.0
    return lo, hi


def _free_point_vs_segment(pt, pv, ax, av, bx, bv, eps):
    """Free interval of point (pt,pv) against segment (ax,av)->(bx,bv)."""
    l1, h1 = _point_segment_interval(pt, ax, bx, eps)
    if l1 > h1:
        return 1.0, -1.0
    l2, h2 = _point_segment_interval(pv, av, bv, eps)
    lo = l1 if l1 > l2 else l2
    hi = h1 if h1 < h2 else h2
    return lo, hi


def _decision_body(px, pv, qx, qv, eps):
    m = px.shape[0] - 1  # segments of P
    n = qx.shape[0] - 1  # segments of Q

    if max(abs(px[0] - qx[0]), abs(pv[0] - qv[0])) > eps:
        return False
    if max(abs(px[m] - qx[n]), abs(pv[m] - qv[n])) > eps:
        return False
    if m == 0 or n == 0:
        # A single-vertex polyline must stay within eps of every point of
        # the other; by convexity it suffices to check all vertices.
        if m == 0:
            for jj in range(n + 1):
                if max(abs(px[0] - qx[jj]), abs(pv[0] - qv[jj])) > eps:
                    return False
        else:
            for ii in range(m + 1):
                if max(abs(px[ii] - qx[0]), abs(pv[ii] - qv[0])) > eps:
                    return False
        return True

    # Reachable interval on the bottom edge of each cell of the current row.
    blo = np.empty(m)
    bhi = np.empty(m)
    ok = True
    for i in range(m):
        flo, fhi = _free_point_vs_segment(
            qx[0], qv[0], px[i], pv[i], px[i + 1], pv[i + 1], eps
        )
        if ok and flo <= 0.0:
            blo[i] = 0.0
            bhi[i] = fhi
        else:
            blo[i] = 1.0
            bhi[i] = -1.0
        ok = ok and flo <= 0.0 and fhi >= 1.0

    ok_left = True
    rv_lo, rv_hi = 1.0, -1.0
    for j in range(n):
        # Left-boundary vertical edge of this row.
        vlo, vhi = _free_point_vs_segment(
            px[0], pv[0], qx[j], qv[j], qx[j + 1], qv[j + 1], eps
        )
        if ok_left and vlo <= 0.0:
            rv_lo, rv_hi = 0.0, vhi
        else:
            rv_lo, rv_hi = 1.0, -1.0
        ok_left = ok_left and vlo <= 0.0 and vhi >= 1.0

        for i in range(m):
            flo, fhi = _free_point_vs_segment(
                px[i + 1], pv[i + 1], qx[j], qv[j], qx[j + 1], qv[j + 1], eps
            )
            glo, ghi = _free_point_vs_segment(
                qx[j + 1], qv[j + 1], px[i], pv[i], px[i + 1], pv[i + 1], eps
            )
            has_b = blo[i] <= bhi[i]
            has_l = rv_lo <= rv_hi

            # Top edge (bottom edge of the next row).
            if has_l:
                nb_lo, nb_hi = glo, ghi
            elif has_b:
                nb_lo = glo if glo > blo[i] else blo[i]
                nb_hi = ghi
            else:
                nb_lo, nb_hi = 1.0, -1.0

            # Right edge (left edge of the next cell).
            if has_b:
                rv_lo, rv_hi = flo, fhi
            elif has_l:
                rv_lo = flo if flo > rv_lo else rv_lo
                rv_hi = fhi
            else:
                rv_lo, rv_hi = 1.0, -1.0

            blo[i] = nb_lo
            bhi[i] = nb_hi

    if rv_lo <= rv_hi and rv_hi >= 1.0:
        return True
    if blo[m - 1] <= bhi[m - 1] and bhi[m - 1] >= 1.0:
        return True
    return False


try:  # pragma: no cover - exercised implicitly wherever numba is installed
    from numba import njit

    _point_segment_interval = njit(cache=True)(_point_segment_interval)
    _free_point_vs_segment = njit(cache=True)(_free_point_vs_segment)
    frechet_decision = njit(cache=True)(_decision_body)
except ImportError:  # pragma: no cover
    frechet_decision = _decision_body
