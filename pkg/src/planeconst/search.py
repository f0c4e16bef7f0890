"""Derivative-free search helpers shared by the estimators.

Everything here maximizes; minimization is done by negating the objective.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# grid-point defect values this small are treated as exact roots
ZERO_SNAP = 1e-13


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-7):
    """Golden-section search for a maximum of ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` for the best interior probe.  ``f`` may return
    ``-inf`` to mark infeasible points.
    """
    if b < a:
        a, b = b, a
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = f(c)
    fd = f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd


def refine_coordinates(
    f: Callable[[Sequence[float]], float],
    start: Sequence[float],
    value: float,
    steps: Sequence[float],
    bounds: Sequence[tuple[float, float] | None],
    rounds: int = 3,
    tol: float = 1e-7,
):
    """Coordinate-wise golden-section ascent from ``start``.

    Each coordinate is searched on ``[p - step, p + step]`` (clipped to its
    bounds); a move is kept only if it strictly improves the value, so the
    result never falls below ``value``.
    """
    p = list(start)
    best = value
    for _ in range(rounds):
        for i, h in enumerate(steps):
            lo, hi = p[i] - h, p[i] + h
            if bounds[i] is not None:
                lo = max(lo, bounds[i][0])
                hi = min(hi, bounds[i][1])
            if hi - lo <= tol:
                continue

            def g(s, i=i):
                q = list(p)
                q[i] = s
                return f(q)

            s, fs = golden_max(g, lo, hi, tol)
            if fs > best:
                best = fs
                p[i] = s
            # bounds are often where the optimum sits (rho = 0, rho = cap)
            if bounds[i] is not None:
                for edge in (lo, hi):
                    if edge in bounds[i] and edge != p[i]:
                        fe = g(edge)
                        if fe > best:
                            best = fe
                            p[i] = edge
    if len(p) > 1:
        p, best = simplex_polish(f, p, best, steps, bounds, tol)
    return p, best


def simplex_polish(f, start, value, steps, bounds, tol=1e-7):
    """Nelder-Mead ascent from ``start``; follows ridges that coordinate moves cannot.

    Fixed coordinates (zero step) stay fixed; out-of-bounds points are infeasible.
    """
    from scipy.optimize import minimize

    free = [i for i, h in enumerate(steps) if h > 0]
    if not free:
        return list(start), value
    base = list(start)

    def full(z):
        q = list(base)
        for i, zi in zip(free, z):
            if bounds[i] is not None and not (bounds[i][0] <= zi <= bounds[i][1]):
                return None
            q[i] = float(zi)
        return q

    def neg(z):
        q = full(z)
        if q is None:
            return math.inf
        v = f(q)
        return -v if math.isfinite(v) else math.inf

    z0 = np.array([base[i] for i in free])
    simplex = [z0]
    for k, i in enumerate(free):
        z = z0.copy()
        h = 0.25 * steps[i]
        if bounds[i] is not None and z[k] + h > bounds[i][1]:
            h = -h
        z[k] += h
        simplex.append(z)
    res = minimize(
        neg,
        z0,
        method="Nelder-Mead",
        options={"initial_simplex": np.array(simplex), "xatol": tol, "fatol": 1e-13, "maxiter": 400},
    )
    q = full(res.x)
    if q is not None and -res.fun > value:
        v = f(q)
        if v > value:
            return q, v
    return list(start), value


def top_candidates(values: np.ndarray, k: int, periodic: Sequence[bool], min_sep: int = 3) -> list[tuple]:
    """Indices of up to ``k`` well-separated large entries of ``values``.

    The first entry is always the first-occurrence argmax, i.e. the
    lexicographically smallest index among exact ties.
    """
    flat = values.ravel()
    finite = np.where(np.isfinite(flat), flat, -np.inf)
    first = int(np.argmax(finite))
    if not np.isfinite(finite[first]):
        return []
    m = min(flat.size, 64 * k)
    part = np.argpartition(-finite, m - 1)[:m] if m < flat.size else np.arange(flat.size)
    part = part[np.lexsort((part, -finite[part]))]
    shape = values.shape
    chosen = [np.unravel_index(first, shape)]
    for j in part:
        if len(chosen) >= k:
            break
        if not np.isfinite(finite[j]):
            break
        idx = np.unravel_index(int(j), shape)
        ok = True
        for c in chosen:
            dist = 0
            for ax, (a, b) in enumerate(zip(idx, c)):
                d = abs(int(a) - int(b))
                if periodic[ax]:
                    d = min(d, shape[ax] - d)
                dist = max(dist, d)
            if dist < min_sep:
                ok = False
                break
        if ok:
            chosen.append(idx)
    return [tuple(int(i) for i in c) for c in chosen]


def bisect_brackets(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    flo: np.ndarray,
    xtol: float = 1e-12,
    max_iter: int = 200,
) -> np.ndarray:
    """Vectorized bisection on many sign-change brackets at once.

    ``f(theta, active)`` evaluates the function for bracket indices
    ``active`` at abscissae ``theta``.  ``flo`` holds the function values at
    ``lo``; the sign at ``hi`` is assumed opposite.
    """
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    slo = np.sign(flo)
    idx = np.arange(lo.size)
    for _ in range(max_iter):
        active = idx[(hi - lo) > xtol]
        if active.size == 0:
            break
        mid = 0.5 * (lo[active] + hi[active])
        fm = f(mid, active)
        zero = fm == 0.0
        same = np.sign(fm) == slo[active]
        lo[active] = np.where(same & ~zero, mid, lo[active])
        hi[active] = np.where(~same | zero, mid, hi[active])
        if np.any(zero):
            lo[active[zero]] = mid[zero]
    return 0.5 * (lo + hi)


def scan_brackets(d: np.ndarray):
    """Locate roots of rows of sampled values ``d`` (shape (m, J)).

    Returns ``(rows, cols, exact)``: bracket ``[cols, cols + 1]`` in row
    ``rows`` contains a root; ``exact`` marks grid points that are roots
    themselves (``|d| <= ZERO_SNAP``), in which case no bisection is needed.
    The last column is only used as a right bracket end.
    """
    z = np.abs(d) <= ZERO_SNAP
    left = d[:, :-1]
    right = d[:, 1:]
    exact_r, exact_c = np.nonzero(z[:, :-1])
    change = (left * right < 0) & ~z[:, :-1] & ~z[:, 1:]
    ch_r, ch_c = np.nonzero(change)
    rows = np.concatenate([exact_r, ch_r])
    cols = np.concatenate([exact_c, ch_c])
    exact = np.concatenate([np.ones(exact_r.size, bool), np.zeros(ch_r.size, bool)])
    order = np.lexsort((cols, rows))
    return rows[order], cols[order], exact[order]


def local_root(g: Callable[[float], float], x0: float, step: float, max_expand: int = 8, xtol: float = 1e-13):
    """Root of ``g`` nearest ``x0`` found by outward bracketing and Brent's method.

    Returns ``None`` if no sign change is found within ``max_expand`` steps
    on either side.
    """
    from scipy.optimize import brentq

    g0 = g(x0)
    if abs(g0) <= ZERO_SNAP:
        return x0
    prev_l = prev_r = x0
    gl = gr = g0
    for k in range(1, max_expand + 1):
        xr = x0 + k * step
        grn = g(xr)
        if abs(grn) <= ZERO_SNAP:
            return xr
        if grn * gr < 0:
            return brentq(g, prev_r, xr, xtol=xtol)
        xl = x0 - k * step
        gln = g(xl)
        if abs(gln) <= ZERO_SNAP:
            return xl
        if gln * gl < 0:
            return brentq(g, xl, prev_l, xtol=xtol)
        prev_r, gr = xr, grn
        prev_l, gl = xl, gln
    return None
