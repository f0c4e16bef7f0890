"""Exhaustive-grid oracle for the isosceles-constrained L ratio.

Written against its own norm formulas and its own root polishing so that
it shares no search code with the package under test.
"""

import numpy as np


def _lp(u, v, p):
    if np.isinf(p):
        return np.maximum(np.abs(u), np.abs(v))
    return (np.abs(u) ** p + np.abs(v) ** p) ** (1.0 / p)


def _mixed(p, q):
    def n(u, v):
        first_third = u * v >= 0
        return np.where(first_third, _lp(u, v, p), _lp(u, v, q))

    return n


NORMS = {
    "euclidean": lambda u, v: np.hypot(u, v),
    "l1": lambda u, v: np.abs(u) + np.abs(v),
    "linf": lambda u, v: np.maximum(np.abs(u), np.abs(v)),
    "l2-l1": _mixed(2.0, 1.0),
    "linf-l1": _mixed(np.inf, 1.0),
    "l3": lambda u, v: _lp(u, v, 3.0),
    "l4": lambda u, v: _lp(u, v, 4.0),
}


def _ratio(N, xu, xv, yu, yv, t):
    s = 1 - t
    a = N(t * xu + s * yu, t * xv + s * yv)
    b = N(s * xu + t * yu, s * xv + t * yv)
    c = N(xu + yu, xv + yv)
    return (a * a + b * b) / (c * c)


def brute_force_L(N, t, n_angle=300, rhos=None, polish=60):
    """Max of the L ratio over grid pairs x _|_I y, ||x|| = 1, ||y|| = rho.

    x runs over ``n_angle`` directions of a half-turn (pairs (x, y) and
    (-x, -y) give equal ratios); y over ``n_angle`` directions of a
    half-turn and their negatives.  Pairs whose isosceles defect changes
    sign between neighbouring y directions are polished by plain bisection
    on the direction angle; grid pairs with zero defect are kept as they are.
    """
    if rhos is None:
        rhos = np.arange(17) * 0.25
    ang = np.pi * np.arange(n_angle) / n_angle
    c, s = np.cos(ang), np.sin(ang)
    r = N(c, s)
    ux, uy = c / r, s / r
    # full turn of y directions, closed by repeating the first one
    phi = np.concatenate([ang, ang + np.pi, [2 * np.pi]])
    wx = np.concatenate([ux, -ux, [ux[0]]])
    wy = np.concatenate([uy, -uy, [uy[0]]])
    best = -np.inf
    for rho in rhos:
        if rho == 0:
            vals = _ratio(N, ux, uy, 0.0 * ux, 0.0 * uy, t)
            best = max(best, vals.max())
            continue
        XU, XV = ux[:, None], uy[:, None]
        YU, YV = rho * wx[None, :], rho * wy[None, :]
        d = N(XU + YU, XV + YV) - N(XU - YU, XV - YV)
        exact = np.abs(d[:, :-1]) < 1e-14
        if exact.any():
            i, j = np.nonzero(exact)
            best = max(best, _ratio(N, ux[i], uy[i], rho * wx[j], rho * wy[j], t).max())
        flip = d[:, :-1] * d[:, 1:] < 0
        if not flip.any():
            continue
        i, j = np.nonzero(flip)
        lo, hi = phi[j].copy(), phi[j + 1].copy()
        dlo = d[i, j]
        xu, xv = ux[i], uy[i]
        for _ in range(polish):
            mid = 0.5 * (lo + hi)
            cu, cv = np.cos(mid), np.sin(mid)
            k = rho / N(cu, cv)
            dm = N(xu + k * cu, xv + k * cv) - N(xu - k * cu, xv - k * cv)
            left = np.sign(dm) == np.sign(dlo)
            lo = np.where(left, mid, lo)
            hi = np.where(left, hi, mid)
        mid = 0.5 * (lo + hi)
        cu, cv = np.cos(mid), np.sin(mid)
        k = rho / N(cu, cv)
        best = max(best, _ratio(N, xu, xv, k * cu, k * cv, t).max())
    return float(best)
