"""Isosceles (and Pythagorean) orthogonality on a normed plane.

The isosceles constraint ``||x + y|| = ||x - y||`` is solved for ``y`` on a
circle ``||y|| = rho`` by scanning the Euclidean angle of ``y`` for sign
changes of the defect and bisecting each bracket.  The defect is odd under
``y -> -y``, so only a half-turn is scanned and the other half is obtained
by exact negation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .normspace import NormedPlane, Vector2
from .search import bisect_brackets, scan_brackets

__all__ = [
    "ConsistencyError",
    "OrthoPair",
    "ManifoldSample",
    "iso_defect",
    "pyth_defect",
    "find_iso_orthogonal",
    "sample_constraint_manifold",
    "solve_manifold",
    "DEFAULT_RHO_GRID",
]

ISOSCELES = "isosceles"
PYTHAGOREAN = "pythagorean"

ANGLE_TOL = 1e-12
DEFECT_TOL = 1e-10


class ConsistencyError(RuntimeError):
    """A numerical result contradicts a property every norm satisfies."""


def _default_rho_grid() -> tuple[float, ...]:
    base = [round(0.1 * k, 10) for k in range(41)]
    recip = [round(1.0 / r, 12) for r in base if r > 0 and 1.0 / r <= 4.0]
    return tuple(sorted(set(base) | set(recip)))


DEFAULT_RHO_GRID = _default_rho_grid()


@dataclass(frozen=True)
class OrthoPair:
    x: Vector2
    y: Vector2
    defect: float
    kind: str = ISOSCELES

    def accepted(self, plane: NormedPlane) -> bool:
        scale = 1.0 + plane.norm_uv(*self.x) + plane.norm_uv(*self.y)
        return abs(self.defect) <= DEFECT_TOL * scale


def iso_defect(plane: NormedPlane, x, y) -> float:
    """``||x + y|| - ||x - y||``; zero iff x is isosceles-orthogonal to y."""
    xu, xv = x
    yu, yv = y
    return plane.norm_uv(xu + yu, xv + yv) - plane.norm_uv(xu - yu, xv - yv)


def pyth_defect(plane: NormedPlane, x, y) -> float:
    """``||x - y||^2 - ||x||^2 - ||y||^2``; zero iff x is Pythagorean-orthogonal to y."""
    xu, xv = x
    yu, yv = y
    return plane.norm_uv(xu - yu, xv - yv) ** 2 - plane.norm_uv(xu, xv) ** 2 - plane.norm_uv(yu, yv) ** 2


@dataclass
class ManifoldSample:
    """Flat arrays describing solved pairs ``(x, y)`` with ``||x|| = 1``.

    ``ix``/``ir`` index into the theta-x and rho grids that produced each
    pair; ``theta_y`` is the Euclidean angle of ``y`` in ``[0, 2*pi)``.
    """

    ix: np.ndarray
    ir: np.ndarray
    theta_y: np.ndarray
    X: np.ndarray
    Y: np.ndarray


def _half_turn(plane: NormedPlane, n_scan: int):
    J = max(n_scan // 2, 4)
    th = np.linspace(0.0, math.pi, J + 1)
    W = plane.unit(th)
    W[-1] = -W[0]
    return th, W


def solve_manifold(
    plane: NormedPlane,
    thetas_x: Sequence[float],
    rhos: Sequence[float],
    n_scan: int = 720,
    chunk: int = 1500,
) -> ManifoldSample:
    """Solve ``x(theta) _|_I y`` with ``||y|| = rho`` for every grid combination.

    ``rho = 0`` yields the single pair ``(x, 0)``.  Output is ordered by
    (theta-x index, rho index, theta-y).
    """
    thetas_x = np.asarray(thetas_x, dtype=float)
    rhos = np.asarray(rhos, dtype=float)
    if np.any(rhos < 0) or not np.all(np.isfinite(rhos)):
        raise ValueError("rho values must be finite and non-negative")
    Xu = plane.unit(thetas_x)
    th, W = _half_turn(plane, n_scan)

    gi, gr = np.meshgrid(np.arange(thetas_x.size), np.arange(rhos.size), indexing="ij")
    gi = gi.ravel()
    gr = gr.ravel()
    pos = rhos[gr] > 0

    out_i, out_r, out_t, out_Y = [], [], [], []
    # rho = 0: the zero vector is orthogonal to everything
    zi, zr = gi[~pos], gr[~pos]
    out_i.append(zi)
    out_r.append(zr)
    out_t.append(np.zeros(zi.size))
    out_Y.append(np.zeros((zi.size, 2)))

    pi_, pr_ = gi[pos], gr[pos]
    for s in range(0, pi_.size, chunk):
        ci, cr = pi_[s : s + chunk], pr_[s : s + chunk]
        X = Xu[ci]
        R = rhos[cr]
        RW = R[:, None, None] * W[None, :, :]
        D = plane.norm(X[:, None, :] + RW) - plane.norm(X[:, None, :] - RW)
        rows, cols, exact = scan_brackets(D)
        theta = th[cols].copy()
        Y = R[rows, None] * W[cols]
        b = ~exact
        if np.any(b):
            br = rows[b]

            def defect(t, active, br=br, X=X, R=R):
                k = br[active]
                y = R[k, None] * plane.unit(t)
                return plane.norm(X[k] + y) - plane.norm(X[k] - y)

            tb = bisect_brackets(defect, th[cols[b]], th[cols[b] + 1], D[br, cols[b]], xtol=ANGLE_TOL)
            theta[b] = tb
            Y[b] = R[br, None] * plane.unit(tb)
        # antipodal roots by exact negation
        out_i.extend([ci[rows], ci[rows]])
        out_r.extend([cr[rows], cr[rows]])
        out_t.extend([theta, theta + math.pi])
        out_Y.extend([Y, -Y])

    ix = np.concatenate(out_i)
    ir = np.concatenate(out_r)
    ty = np.concatenate(out_t)
    Y = np.concatenate(out_Y)
    order = np.lexsort((ty, ir, ix))
    ix, ir, ty, Y = ix[order], ir[order], ty[order], Y[order]
    return ManifoldSample(ix, ir, ty, Xu[ix], Y)


def find_iso_orthogonal(plane: NormedPlane, x, rho: float, n_scan: int = 720) -> list[Vector2]:
    """All ``y`` with ``||y|| = rho`` isosceles-orthogonal to the unit vector ``x``.

    Solutions are sorted by Euclidean angle and closed under negation.
    """
    x = Vector2(*x)
    if abs(plane.norm_uv(*x) - 1.0) > 1e-10:
        raise ValueError("x must be a unit vector")
    if rho < 0:
        raise ValueError("rho must be non-negative")
    if rho == 0:
        return [Vector2(0.0, 0.0)]
    X = np.array([list(x)])
    th, W = _half_turn(plane, n_scan)
    RW = rho * W
    D = plane.norm(X + RW) - plane.norm(X - RW)
    rows, cols, exact = scan_brackets(D[None, :])
    if cols.size == 0:
        raise ConsistencyError(f"no isosceles-orthogonal direction found for x={x}, rho={rho}")
    theta = th[cols].copy()
    Y = rho * W[cols]
    b = ~exact
    if np.any(b):

        def defect(t, active):
            y = rho * plane.unit(t)
            return plane.norm(X + y) - plane.norm(X - y)

        theta[b] = bisect_brackets(defect, th[cols[b]], th[cols[b] + 1], D[cols[b]], xtol=ANGLE_TOL)
        Y[b] = rho * plane.unit(theta[b])
    ang = np.concatenate([theta, theta + math.pi])
    Y = np.concatenate([Y, -Y])
    order = np.argsort(ang, kind="stable")
    return [Vector2(float(a), float(b)) for a, b in Y[order]]


def sample_constraint_manifold(
    plane: NormedPlane, n_theta: int, rho_grid: Sequence[float], n_scan: int = 720
) -> list[OrthoPair]:
    """Feasible pairs of the isosceles-constrained supremum.

    Unit ``x`` on an ``n_theta`` grid over the full turn, every ``rho`` in
    ``rho_grid``, plus the degenerate family ``x = 0``.
    """
    if n_theta < 90:
        raise ValueError("n_theta must be at least 90")
    thetas = 2 * math.pi * np.arange(n_theta) / n_theta
    m = solve_manifold(plane, thetas, rho_grid, n_scan)
    S = plane.norm(m.X + m.Y)
    Dm = plane.norm(m.X - m.Y)
    pairs = [
        OrthoPair(Vector2(float(x[0]), float(x[1])), Vector2(float(y[0]), float(y[1])), float(d))
        for x, y, d in zip(m.X, m.Y, S - Dm)
    ]
    for w in plane.unit(thetas):
        pairs.append(OrthoPair(Vector2(0.0, 0.0), Vector2(float(w[0]), float(w[1])), 0.0))
    bad = [p for p in pairs if not p.accepted(plane)]
    if bad:
        raise ConsistencyError(f"{len(bad)} solved pairs violate the defect tolerance, e.g. {bad[0]}")
    return pairs
