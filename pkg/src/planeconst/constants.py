"""Witness-backed estimates of the geometric constants of a normed plane.

Every supremum is estimated by a coarse grid over Euclidean angles (and the
norm ratio ``rho`` where relevant) followed by coordinate-wise golden-section
refinement from a few well-separated grid maxima.  The reported value is the
objective evaluated at the reported witness, so a supremum estimate is a
lower bound of the true constant (an upper bound for the modulus of
convexity, which is an infimum).

Objectives are written once against a norm callable ``N(u, v)`` so that the
same formula serves the vectorized grid stage (``plane.norm2``) and the
scalar refinement stage (``plane.norm_uv``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .normspace import NormedPlane, NormSpec, Vector2
from .orthogonality import DEFAULT_RHO_GRID, ConsistencyError, find_iso_orthogonal, solve_manifold
from .search import ZERO_SNAP, bisect_brackets, golden_max, local_root, refine_coordinates, scan_brackets, top_candidates

__all__ = [
    "DomainError",
    "ConstantEstimate",
    "SweepTable",
    "gamma",
    "L_direct",
    "L_via_gamma",
    "L_extended",
    "L_value",
    "cnj",
    "cnj_from_L",
    "cnj_prime",
    "cnj_doubleprime",
    "james",
    "delta",
    "rho",
    "rho1_from_delta",
    "closed_form_L",
    "closed_form_gamma",
    "lower_bound_L",
    "sweep",
    "reevaluate",
    "DEFAULT_GRID",
    "DEFAULT_REFINE_TOL",
]

DEFAULT_GRID = 2000
DEFAULT_REFINE_TOL = 1e-7
DEFAULT_N_THETA = 360
DEFAULT_N_SCAN = 360
N_STARTS = 4
ROUNDS = 3
# values this close count as a tie; ties go to the smallest (theta_x, theta_y, rho)
TIE = 1e-12


class DomainError(ValueError):
    """Parameter outside the domain of the requested constant."""


@dataclass
class ConstantEstimate:
    name: str
    value: float
    witness: tuple
    grid: int
    refine_tol: float
    boundary_flag: bool = False
    detail: dict = field(default_factory=dict)

    def witness_params(self, plane: NormedPlane) -> tuple[float, float, float]:
        """Euclidean angles of the witness vectors and the norm ratio ||y||/||x||."""
        x, y = self.witness[0], self.witness[1]
        nx = plane.norm_uv(*x)
        ny = plane.norm_uv(*y)
        r = ny / nx if nx > 0 else math.inf
        return x.angle(), y.angle(), r

    def to_dict(self) -> dict:
        w = [[v.u, v.v] if isinstance(v, Vector2) else v for v in self.witness]
        return {
            "name": self.name,
            "value": self.value,
            "witness": w,
            "grid": self.grid,
            "refine_tol": self.refine_tol,
            "boundary_flag": self.boundary_flag,
            "detail": self.detail,
        }


@dataclass
class SweepTable:
    constant_name: str
    t_grid: list
    values: list

    def __post_init__(self):
        if len(self.t_grid) != len(self.values):
            raise ValueError("t_grid and values differ in length")
        if any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise ValueError("t_grid must be strictly increasing")

    def series(self) -> np.ndarray:
        return np.array([e.value for e in self.values])


# --- objectives -------------------------------------------------------------


def _obj_gamma(N, xu, xv, yu, yv, t):
    a = N(xu + t * yu, xv + t * yv)
    b = N(xu - t * yu, xv - t * yv)
    return (a * a + b * b) / 2


def _obj_L(N, xu, xv, yu, yv, t):
    s = 1.0 - t
    a = N(t * xu + s * yu, t * xv + s * yv)
    b = N(s * xu + t * yu, s * xv + t * yv)
    c = N(xu + yu, xv + yv)
    return (a * a + b * b) / (c * c)


def _obj_cnj(N, xu, xv, yu, yv, _=None):
    a = N(xu + yu, xv + yv)
    b = N(xu - yu, xv - yv)
    nx = N(xu, xv)
    ny = N(yu, yv)
    return (a * a + b * b) / (2 * (nx * nx + ny * ny))


def _obj_cnj_prime(N, xu, xv, yu, yv, _=None):
    a = N(xu + yu, xv + yv)
    b = N(xu - yu, xv - yv)
    return (a * a + b * b) / 4


def _obj_james(N, xu, xv, yu, yv, _=None):
    return np.minimum(N(xu + yu, xv + yv), N(xu - yu, xv - yv))


def _obj_james_scalar(N, xu, xv, yu, yv, _=None):
    return min(N(xu + yu, xv + yv), N(xu - yu, xv - yv))


def _obj_sum(N, xu, xv, yu, yv, _=None):
    return N(xu + yu, xv + yv)


def _obj_delta(N, xu, xv, yu, yv, _=None):
    return 1.0 - N(xu + yu, xv + yv) / 2


def _obj_rho(N, xu, xv, yu, yv, tau):
    return (N(xu + tau * yu, xv + tau * yv) + N(xu - tau * yu, xv - tau * yv)) / 2 - 1.0


def _obj_cnj_from_L(N, xu, xv, yu, yv, eta):
    return 2 * _obj_L(N, xu, xv, yu, yv, (1 - eta) / 2) / (1 + eta * eta)


def _obj_rho1(N, xu, xv, yu, yv, eps):
    return eps / 2 - _obj_delta(N, xu, xv, yu, yv)


_SCALAR_OBJECTIVES = {
    "gamma": _obj_gamma,
    "L": _obj_L,
    "cnj": _obj_cnj,
    "cnj_prime": _obj_cnj_prime,
    "cnj_doubleprime": _obj_cnj,
    "james": _obj_james_scalar,
    "james_iso": _obj_sum,
    "delta": _obj_delta,
    "rho": _obj_rho,
    "cnj_from_L": _obj_cnj_from_L,
    "rho1_from_delta": _obj_rho1,
}


def reevaluate(plane: NormedPlane, est: ConstantEstimate) -> float:
    """Objective of ``est.name`` recomputed at the estimate's witness."""
    f = _SCALAR_OBJECTIVES[est.name]
    x, y = est.witness[0], est.witness[1]
    param = est.witness[2] if len(est.witness) > 2 else None
    return float(f(plane.norm_uv, x.u, x.v, y.u, y.v, param))


def _vec(p) -> Vector2:
    return Vector2(float(p[0]), float(p[1]))


def _half_grid(grid: int) -> np.ndarray:
    n = max(grid // 2, 2)
    return math.pi * np.arange(n) / n


# --- search over pairs of unit vectors --------------------------------------


def _sup_unit_pairs(plane, name, f_vec, f_scalar, param, grid, refine_tol, chunk=250):
    """Sup of ``f(x, y)`` over unit x, y; f must be invariant under x -> -x and y -> -y."""
    th = _half_grid(grid)
    U = plane.unit(th)
    n = th.size
    vals = np.empty((n, n))
    N2 = plane.norm2
    yu, yv = U[None, :, 0], U[None, :, 1]
    for s in range(0, n, chunk):
        xu, xv = U[s : s + chunk, 0, None], U[s : s + chunk, 1, None]
        vals[s : s + chunk] = f_vec(N2, xu, xv, yu, yv, param)
    step = math.pi / n
    Nuv = plane.norm_uv

    def f(p):
        xu, xv = plane.unit_uv(p[0])
        yu, yv = plane.unit_uv(p[1])
        return f_scalar(Nuv, xu, xv, yu, yv, param)

    best_p, best_v = None, -math.inf
    for i, j in top_candidates(vals, N_STARTS, (True, True)):
        start = [th[i], th[j]]
        p, v = refine_coordinates(f, start, f(start), [step, step], [None, None], ROUNDS, refine_tol)
        p = [a % math.pi for a in p]
        if _better(v, p, best_v, best_p):
            best_p, best_v = p, v
    x = _vec(plane.unit_uv(best_p[0]))
    y = _vec(plane.unit_uv(best_p[1]))
    witness = (x, y) if param is None else (x, y, param)
    return ConstantEstimate(name, float(best_v), witness, grid, refine_tol)


def _better(v, key, best_v, best_key) -> bool:
    """Strictly larger value, or a tie (within TIE) with a lexicographically smaller witness key."""
    if best_key is None or v > best_v + TIE:
        return True
    return abs(v - best_v) <= TIE and tuple(key) < tuple(best_key)


def _check_unit_interval(t, lo, hi, what):
    if not (lo <= t <= hi) or not math.isfinite(t):
        raise DomainError(f"{what} must lie in [{lo}, {hi}], got {t}")


def gamma(plane: NormedPlane, t: float, grid: int = DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL):
    """sup (||x+ty||^2 + ||x-ty||^2)/2 over unit x, y."""
    _check_unit_interval(t, 0.0, 1.0, "t")
    return _sup_unit_pairs(plane, "gamma", _obj_gamma, _obj_gamma, float(t), grid, refine_tol)


def cnj_prime(plane: NormedPlane, grid: int = DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL):
    """Modified von Neumann-Jordan constant: sup (||x+y||^2 + ||x-y||^2)/4 over unit x, y."""
    return _sup_unit_pairs(plane, "cnj_prime", _obj_cnj_prime, _obj_cnj_prime, None, grid, refine_tol)


def rho(plane: NormedPlane, tau: float, grid: int = DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL):
    """Modulus of smoothness at ``tau``."""
    if not (tau >= 0 and math.isfinite(tau)):
        raise DomainError(f"tau must be finite and non-negative, got {tau}")
    return _sup_unit_pairs(plane, "rho", _obj_rho, _obj_rho, float(tau), grid, refine_tol)


# --- search over the isosceles-orthogonality manifold -----------------------


def _sup_manifold(
    plane,
    name,
    f_vec,
    param,
    n_theta,
    rho_grid,
    n_scan,
    refine_tol,
    refine_rho=True,
    degenerate=True,
):
    """Sup of ``f(x, y)`` over ``x _|_I y`` with ``||x|| = 1``, ``||y|| = rho``.

    ``f`` must be invariant under ``(x, y) -> (-x, -y)`` and under joint
    scaling; ``degenerate`` adds the pair ``x = 0`` (scaled so ``||y|| = 1``).
    """
    th = _half_grid(n_theta)
    rho_grid = np.asarray(sorted(set(float(r) for r in rho_grid)))
    m = solve_manifold(plane, th, rho_grid, n_scan)
    N2 = plane.norm2
    vals = f_vec(N2, m.X[:, 0], m.X[:, 1], m.Y[:, 0], m.Y[:, 1], param)
    Nuv = plane.norm_uv
    rho_max = float(rho_grid[-1])
    scan_step = math.pi / max(n_scan // 2, 4)

    candidates = []
    if vals.size:
        finite = np.where(np.isfinite(vals), vals, -np.inf)
        order = np.lexsort((np.arange(vals.size), -finite))
        picked = []
        nth = th.size
        for k in order[: 64 * N_STARTS]:
            if len(picked) >= N_STARTS or not np.isfinite(finite[k]):
                break
            ok = True
            for q in picked:
                dth = abs(int(m.ix[k]) - int(m.ix[q]))
                dth = min(dth, nth - dth)
                if dth < 3 and abs(int(m.ir[k]) - int(m.ir[q])) < 3:
                    ok = False
                    break
            if ok:
                picked.append(k)
        candidates = picked

    best = None  # (value, x, y, theta_x, rho)
    if degenerate:
        w = plane.unit_uv(0.0)
        v0 = f_vec(Nuv, 0.0, 0.0, w[0], w[1], param)
        best = (float(v0), (0.0, 0.0), w, math.nan, math.inf, (math.inf,))

    for k in candidates:
        tx0 = float(th[m.ix[k]])
        r0 = float(rho_grid[m.ir[k]])
        state = {"ty": float(m.theta_y[k]), "best": -math.inf}

        def solve(p, state=state):
            tx, r = p[0], p[1]
            xu, xv = plane.unit_uv(tx)
            if r <= 0.0:
                return f_vec(Nuv, xu, xv, 0.0, 0.0, param), (xu, xv), (0.0, 0.0), state["ty"]

            def d(a):
                yu, yv = plane.unit_uv(a)
                return Nuv(xu + r * yu, xv + r * yv) - Nuv(xu - r * yu, xv - r * yv)

            ty = local_root(d, state["ty"], scan_step / 2, max_expand=16)
            if ty is None:
                return -math.inf, None, None, None
            yu, yv = plane.unit_uv(ty)
            y = (r * yu, r * yv)
            return f_vec(Nuv, xu, xv, y[0], y[1], param), (xu, xv), y, ty

        def f(p, state=state):
            v, _, _, ty = solve(p)
            if v > state["best"]:
                state["best"] = v
                state["ty"] = ty
            return v

        start = [tx0, r0]
        v0 = f(start)
        steps = [math.pi / th.size]
        bounds = [None]
        if refine_rho:
            i = int(m.ir[k])
            lo = rho_grid[max(i - 1, 0)]
            hi = rho_grid[min(i + 1, rho_grid.size - 1)]
            steps.append(max(r0 - lo, hi - r0))
            bounds.append((0.0, rho_max))
        else:
            steps.append(0.0)
            bounds.append((r0, r0))
        p, v = refine_coordinates(f, start, v0, steps, bounds, ROUNDS, refine_tol)
        # re-solve at the accepted point so the witness is exactly the evaluated pair
        state["best"] = -math.inf
        v, x, y, ty = solve(p)
        if x is None:
            continue
        key = (p[0] % math.pi, ty % (2 * math.pi), p[1])
        if best is None or _better(v, key, best[0], best[5]):
            best = (float(v), x, y, p[0], p[1], key)

    if best is None:
        raise ConsistencyError(f"{name}: the isosceles manifold produced no feasible pair")
    value, x, y, _, r, _ = best
    boundary = bool(r >= rho_max and math.isfinite(r))
    witness = (_vec(x), _vec(y)) if param is None else (_vec(x), _vec(y), param)
    # isosceles defect at the witness must respect the pair tolerance
    sx = Nuv(*witness[0])
    sy = Nuv(*witness[1])
    dfc = Nuv(x[0] + y[0], x[1] + y[1]) - Nuv(x[0] - y[0], x[1] - y[1])
    if abs(dfc) > 1e-10 * (1 + sx + sy):
        raise ConsistencyError(f"{name}: refined witness violates the orthogonality tolerance ({dfc:g})")
    return ConstantEstimate(name, value, witness, n_theta, refine_tol, boundary)


def _L_search(plane, t, n_theta, rho_grid, n_scan, refine_tol):
    return _sup_manifold(plane, "L", _obj_L, float(t), n_theta, rho_grid, n_scan, refine_tol)


def L_direct(
    plane: NormedPlane,
    t: float,
    n_theta: int = DEFAULT_N_THETA,
    rho_grid: Sequence[float] = DEFAULT_RHO_GRID,
    n_scan: int = DEFAULT_N_SCAN,
    refine_tol: float = DEFAULT_REFINE_TOL,
):
    """The symmetric-form constant from its definition as an isosceles-constrained sup.

    At ``t = 0.5`` every admissible ratio equals 1/2, and the value 0.5 is
    returned exactly.
    """
    _check_unit_interval(t, 0.0, 0.5, "t")
    if t == 0.5:
        x = Vector2(*plane.unit_uv(0.0))
        y = find_iso_orthogonal(plane, x, 1.0)[0]
        return ConstantEstimate("L", 0.5, (x, y, 0.5), n_theta, refine_tol)
    return _L_search(plane, t, n_theta, rho_grid, n_scan, refine_tol)


def L_extended(
    plane: NormedPlane,
    t: float,
    n_theta: int = DEFAULT_N_THETA,
    rho_grid: Sequence[float] = DEFAULT_RHO_GRID,
    n_scan: int = DEFAULT_N_SCAN,
    refine_tol: float = DEFAULT_REFINE_TOL,
):
    """The same isosceles-constrained sup for ``t`` in (1/2, 1]."""
    if not (0.5 < t <= 1.0):
        raise DomainError(f"L_extended needs t in (0.5, 1], got {t}")
    return _L_search(plane, t, n_theta, rho_grid, n_scan, refine_tol)


def L_value(plane: NormedPlane, t: float, **kw) -> ConstantEstimate:
    """Dispatch on ``t`` over [0, 1]: direct search, the t = 1/2 extension, or the extended range."""
    if t > 0.5:
        return L_extended(plane, t, **kw)
    return L_direct(plane, t, **kw)


def L_via_gamma(plane: NormedPlane, t: float, grid: int = DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL):
    """Half of gamma(1 - 2t), with the witness mapped to an isosceles pair.

    For unit ``x, y`` the pair ``((x+y)/2, (x-y)/2)`` is isosceles-orthogonal
    and its L-ratio at ``t`` equals half the gamma objective at ``1 - 2t``.
    """
    _check_unit_interval(t, 0.0, 0.5, "t")
    g = gamma(plane, 1.0 - 2.0 * t, grid, refine_tol)
    x, y = g.witness[0], g.witness[1]
    a = Vector2((x.u + y.u) / 2, (x.v + y.v) / 2)
    b = Vector2((x.u - y.u) / 2, (x.v - y.v) / 2)
    return ConstantEstimate("L", g.value / 2, (a, b, float(t)), grid, refine_tol, detail={"gamma": g.value})


def cnj_doubleprime(
    plane: NormedPlane,
    n_theta: int = DEFAULT_N_THETA,
    rho_grid: Sequence[float] = DEFAULT_RHO_GRID,
    n_scan: int = DEFAULT_N_SCAN,
    refine_tol: float = DEFAULT_REFINE_TOL,
):
    """The von Neumann-Jordan ratio restricted to isosceles-orthogonal pairs."""
    return _sup_manifold(plane, "cnj_doubleprime", _obj_cnj, None, n_theta, rho_grid, n_scan, refine_tol)


def james(
    plane: NormedPlane,
    grid: int = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
    n_scan: int = 720,
):
    """James constant, computed as a min-form sup and as an isosceles-form sup.

    The returned value and witness come from the min form; the isosceles form
    is kept in ``detail["iso_form"]``.  The two must agree to 2e-3.
    """
    e1 = _sup_unit_pairs(plane, "james", _obj_james, _obj_james_scalar, None, grid, refine_tol)
    e2 = _sup_manifold(
        plane, "james_iso", _obj_sum, None, grid, [1.0], n_scan, refine_tol, refine_rho=False, degenerate=False
    )
    if abs(e1.value - e2.value) > 2e-3:
        raise ConsistencyError(f"james: min form {e1.value:.6f} and isosceles form {e2.value:.6f} disagree")
    e1.detail["iso_form"] = e2.value
    e1.detail["iso_witness"] = [[e2.witness[0].u, e2.witness[0].v], [e2.witness[1].u, e2.witness[1].v]]
    return e1


# --- von Neumann-Jordan constant --------------------------------------------


def cnj(
    plane: NormedPlane,
    grid: int = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
    n_rho: int = 21,
    chunk: int = 250,
):
    """von Neumann-Jordan constant over (theta_x, theta_y, rho), rho = ||y||/||x|| in [0, 1]."""
    th = _half_grid(grid)
    U = plane.unit(th)
    n = th.size
    rs = np.linspace(0.0, 1.0, n_rho)
    N2 = plane.norm2
    # per-rho slices keep memory at O(n^2); candidates are merged afterwards
    pool = []
    for ir, r in enumerate(rs):
        vals = np.empty((n, n))
        yu, yv = r * U[None, :, 0], r * U[None, :, 1]
        for s in range(0, n, chunk):
            xu, xv = U[s : s + chunk, 0, None], U[s : s + chunk, 1, None]
            vals[s : s + chunk] = _obj_cnj(N2, xu, xv, yu, yv)
        for i, j in top_candidates(vals, N_STARTS, (True, True)):
            pool.append((-float(vals[i, j]), i, j, ir))
    pool.sort()
    chosen = []
    for c in pool:
        if len(chosen) >= N_STARTS:
            break
        if all(max(_circ(c[1], d[1], n), _circ(c[2], d[2], n), abs(c[3] - d[3])) >= 3 for d in chosen):
            chosen.append(c)

    Nuv = plane.norm_uv

    def f(p):
        xu, xv = plane.unit_uv(p[0])
        yu, yv = plane.unit_uv(p[1])
        r = p[2]
        return _obj_cnj(Nuv, xu, xv, r * yu, r * yv)

    step = math.pi / n
    dr = rs[1] - rs[0] if n_rho > 1 else 1.0
    best_p, best_v = None, -math.inf
    for _, i, j, ir in chosen:
        start = [th[i], th[j], rs[ir]]
        p, v = refine_coordinates(f, start, f(start), [step, step, dr], [None, None, (0.0, 1.0)], ROUNDS, refine_tol)
        if v > best_v:
            best_p, best_v = p, v
    x = _vec(plane.unit_uv(best_p[0]))
    yu, yv = plane.unit_uv(best_p[1])
    y = Vector2(best_p[2] * yu, best_p[2] * yv)
    est = ConstantEstimate("cnj", float(best_v), (x, y), grid, refine_tol)
    est.value = reevaluate(plane, est)
    return est


def _circ(a, b, n):
    d = abs(a - b)
    return min(d, n - d)


def cnj_from_L(
    plane: NormedPlane,
    eta_grid: Sequence[float] | None = None,
    grid: int = 720,
    refine_tol: float = 1e-6,
):
    """von Neumann-Jordan constant as sup over eta of 2 L((1 - eta)/2) / (1 + eta^2).

    L is taken through the gamma identity; the best grid eta is polished by
    golden-section search on its neighbouring cells.
    """
    if eta_grid is None:
        eta_grid = np.linspace(0.0, 1.0, 21)
    etas = np.asarray(sorted(set(float(e) for e in eta_grid)))
    if etas[0] != 0.0 or etas[-1] != 1.0:
        raise DomainError("eta_grid must include both endpoints 0 and 1")
    cache = {}

    def h(eta):
        if eta not in cache:
            Le = L_via_gamma(plane, (1.0 - eta) / 2, grid, refine_tol)
            cache[eta] = (2 * Le.value / (1 + eta * eta), Le)
        return cache[eta][0]

    vals = [h(e) for e in etas]
    k = int(np.argmax(vals))
    lo = etas[max(k - 1, 0)]
    hi = etas[min(k + 1, etas.size - 1)]
    e_star, v_star = golden_max(lambda e: h(min(max(e, 0.0), 1.0)), lo, hi, refine_tol)
    if v_star <= vals[k]:
        e_star, v_star = float(etas[k]), vals[k]
    Le = cache[e_star][1]
    a, b = Le.witness[0], Le.witness[1]
    est = ConstantEstimate("cnj_from_L", float(v_star), (a, b, float(e_star)), grid, refine_tol)
    est.value = reevaluate(plane, est)
    return est


# --- modulus of convexity ---------------------------------------------------


def delta(plane: NormedPlane, eps: float, grid: int = DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL, chunk=250):
    """Modulus of convexity: inf 1 - ||x+y||/2 over unit x, y with ||x - y|| = eps.

    The equality constraint is solved for y given x by bisection; y is
    sought counterclockwise of x, which together with (x, y) -> (-x, -y)
    and the swap (x, y) -> (y, x) covers every pair.
    """
    _check_unit_interval(eps, 0.0, 2.0, "eps")
    eps = float(eps)
    th = _half_grid(grid)
    n = th.size
    s = np.linspace(0.0, math.pi, n + 1)
    U = plane.unit(th)
    N2 = plane.norm2
    cand_rows, cand_s, cand_v = [], [], []
    for a in range(0, n, chunk):
        X = U[a : a + chunk]
        A = th[a : a + chunk, None] + s[None, :]
        W = plane.unit(A)
        W[:, -1] = -X
        D = N2(X[:, None, 0] - W[..., 0], X[:, None, 1] - W[..., 1]) - eps
        rows, cols, exact = scan_brackets(D)
        # y = -x sits on the last column, which the bracket scan only uses as an end point
        last = np.nonzero(np.abs(D[:, -1]) <= ZERO_SNAP)[0]
        rows = np.concatenate([rows, last])
        cols = np.concatenate([cols, np.full(last.size, n)])
        exact = np.concatenate([exact, np.ones(last.size, bool)])
        sr = s[cols].copy()
        b = ~exact
        if np.any(b):
            br = rows[b]

            def dfun(sv, active, br=br, X=X, a=a):
                k = br[active]
                w = plane.unit(th[a + k] + sv)
                return N2(X[k, 0] - w[:, 0], X[k, 1] - w[:, 1]) - eps

            sr[b] = bisect_brackets(dfun, s[cols[b]], s[cols[b] + 1], D[br, cols[b]], xtol=1e-12)
        Y = plane.unit(th[a + rows] + sr)
        at_pi = exact & (cols == n)
        Y[at_pi] = -X[rows[at_pi]]
        v = _obj_delta(N2, X[rows, 0], X[rows, 1], Y[:, 0], Y[:, 1])
        cand_rows.append(a + rows)
        cand_s.append(sr)
        cand_v.append(v)
    rows = np.concatenate(cand_rows)
    sr = np.concatenate(cand_s)
    v = np.concatenate(cand_v)
    if v.size == 0:
        raise ConsistencyError(f"delta: no pair with ||x - y|| = {eps} found")

    order = np.lexsort((sr, rows, v))
    picked = []
    for k in order[: 64 * N_STARTS]:
        if len(picked) >= N_STARTS:
            break
        if all(_circ(int(rows[k]), int(rows[q]), n) >= 3 for q in picked):
            picked.append(k)

    Nuv = plane.norm_uv
    step = math.pi / n

    def pair(tx, sv):
        xu, xv = plane.unit_uv(tx)
        if sv >= math.pi:
            return (xu, xv), (-xu, -xv)
        return (xu, xv), plane.unit_uv(tx + sv)

    best = None
    for k in picked:
        state = {"s": float(sr[k]), "best": -math.inf}

        def solve(p, state=state):
            tx = p[0]
            xu, xv = plane.unit_uv(tx)

            def g(sv):
                (xu_, xv_), (yu, yv) = pair(tx, sv)
                return Nuv(xu_ - yu, xv_ - yv) - eps

            sv = local_root(g, state["s"], step / 2, max_expand=16)
            if sv is None:
                return -math.inf, None, None, None
            x, y = pair(tx, sv)
            return -_obj_delta(Nuv, x[0], x[1], y[0], y[1]), x, y, sv

        def f(p, state=state):
            val, _, _, sv = solve(p)
            if val > state["best"]:
                state["best"] = val
                state["s"] = sv
            return val

        start = [float(th[rows[k]])]
        p, _ = refine_coordinates(f, start, f(start), [step], [None], ROUNDS, refine_tol)
        state["best"] = -math.inf
        val, x, y, _ = solve(p)
        if x is None:
            continue
        if best is None or val > best[0]:
            best = (val, x, y)
    if best is None:
        raise ConsistencyError(f"delta: refinement lost the constraint at eps = {eps}")
    _, x, y = best
    est = ConstantEstimate("delta", 0.0, (_vec(x), _vec(y), eps), grid, refine_tol)
    est.value = reevaluate(plane, est)
    return est


def rho1_from_delta(
    plane: NormedPlane,
    eps_grid: Sequence[float] | None = None,
    grid: int = 720,
    refine_tol: float = 1e-6,
):
    """Modulus of smoothness at 1 as sup over eps of eps/2 - delta(eps)."""
    if eps_grid is None:
        eps_grid = np.linspace(0.0, 2.0, 41)
    eps_grid = np.asarray(sorted(set(float(e) for e in eps_grid)))
    cache = {}

    def h(e):
        if e not in cache:
            d = delta(plane, e, grid, refine_tol)
            cache[e] = (e / 2 - d.value, d)
        return cache[e][0]

    vals = [h(e) for e in eps_grid]
    k = int(np.argmax(vals))
    lo = eps_grid[max(k - 1, 0)]
    hi = eps_grid[min(k + 1, eps_grid.size - 1)]
    e_star, v_star = golden_max(lambda e: h(min(max(e, 0.0), 2.0)), lo, hi, refine_tol)
    if v_star <= vals[k]:
        e_star = float(eps_grid[k])
    d = cache[e_star][1]
    est = ConstantEstimate("rho1_from_delta", 0.0, (d.witness[0], d.witness[1], float(e_star)), grid, refine_tol)
    est.value = reevaluate(plane, est)
    return est


# --- closed forms -----------------------------------------------------------


def _spec_of(obj) -> NormSpec:
    return obj.spec if isinstance(obj, NormedPlane) else obj


def _canonical(spec: NormSpec):
    """Reduce a spec to ('l1' | 'linf' | ('lp', p) | ('lplq', p, q) | None)."""
    if spec.family == "linf":
        return "linf"
    if spec.family == "lp":
        return "l1" if spec.p == 1.0 else ("lp", spec.p)
    if spec.family == "lplq":
        if spec.p == spec.q:
            return _canonical(NormSpec.lp(spec.p) if math.isfinite(spec.p) else NormSpec.linf())
        return ("lplq", spec.p, spec.q)
    return None


def closed_form_L(family, t: float):
    """Known exact value of L at ``t`` in [0, 1], or None.

    Values for ``t > 1/2`` use the symmetry ``L(t) = L(1 - t)``.
    """
    if t > 0.5:
        t = 1.0 - t
    c = _canonical(_spec_of(family))
    if c in ("l1", "linf"):
        return 2 * t * t - 4 * t + 2
    if isinstance(c, tuple) and c[0] == "lp" and c[1] >= 2:
        p = c[1]
        return 2 ** (1 - 2 / p) * ((1 - t) ** p + t**p) ** (2 / p)
    if c == ("lplq", 2.0, 1.0):
        return 2 * t * t - 3 * t + 1.5
    if isinstance(c, tuple) and c[0] == "lplq" and math.isinf(c[1]) and c[2] == 1.0:
        return (4 * t * t - 8 * t + 5) / 4
    return None


def closed_form_gamma(family, t: float):
    """Known exact value of gamma at ``t`` in [0, 1], or None."""
    c = _canonical(_spec_of(family))
    if c in ("l1", "linf"):
        return (1 + t) ** 2
    if isinstance(c, tuple) and c[0] == "lp" and c[1] >= 2:
        p = c[1]
        return (((1 + t) ** p + (1 - t) ** p) / 2) ** (2 / p)
    if c == ("lplq", 2.0, 1.0):
        return 1 + t + t * t
    if isinstance(c, tuple) and c[0] == "lplq" and math.isinf(c[1]) and c[2] == 1.0:
        return (1 + (1 + t) ** 2) / 2
    return None


def lower_bound_L(family, t: float):
    """Known lower bound for L at ``t`` in [0, 1/2) where no exact value is known.

    Covers lp with 1 < p < 2 and lp-lq with finite p.
    """
    c = _canonical(_spec_of(family))
    if isinstance(c, tuple) and c[0] == "lp" and c[1] < 2:
        p = c[1]
        return 2 ** (1 - 2 / p) * ((1 - t) ** p + t**p) ** (2 / p)
    if isinstance(c, tuple) and c[0] == "lplq" and math.isfinite(c[1]):
        p, q = c[1], c[2]
        k = 2 ** (1 / p - 1 / q)
        a = 1 + k - 2 * k * t
        b = 1 - k + 2 * k * t
        return 2 ** (-1 - 2 / p) * (a**p + b**p) ** (2 / p)
    return None


# --- sweeps -----------------------------------------------------------------

SWEEPABLE = ("L", "L_gamma", "gamma", "delta", "rho")


def _one(plane, name, t, kw):
    if name == "L":
        return L_value(plane, t, **{k: kw[k] for k in ("n_theta", "rho_grid", "n_scan", "refine_tol") if k in kw})
    g = {k: kw[k] for k in ("grid", "refine_tol") if k in kw}
    if name == "L_gamma":
        return L_via_gamma(plane, t, **g)
    if name == "gamma":
        return gamma(plane, t, **g)
    if name == "delta":
        return delta(plane, t, **g)
    if name == "rho":
        return rho(plane, t, **g)
    raise DomainError(f"cannot sweep {name!r}; choose one of {', '.join(SWEEPABLE)}")


def sweep(plane: NormedPlane, constant_name: str, t_grid: Sequence[float], **kw) -> SweepTable:
    """Evaluate a parameterized constant along ``t_grid`` (in order)."""
    t_grid = [float(t) for t in t_grid]
    if not t_grid:
        raise DomainError("empty or degenerate grid")
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise DomainError("t grid must be strictly increasing")
    if constant_name not in SWEEPABLE:
        raise DomainError(f"cannot sweep {constant_name!r}; choose one of {', '.join(SWEEPABLE)}")
    values = [_one(plane, constant_name, t, kw) for t in t_grid]
    return SweepTable(constant_name, t_grid, values)
