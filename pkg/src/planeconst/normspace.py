"""Two-dimensional normed planes.

A plane is built from a declarative :class:`NormSpec` and exposes the norm in
two forms: a vectorized ``norm`` over arrays whose last axis has length 2, and
a scalar ``norm_uv`` used inside the local refinement loops where per-call
numpy overhead dominates.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

P_MAX = 64.0

__all__ = [
    "NormConfigError",
    "Vector2",
    "NormSpec",
    "NormedPlane",
    "ValidationReport",
    "norm",
    "unit_vector",
    "validate_norm",
    "random_polygon_spec",
    "BUILTIN_SPACES",
    "builtin_planes",
]


class NormConfigError(ValueError):
    """Invalid norm description (bad exponent, malformed polygon, ...)."""


@dataclass(frozen=True)
class Vector2:
    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"non-finite vector component in ({self.u}, {self.v})")

    def __add__(self, other: "Vector2") -> "Vector2":
        return Vector2(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "Vector2") -> "Vector2":
        return Vector2(self.u - other.u, self.v - other.v)

    def __neg__(self) -> "Vector2":
        return Vector2(-self.u, -self.v)

    def __mul__(self, s: float) -> "Vector2":
        return Vector2(s * self.u, s * self.v)

    __rmul__ = __mul__

    def __iter__(self):
        yield self.u
        yield self.v

    def __array__(self, dtype=None, copy=None):
        return np.array([self.u, self.v], dtype=dtype or float)

    def is_zero(self) -> bool:
        return self.u == 0.0 and self.v == 0.0

    def angle(self) -> float:
        """Euclidean polar angle in [0, 2*pi); nan for the zero vector."""
        if self.is_zero():
            return math.nan
        return math.atan2(self.v, self.u) % (2 * math.pi)


def _parse_exponent(value, name: str) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        try:
            value = float(value)
        except ValueError:
            raise NormConfigError(f"{name} must be a number or 'inf', got {value!r}")
    if value is None:
        raise NormConfigError(f"missing exponent {name}")
    return float(value)


@dataclass(frozen=True)
class NormSpec:
    """Declarative description of a planar norm.

    ``family`` is one of ``"lp"``, ``"linf"``, ``"lplq"``, ``"polygon"``.
    For ``lplq`` the value ``p = inf`` stands for the max-norm on the
    quadrants where ``u*v >= 0``.
    """

    family: str
    p: float | None = None
    q: float | None = None
    vertices: tuple[tuple[float, float], ...] | None = None

    @classmethod
    def lp(cls, p: float) -> "NormSpec":
        return cls("lp", p=float(p))

    @classmethod
    def euclidean(cls) -> "NormSpec":
        return cls("lp", p=2.0)

    @classmethod
    def linf(cls) -> "NormSpec":
        return cls("linf")

    @classmethod
    def lplq(cls, p: float, q: float) -> "NormSpec":
        return cls("lplq", p=float(p), q=float(q))

    @classmethod
    def polygon(cls, vertices: Iterable[Sequence[float]]) -> "NormSpec":
        return cls("polygon", vertices=tuple((float(a), float(b)) for a, b in vertices))

    @classmethod
    def from_dict(cls, data: dict) -> "NormSpec":
        if not isinstance(data, dict) or "family" not in data:
            raise NormConfigError("norm spec must be an object with a 'family' key")
        family = str(data["family"]).lower()
        if family in ("lp", "euclidean"):
            p = 2.0 if family == "euclidean" else _parse_exponent(data.get("p"), "p")
            if math.isinf(p):
                return cls.linf()
            return cls.lp(p)
        if family == "linf":
            return cls.linf()
        if family == "lplq":
            return cls.lplq(_parse_exponent(data.get("p"), "p"), _parse_exponent(data.get("q"), "q"))
        if family == "polygon":
            verts = data.get("vertices")
            if verts is None:
                if "random_seed" in data:
                    return random_polygon_spec(int(data["random_seed"]))
                raise NormConfigError("polygon spec needs 'vertices'")
            try:
                return cls.polygon(verts)
            except (TypeError, ValueError) as exc:
                raise NormConfigError(f"malformed polygon vertices: {exc}")
        raise NormConfigError(f"unknown norm family {family!r}")

    def to_dict(self) -> dict:
        def exp(x):
            return "inf" if math.isinf(x) else x

        if self.family == "lp":
            return {"family": "lp", "p": exp(self.p)}
        if self.family == "linf":
            return {"family": "linf"}
        if self.family == "lplq":
            return {"family": "lplq", "p": exp(self.p), "q": exp(self.q)}
        return {"family": "polygon", "vertices": [list(v) for v in self.vertices]}

    def default_label(self) -> str:
        if self.family == "lp":
            if self.p == 2.0:
                return "euclidean"
            return f"l{self.p:g}"
        if self.family == "linf":
            return "linf"
        if self.family == "lplq":
            p = "inf" if math.isinf(self.p) else f"{self.p:g}"
            return f"l{p}-l{self.q:g}"
        return f"polygon{len(self.vertices)}"


# --- norm kernels -----------------------------------------------------------


def _lp_array(u, v, p):
    au = np.abs(u)
    av = np.abs(v)
    if p == 1.0:
        return au + av
    if p == 2.0:
        return np.hypot(u, v)
    if math.isinf(p):
        return np.maximum(au, av)
    m = np.maximum(au, av)
    safe = np.where(m > 0, m, 1.0)
    return m * ((au / safe) ** p + (av / safe) ** p) ** (1.0 / p)


def _lp_scalar(u, v, p):
    au = abs(u)
    av = abs(v)
    if p == 1.0:
        return au + av
    if p == 2.0:
        return math.hypot(u, v)
    if math.isinf(p):
        return au if au > av else av
    m = au if au > av else av
    if m == 0.0:
        return 0.0
    return m * ((au / m) ** p + (av / m) ** p) ** (1.0 / p)


def _same_sign(u, v):
    # x1*x2 >= 0 without forming the product (avoids underflow to 0)
    return ((u >= 0) & (v >= 0)) | ((u <= 0) & (v <= 0))


class NormedPlane:
    """A validated planar norm ready for evaluation."""

    def __init__(self, spec: NormSpec, label: str | None = None):
        self.spec = spec
        self.label = label or spec.default_label()
        fam = spec.family
        if fam == "lp":
            p = spec.p
            if p is None or not (1.0 <= p <= P_MAX):
                raise NormConfigError(f"lp exponent must lie in [1, {P_MAX:g}], got {p}")
        elif fam == "linf":
            pass
        elif fam == "lplq":
            p, q = spec.p, spec.q
            if q is None or p is None:
                raise NormConfigError("lplq needs both p and q")
            if not (1.0 <= q <= P_MAX):
                raise NormConfigError(f"lplq q must lie in [1, {P_MAX:g}], got {q}")
            if not (math.isinf(p) or 1.0 <= p <= P_MAX):
                raise NormConfigError(f"lplq p must lie in [1, {P_MAX:g}] or be inf, got {p}")
            if q > p:
                raise NormConfigError(f"lplq requires q <= p, got p={p}, q={q}")
        elif fam == "polygon":
            self._init_polygon(spec.vertices)
        else:
            raise NormConfigError(f"unknown norm family {fam!r}")

    # polygon gauge ----------------------------------------------------------

    def _init_polygon(self, vertices):
        if vertices is None:
            raise NormConfigError("polygon needs vertices")
        V = np.asarray(vertices, dtype=float) + 0.0
        if V.ndim != 2 or V.shape[1] != 2:
            raise NormConfigError("polygon vertices must be (x, y) pairs")
        if not np.all(np.isfinite(V)):
            raise NormConfigError("polygon vertices must be finite")
        n = len(V)
        if n < 4:
            raise NormConfigError(f"polygon needs at least 4 vertices, got {n}")
        scale = float(np.max(np.abs(V)))
        if scale == 0.0 or np.any(np.hypot(V[:, 0], V[:, 1]) <= 1e-12 * scale):
            raise NormConfigError("origin must be strictly interior to the polygon")
        ang = np.arctan2(V[:, 1], V[:, 0])
        order = np.argsort(ang, kind="stable")
        V = V[order]
        W = np.roll(V, -1, axis=0)
        if np.any(V[:, 0] * W[:, 1] - V[:, 1] * W[:, 0] <= 1e-12 * scale * scale):
            raise NormConfigError("origin must be strictly interior to the polygon")
        if n % 2:
            raise NormConfigError("polygon must be symmetric under negation (odd vertex count)")
        h = n // 2
        if not np.allclose(V[h:], -V[:h], rtol=0.0, atol=1e-12 * scale):
            raise NormConfigError("polygon must be symmetric under negation")
        V[h:] = -V[:h]
        # negation can yield -0.0, which atan2 would place at -pi instead of pi
        V += 0.0
        D = np.roll(V, -1, axis=0) - V
        turn = D[:, 0] * np.roll(D, -1, axis=0)[:, 1] - D[:, 1] * np.roll(D, -1, axis=0)[:, 0]
        if np.any(turn <= 1e-12 * scale * scale):
            raise NormConfigError("polygon must be strictly convex (counterclockwise, no collinear vertices)")
        self._V = V
        self._D = D
        self._C = V[:, 0] * D[:, 1] - V[:, 1] * D[:, 0]  # cross(V_i, V_{i+1}) > 0
        self._ang = np.arctan2(V[:, 1], V[:, 0])
        self._ang_list = self._ang.tolist()
        self._rows = [(float(d[0]), float(d[1]), float(c)) for d, c in zip(D, self._C)]

    @property
    def vertices(self) -> np.ndarray:
        return self._V.copy()

    def _polygon_array(self, u, v):
        phi = np.arctan2(v, u)
        idx = np.searchsorted(self._ang, phi, side="right") - 1
        idx = np.where(idx < 0, len(self._ang) - 1, idx)
        d = self._D[idx]
        return (u * d[..., 1] - v * d[..., 0]) / self._C[idx]

    def _polygon_scalar(self, u, v):
        if u == 0.0 and v == 0.0:
            return 0.0
        i = bisect.bisect_right(self._ang_list, math.atan2(v, u)) - 1
        du, dv, c = self._rows[i]  # i == -1 wraps to the last edge
        return (u * dv - v * du) / c

    # public evaluation ------------------------------------------------------

    def norm(self, x) -> np.ndarray:
        """Norm of each row of ``x`` (last axis of length 2)."""
        x = np.asarray(x, dtype=float)
        return self.norm2(x[..., 0], x[..., 1])

    def norm2(self, u, v) -> np.ndarray:
        """Vectorized norm with the two components passed separately."""
        fam = self.spec.family
        if fam == "lp":
            return _lp_array(u, v, self.spec.p)
        if fam == "linf":
            return np.maximum(np.abs(u), np.abs(v))
        if fam == "lplq":
            return np.where(_same_sign(u, v), _lp_array(u, v, self.spec.p), _lp_array(u, v, self.spec.q))
        return self._polygon_array(u, v)

    def norm_uv(self, u: float, v: float) -> float:
        fam = self.spec.family
        if fam == "lp":
            return _lp_scalar(u, v, self.spec.p)
        if fam == "linf":
            au, av = abs(u), abs(v)
            return au if au > av else av
        if fam == "lplq":
            if (u >= 0 and v >= 0) or (u <= 0 and v <= 0):
                return _lp_scalar(u, v, self.spec.p)
            return _lp_scalar(u, v, self.spec.q)
        return self._polygon_scalar(u, v)

    def unit(self, theta) -> np.ndarray:
        """Unit vectors along Euclidean angles ``theta``; shape ``theta.shape + (2,)``."""
        theta = np.asarray(theta, dtype=float)
        w = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return w / self.norm(w)[..., None]

    def unit_uv(self, theta: float) -> tuple[float, float]:
        c = math.cos(theta)
        s = math.sin(theta)
        n = self.norm_uv(c, s)
        return c / n, s / n

    def __repr__(self):
        return f"NormedPlane({self.label!r})"


def norm(plane: NormedPlane, x) -> float:
    """Norm of a single vector."""
    u, v = (float(c) for c in x)
    if not (math.isfinite(u) and math.isfinite(v)):
        raise ValueError("vector components must be finite")
    return plane.norm_uv(u, v)


def unit_vector(plane: NormedPlane, theta: float) -> Vector2:
    """The point of the unit sphere in Euclidean direction ``theta``.

    Angles in [pi, 2*pi) are mapped through exact negation so that
    ``unit_vector(theta + pi) == -unit_vector(theta)`` up to the rounding of
    the angle reduction itself.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    t = math.fmod(theta, 2 * math.pi)
    if t < 0:
        t += 2 * math.pi
    if t >= math.pi:
        u, v = plane.unit_uv(t - math.pi)
        return Vector2(-u, -v)
    return Vector2(*plane.unit_uv(t))


@dataclass
class ValidationReport:
    passed: bool
    samples: int
    counterexample: str | None = None


def validate_norm(plane: NormedPlane, samples: int = 1000, seed: int = 0) -> ValidationReport:
    """Randomized check of homogeneity, symmetry and the triangle inequality."""
    if samples < 100:
        raise ValueError("validate_norm needs at least 100 samples")
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(samples, 2)) * rng.uniform(0.01, 10.0, size=(samples, 1))
    Y = rng.normal(size=(samples, 2)) * rng.uniform(0.01, 10.0, size=(samples, 1))
    lam = rng.uniform(-5.0, 5.0, size=samples)
    nx = plane.norm(X)
    ny = plane.norm(Y)
    checks = [
        ("homogeneity", np.abs(plane.norm(lam[:, None] * X) - np.abs(lam) * nx) > 1e-10 * (1 + nx)),
        ("symmetry", plane.norm(-X) != nx),
        ("triangle", plane.norm(X + Y) > nx + ny + 1e-10),
        ("positivity", nx <= 0),
    ]
    for name, bad in checks:
        if np.any(bad):
            i = int(np.argmax(bad))
            return ValidationReport(
                False, samples, f"{name} fails at x={X[i].tolist()}, y={Y[i].tolist()}, lambda={lam[i]}"
            )
    return ValidationReport(True, samples)


def random_polygon_spec(seed: int, min_half: int = 2, max_half: int = 7) -> NormSpec:
    """A seeded random symmetric convex polygon norm."""
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(seed)
    while True:
        k = int(rng.integers(min_half, max_half + 1))
        ang = np.sort(rng.uniform(0.0, np.pi, size=k))
        rad = rng.uniform(0.6, 1.4, size=k)
        P = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        P = np.vstack([P, -P])
        try:
            hull = ConvexHull(P)
        except Exception:
            continue
        spec = NormSpec.polygon(P[hull.vertices])
        try:
            NormedPlane(spec)
        except NormConfigError:
            continue
        return spec


BUILTIN_SPACES: dict[str, NormSpec] = {
    "euclidean": NormSpec.euclidean(),
    "l1": NormSpec.lp(1),
    "linf": NormSpec.linf(),
    "l2-l1": NormSpec.lplq(2, 1),
    "linf-l1": NormSpec.lplq(math.inf, 1),
    "l3": NormSpec.lp(3),
    "l4": NormSpec.lp(4),
}


def builtin_planes() -> dict[str, NormedPlane]:
    return {name: NormedPlane(spec, name) for name, spec in BUILTIN_SPACES.items()}


def parse_space(text: str) -> NormedPlane:
    """Resolve an alias, ``lp:P``, ``random-polygon:SEED``, inline JSON or a JSON file."""
    s = text.strip()
    key = s.lower()
    if key in BUILTIN_SPACES:
        return NormedPlane(BUILTIN_SPACES[key], key)
    if key.startswith("lp:"):
        spec = NormSpec.from_dict({"family": "lp", "p": key[3:]})
        return NormedPlane(spec)
    if key.startswith("random-polygon:"):
        try:
            seed = int(key.split(":", 1)[1])
        except ValueError:
            raise NormConfigError(f"bad polygon seed in {text!r}")
        return NormedPlane(random_polygon_spec(seed), f"random-polygon-{seed}")
    if s.startswith("{"):
        try:
            data = json.loads(s)
        except json.JSONDecodeError as exc:
            raise NormConfigError(f"invalid JSON norm spec: {exc}")
        return NormedPlane(NormSpec.from_dict(data))
    path = Path(s)
    if path.is_file():
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise NormConfigError(f"invalid JSON in {path}: {exc}")
        return NormedPlane(NormSpec.from_dict(data), data.get("label") if isinstance(data, dict) else None)
    raise NormConfigError(f"unrecognized space {text!r}")
