"""Geometric-property certificates, inequality audits and space reports.

Certificates are one-sided unless a converse is available: a failed
sufficient condition gives ``Inconclusive``, never ``RefutedAtTolerance``.
Strict inequalities must hold by ``STRICT_MARGIN``; numerical equality is
judged at ``EQUAL_TOL``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from . import constants as C
from .normspace import NormedPlane, validate_norm

STRICT_MARGIN = 5e-3
EQUAL_TOL = 2e-3
BOUND_SLACK = 2e-3
ROUTE_TOL = 5e-3
# delta estimates of flat planes come out at rounding level
DELTA_POSITIVE = 1e-6

CERTIFIED = "Certified"
INCONCLUSIVE = "Inconclusive"
REFUTED = "RefutedAtTolerance"

PROPERTIES = (
    "Hilbert",
    "UniformlyNonSquare",
    "UniformNormalStructure",
    "NormalStructure",
    "NotUniformlyConvex",
    "NotStrictlyConvex",
    "UniformSmoothnessIndication",
)

T_PROBE = (0.0, 0.1, 0.2, 0.3, 0.4)
T_STANDARD = tuple(round(0.05 * k, 10) for k in range(10))
GAMMA_GRID = tuple(round(0.1 * k, 10) for k in range(11))
EPS_PROBE = (0.5, 1.0, 1.5, 2.0)
T_TAIL = (0.45, 0.475, 0.4875, 0.49375)


def hilbert_floor(t):
    return 2 * t * t - 2 * t + 1


def square_ceiling(t):
    return 2 * t * t - 4 * t + 2


def uns_threshold(t):
    return (4 * t * t - 8 * t + 5) / 4


def ns_threshold(t):
    return 9 * (1 - 2 * t) ** 2 / 8


@dataclass
class Certificate:
    property: str
    verdict: str
    evidence: str
    margin: float
    estimates: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if self.property not in PROPERTIES:
            raise ValueError(f"unknown property {self.property!r}")
        if self.verdict not in (CERTIFIED, INCONCLUSIVE, REFUTED):
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "margin": self.margin,
            "evidence": self.evidence,
            "estimates": list(self.estimates),
            "warnings": list(self.warnings),
        }


@dataclass
class InequalityResult:
    name: str
    t: float
    eps: float | None
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        """rhs - lhs; negative means the inequality fails."""
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin >= -BOUND_SLACK

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "t": self.t,
            "eps": self.eps,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
        }


@dataclass
class AnalysisConfig:
    grid: int = C.DEFAULT_GRID
    refine_tol: float = C.DEFAULT_REFINE_TOL
    n_theta: int = C.DEFAULT_N_THETA
    n_scan: int = C.DEFAULT_N_SCAN
    t_probe: tuple = T_PROBE
    eps_probe: tuple = EPS_PROBE
    t_tail: tuple = T_TAIL
    validation_samples: int = 1000


class EstimateBook:
    """Memoized estimates for one plane, keyed by a readable label such as ``L(0.25)``."""

    def __init__(self, plane: NormedPlane, config: AnalysisConfig | None = None):
        self.plane = plane
        self.config = config or AnalysisConfig()
        self.entries: dict[str, C.ConstantEstimate] = {}

    def _get(self, key, make):
        if key not in self.entries:
            self.entries[key] = make()
        return self.entries[key]

    def _m(self):
        c = self.config
        return {"n_theta": c.n_theta, "n_scan": c.n_scan, "refine_tol": c.refine_tol}

    def _g(self):
        return {"grid": self.config.grid, "refine_tol": self.config.refine_tol}

    def L(self, t: float) -> C.ConstantEstimate:
        return self._get(f"L({t:g})", lambda: C.L_value(self.plane, t, **self._m()))

    def L_gamma(self, t: float) -> C.ConstantEstimate:
        return self._get(f"L_via_gamma({t:g})", lambda: C.L_via_gamma(self.plane, t, **self._g()))

    def gamma(self, t: float) -> C.ConstantEstimate:
        return self._get(f"gamma({t:g})", lambda: C.gamma(self.plane, t, **self._g()))

    def delta(self, eps: float) -> C.ConstantEstimate:
        return self._get(f"delta({eps:g})", lambda: C.delta(self.plane, eps, **self._g()))

    def rho(self, tau: float) -> C.ConstantEstimate:
        return self._get(f"rho({tau:g})", lambda: C.rho(self.plane, tau, **self._g()))

    def cnj(self):
        return self._get("cnj", lambda: C.cnj(self.plane, **self._g()))

    def cnj_from_L(self):
        return self._get("cnj_from_L", lambda: C.cnj_from_L(self.plane))

    def cnj_prime(self):
        return self._get("cnj_prime", lambda: C.cnj_prime(self.plane, **self._g()))

    def cnj_doubleprime(self):
        return self._get("cnj_doubleprime", lambda: C.cnj_doubleprime(self.plane, **self._m()))

    def james(self):
        return self._get("james", lambda: C.james(self.plane, **self._g()))

    def rho1_from_delta(self):
        return self._get("rho1_from_delta", lambda: C.rho1_from_delta(self.plane))


def _book(plane, book):
    return book if book is not None else EstimateBook(plane)


def _probes(t_probe, hi=0.5):
    t_probe = [float(t) for t in t_probe]
    if not t_probe:
        raise C.DomainError("probe list is empty")
    for t in t_probe:
        if not (0.0 <= t < hi):
            raise C.DomainError(f"probe t={t} outside [0, {hi})")
    return t_probe


def hilbert_test(plane: NormedPlane, t_probe: Sequence[float], book: EstimateBook | None = None) -> Certificate:
    """Hilbert characterization: L equals the Hilbert floor at some t exactly when the plane is Euclidean-like.

    Because the characterization is an equivalence, a clear excess over the
    floor refutes the property.
    """
    book = _book(plane, book)
    ts = _probes(t_probe)
    excess = [(t, book.L(t).value - hilbert_floor(t)) for t in ts]
    keys = [f"L({t:g})" for t in ts]
    worst_t, worst = max(excess, key=lambda p: abs(p[1]))
    if all(abs(e) <= EQUAL_TOL for _, e in excess):
        return Certificate(
            "Hilbert",
            CERTIFIED,
            f"L(t) matches 2t^2-2t+1 within {EQUAL_TOL:g} at t in {ts}; largest deviation {worst:.3e} at t={worst_t:g}",
            EQUAL_TOL - abs(worst),
            keys,
        )
    top_t, top = max(excess, key=lambda p: p[1])
    if top > STRICT_MARGIN:
        return Certificate(
            "Hilbert",
            REFUTED,
            f"L({top_t:g}) exceeds 2t^2-2t+1 by {top:.6f}; the floor is attained only by inner-product planes",
            top,
            keys,
        )
    return Certificate(
        "Hilbert", INCONCLUSIVE, f"largest excess over the Hilbert floor is {top:.3e}, inside the gap", top, keys
    )


def nonsquare_test(plane: NormedPlane, t_probe: Sequence[float], book: EstimateBook | None = None) -> Certificate:
    """Uniform non-squareness from the gap below the 2t^2-4t+2 ceiling.

    A gap at one probe certifies; touching the ceiling at every probe refutes
    (non-square planes attain it, and in finite dimension the converse holds).
    James and von Neumann-Jordan values are used as cross-checks only.
    """
    book = _book(plane, book)
    ts = _probes(t_probe)
    gaps = [(t, square_ceiling(t) - book.L(t).value) for t in ts]
    keys = [f"L({t:g})" for t in ts] + ["james", "cnj"]
    J = book.james().value
    cnj = book.cnj().value
    best_t, best = max(gaps, key=lambda p: p[1])
    warnings = []
    if best > STRICT_MARGIN:
        verdict = CERTIFIED
        ev = f"L({best_t:g}) lies {best:.6f} below 2t^2-4t+2"
        margin = best
        if J >= 2 - EQUAL_TOL or cnj >= 2 - EQUAL_TOL:
            warnings.append(f"cross-check disagrees: J={J:.6f}, C_NJ={cnj:.6f} sit at 2")
    elif all(abs(g) <= EQUAL_TOL for _, g in gaps):
        verdict = REFUTED
        margin = max(abs(g) for _, g in gaps)
        ev = f"L(t) equals 2t^2-4t+2 within {EQUAL_TOL:g} at every probe; finite-dimensional converse applies"
        if J < 2 - STRICT_MARGIN or cnj < 2 - STRICT_MARGIN:
            warnings.append(f"cross-check disagrees: J={J:.6f}, C_NJ={cnj:.6f} are below 2")
    else:
        verdict = INCONCLUSIVE
        margin = best
        ev = f"largest gap below 2t^2-4t+2 is {best:.3e}, inside the gap"
    ev += f"; J={J:.6f}, C_NJ={cnj:.6f}"
    return Certificate("UniformlyNonSquare", verdict, ev, margin, keys, warnings)


def _sufficient(prop, plane, ts, book, threshold, label) -> Certificate:
    gaps = [(t, threshold(t) - book.L(t).value) for t in ts]
    best_t, best = max(gaps, key=lambda p: p[1])
    keys = [f"L({t:g})" for t in ts]
    if best > STRICT_MARGIN:
        return Certificate(prop, CERTIFIED, f"L({best_t:g}) is {best:.6f} below {label}", best, keys)
    return Certificate(
        prop, INCONCLUSIVE, f"no probe falls below {label} by {STRICT_MARGIN:g}; best gap {best:.3e}", best, keys
    )


def normal_structure_test(plane: NormedPlane, t_probe: Sequence[float], book: EstimateBook | None = None):
    """Sufficient conditions for uniform normal structure and for normal structure."""
    book = _book(plane, book)
    ts = _probes(t_probe)
    u = _sufficient("UniformNormalStructure", plane, ts, book, uns_threshold, "(4t^2-8t+5)/4")
    n = _sufficient("NormalStructure", plane, ts, book, ns_threshold, "9(1-2t)^2/8")
    return u, n


def convexity_tests(
    plane: NormedPlane,
    t_probe: Sequence[float],
    eps_probe: Sequence[float] = EPS_PROBE,
    book: EstimateBook | None = None,
):
    """Non-uniform-convexity from L(0) > 1 and non-strict-convexity from L > 2t^2-2t+1 at every probe.

    Modulus-of-convexity estimates serve as cross-checks: delta(2) = 1 means
    strictly convex, and delta positive on every probed eps points to uniform
    convexity.  Disagreements are recorded as warnings.
    """
    book = _book(plane, book)
    ts = _probes(t_probe)
    L0 = book.L(0.0).value
    deltas = {e: book.delta(e).value for e in eps_probe}
    d2 = book.delta(2.0).value
    dkeys = list(dict.fromkeys([f"delta({e:g})" for e in deltas] + ["delta(2)"]))

    m0 = L0 - 1.0
    if m0 > STRICT_MARGIN:
        uc = Certificate("NotUniformlyConvex", CERTIFIED, f"L(0) = {L0:.6f} exceeds 1 by {m0:.6f}", m0, ["L(0)"] + dkeys)
        pos = [e for e, d in deltas.items() if e > 0 and d > DELTA_POSITIVE]
        if pos and len(pos) == sum(1 for e in deltas if e > 0):
            uc.warnings.append(
                "cross-check disagrees: delta is positive at every probed eps "
                + ", ".join(f"delta({e:g})={deltas[e]:.4f}" for e in pos)
            )
    else:
        uc = Certificate(
            "NotUniformlyConvex", INCONCLUSIVE, f"L(0) = {L0:.6f} is within {STRICT_MARGIN:g} of 1", m0, ["L(0)"] + dkeys
        )

    excess = [(t, book.L(t).value - hilbert_floor(t)) for t in ts]
    low_t, low = min(excess, key=lambda p: p[1])
    keys = [f"L({t:g})" for t in ts] + dkeys
    if low > STRICT_MARGIN:
        sc = Certificate(
            "NotStrictlyConvex",
            CERTIFIED,
            f"L(t) exceeds 2t^2-2t+1 at every probe, least by {low:.6f} at t={low_t:g}; delta(2) = {d2:.6f}",
            low,
            keys,
        )
        if d2 >= 1 - EQUAL_TOL:
            sc.warnings.append(f"cross-check disagrees: delta(2) = {d2:.6f} indicates strict convexity")
    else:
        sc = Certificate(
            "NotStrictlyConvex",
            INCONCLUSIVE,
            f"L(t) is within {STRICT_MARGIN:g} of 2t^2-2t+1 at t={low_t:g}; delta(2) = {d2:.6f}",
            low,
            keys,
        )
    return uc, sc


def smoothness_slope(
    plane: NormedPlane, t_tail: Sequence[float] = T_TAIL, book: EstimateBook | None = None
) -> Certificate:
    """Tail behaviour of s(t) = (2L(t) - 1)/(1 - 2t) as t approaches 1/2.

    A finite grid cannot establish a limit, so even a Certified verdict is an
    indication only.
    """
    book = _book(plane, book)
    ts = _probes(t_tail)
    s = [(2 * book.L(t).value - 1) / (1 - 2 * t) for t in ts]
    dec = all(b < a for a, b in zip(s, s[1:]))
    keys = [f"L({t:g})" for t in ts]
    slopes = ", ".join(f"s({t:g})={v:.6f}" for t, v in zip(ts, s))
    ok = dec and s[-1] < 0.05
    ev = f"numerical indication only, not a proof of the limit: {slopes}"
    return Certificate("UniformSmoothnessIndication", CERTIFIED if ok else INCONCLUSIVE, ev, 0.05 - s[-1], keys)


def sandwich_audit(
    plane: NormedPlane,
    t_probe: Sequence[float] = T_PROBE,
    eps_probe: Sequence[float] = EPS_PROBE,
    book: EstimateBook | None = None,
) -> list[InequalityResult]:
    """Evaluate the C'_NJ, James and modulus-of-convexity sandwiches around L at every probe."""
    book = _book(plane, book)
    ts = [float(t) for t in t_probe]
    cp = book.cnj_prime().value
    J = book.james().value
    out = []
    for t in ts:
        L = book.L(t).value
        out.append(InequalityResult("cnj_prime_lower", t, None, (1 - 2 * t) ** 2 * cp, L))
        out.append(InequalityResult("james_lower", t, None, 0.5 * J * J - 2 * t * J + 2 * t * t, L))
        h = hilbert_floor(t)
        out.append(InequalityResult("james_upper", t, None, L, h / 4 * J * J + (2 * t - 2 * t * t) * J + h))
        for e in eps_probe:
            d = book.delta(e).value
            out.append(InequalityResult("delta_lower", t, e, 0.5 * (1 - 2 * t) ** 2 * (e / 2 - d + 1) ** 2, L))
            upper = h * (1 - d) ** 2 + 2 * t * (1 - t) * e * (1 - d) + h / 4 * e * e
            out.append(InequalityResult("delta_upper", t, e, L, upper))
    return out


# --- reports ---------------------------------------------------------------


@dataclass
class SpaceReport:
    label: str
    spec: dict
    validation: dict
    estimates: dict
    residuals: dict
    certificates: list
    sandwiches: list
    boundary_flags: dict
    warnings: list

    @property
    def violations(self) -> list:
        return [r for r in self.sandwiches if not r.holds]

    def certificate(self, prop: str) -> Certificate:
        for c in self.certificates:
            if c.property == prop:
                return c
        raise KeyError(prop)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "spec": self.spec,
            "validation": self.validation,
            "estimates": {k: self.estimates[k].to_dict() for k in sorted(self.estimates)},
            "residuals": {k: self.residuals[k] for k in sorted(self.residuals)},
            "certificates": [c.to_dict() for c in self.certificates],
            "sandwiches": [r.to_dict() for r in self.sandwiches],
            "boundary_flags": {k: self.boundary_flags[k] for k in sorted(self.boundary_flags)},
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)


def build_report(plane: NormedPlane, config: AnalysisConfig | None = None) -> SpaceReport:
    config = config or AnalysisConfig()
    book = EstimateBook(plane, config)
    v = validate_norm(plane, config.validation_samples)
    validation = {"passed": v.passed, "samples": v.samples}
    if not v.passed:
        validation["counterexample"] = str(v.counterexample)

    residuals = {}
    for t in T_STANDARD:
        residuals[f"identity({t:g})"] = abs(book.L(t).value - book.L_gamma(t).value)
    residuals["cnj_routes"] = abs(book.cnj().value - book.cnj_from_L().value)
    residuals["rho1_routes"] = abs(book.rho(1.0).value - book.rho1_from_delta().value)
    book.cnj_doubleprime()

    certs = [hilbert_test(plane, config.t_probe, book), nonsquare_test(plane, config.t_probe, book)]
    certs.extend(normal_structure_test(plane, config.t_probe, book))
    certs.extend(convexity_tests(plane, config.t_probe, config.eps_probe, book))
    certs.append(smoothness_slope(plane, config.t_tail, book))
    sand = sandwich_audit(plane, config.t_probe, config.eps_probe, book)

    warnings = [f"{c.property}: {w}" for c in certs for w in c.warnings]
    for r in sand:
        if not r.holds:
            warnings.append(f"sandwich {r.name} violated at t={r.t:g}, eps={r.eps}: margin {r.margin:.6f}")
    flags = {k: e.boundary_flag for k, e in book.entries.items() if e.boundary_flag}
    return SpaceReport(
        plane.label, plane.spec.to_dict(), validation, dict(book.entries), residuals, certs, sand, flags, warnings
    )


# --- invariant suite --------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _check(name, ok, detail):
    return Check(name, bool(ok), detail)


def verify_suite(plane: NormedPlane, config: AnalysisConfig | None = None) -> list[Check]:
    """Every norm-independent invariant on one plane: bounds, identity, monotonicity, convexity, sandwiches, routes."""
    config = config or AnalysisConfig()
    book = EstimateBook(plane, config)
    checks = []
    v = validate_norm(plane, config.validation_samples)
    checks.append(_check("norm axioms", v.passed, f"{v.samples} samples"))

    Ls = [book.L(t).value for t in T_STANDARD]
    gs = [book.gamma(t).value for t in GAMMA_GRID]
    s = BOUND_SLACK
    bad = [t for t, L in zip(T_STANDARD, Ls) if not (hilbert_floor(t) - s <= L <= square_ceiling(t) + s)]
    checks.append(_check("L floor and ceiling", not bad, f"out of bounds at t={bad}" if bad else "all t"))
    bad = [t for t, g in zip(GAMMA_GRID, gs) if not (1 + t * t - s <= g <= (1 + t) ** 2 + s)]
    checks.append(_check("gamma bounds", not bad, f"out of bounds at t={bad}" if bad else "all t"))
    cnj = book.cnj().value
    checks.append(_check("C_NJ in [1, 2]", 1 - s <= cnj <= 2 + s, f"C_NJ={cnj:.6f}"))
    J = book.james().value
    checks.append(_check("J in [sqrt2, 2]", math.sqrt(2) - s <= J <= 2 + s, f"J={J:.6f}"))
    ds = {e: book.delta(e).value for e in config.eps_probe}
    checks.append(_check("delta in [0, 1]", all(-s <= d <= 1 + s for d in ds.values()), f"{ds}"))

    res = [abs(book.L(t).value - book.L_gamma(t).value) for t in T_STANDARD]
    checks.append(_check("identity residual", max(res) <= EQUAL_TOL, f"max {max(res):.3e}"))

    inc = [(a, b) for a, b in zip(Ls, Ls[1:]) if b > a + 1e-6]
    checks.append(_check("L nonincreasing", not inc, f"{len(inc)} increases"))
    dec = [(a, b) for a, b in zip(gs, gs[1:]) if b < a - 1e-6]
    checks.append(_check("gamma nondecreasing", not dec, f"{len(dec)} decreases"))
    mid = [
        T_STANDARD[i + 1]
        for i in range(len(Ls) - 2)
        if Ls[i + 1] > (Ls[i] + Ls[i + 2]) / 2 + BOUND_SLACK
    ]
    checks.append(_check("L midpoint convex", not mid, f"fails at t={mid}" if mid else "all triples"))

    routes = abs(cnj - book.cnj_from_L().value)
    checks.append(_check("C_NJ routes agree", routes <= ROUTE_TOL, f"difference {routes:.3e}"))
    cpp = book.cnj_doubleprime().value
    checks.append(_check("C''_NJ <= C_NJ", cpp <= cnj + BOUND_SLACK, f"C''_NJ={cpp:.6f}, C_NJ={cnj:.6f}"))

    sand = sandwich_audit(plane, config.t_probe, config.eps_probe, book)
    by_name = {}
    for r in sand:
        by_name.setdefault(r.name, []).append(r)
    for name, rs in by_name.items():
        bad = [r for r in rs if not r.holds]
        worst = min(rs, key=lambda r: r.margin)
        detail = f"worst margin {worst.margin:.6f} at t={worst.t:g}" + (f", eps={worst.eps:g}" if worst.eps is not None else "")
        checks.append(_check(f"sandwich {name}", not bad, detail))
    return checks
