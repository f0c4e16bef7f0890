"""Norm-independent invariants checked on random polygon planes."""

import math

from hypothesis import HealthCheck, given, settings, strategies as st

from planeconst import constants as C
from planeconst.normspace import NormedPlane, random_polygon_spec
from planeconst.orthogonality import iso_defect

SLACK = 2e-3
FAST = {"grid": 600}
FAST_M = {"n_theta": 180, "n_scan": 240}

polygons = st.integers(0, 100_000).map(lambda s: NormedPlane(random_polygon_spec(s), f"polygon-{s}"))
common = settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@common
@given(p=polygons, t=st.floats(0.0, 0.49))
def test_L_bounds_identity_and_witness(p, t):
    a = C.L_direct(p, t, **FAST_M)
    b = C.L_via_gamma(p, t, **FAST)
    assert 2 * t * t - 2 * t + 1 - SLACK <= a.value <= 2 * t * t - 4 * t + 2 + SLACK
    assert abs(a.value - b.value) <= SLACK
    for e in (a, b):
        assert abs(C.reevaluate(p, e) - e.value) <= 1e-10
        x, y = e.witness[0], e.witness[1]
        assert abs(iso_defect(p, x, y)) <= 1e-10 * (1 + p.norm_uv(*x) + p.norm_uv(*y))


@common
@given(p=polygons, t=st.floats(0.0, 1.0))
def test_gamma_bounds(p, t):
    g = C.gamma(p, t, **FAST)
    assert 1 + t * t - SLACK <= g.value <= (1 + t) ** 2 + SLACK


@common
@given(p=polygons, t1=st.floats(0.0, 0.45), dt=st.floats(0.01, 0.2))
def test_L_monotone_and_midpoint_convex(p, t1, dt):
    t3 = min(t1 + 2 * dt, 0.49)
    t2 = (t1 + t3) / 2
    L1, L2, L3 = (C.L_via_gamma(p, t, **FAST).value for t in (t1, t2, t3))
    assert L3 <= L1 + 1e-6
    assert L2 <= (L1 + L3) / 2 + SLACK


@common
@given(p=polygons)
def test_cnj_routes_and_ranges(p):
    a = C.cnj(p, **FAST)
    b = C.cnj_from_L(p, grid=600)
    assert 1 - SLACK <= a.value <= 2 + SLACK
    assert abs(a.value - b.value) <= 5e-3
    assert C.cnj_doubleprime(p, **FAST_M).value <= a.value + SLACK
    j = C.james(p, **FAST)
    assert math.sqrt(2) - SLACK <= j.value <= 2 + SLACK


@common
@given(p=polygons, eps=st.floats(0.0, 2.0))
def test_delta_range_and_constraint(p, eps):
    d = C.delta(p, eps, **FAST)
    assert -SLACK <= d.value <= 1 + SLACK
    x, y = d.witness[0], d.witness[1]
    assert abs(p.norm_uv(*(x - y)) - eps) <= 1e-9


@common
@given(p=polygons, tau=st.floats(0.0, 2.0), dtau=st.floats(0.05, 1.0))
def test_rho_nondecreasing(p, tau, dtau):
    assert C.rho(p, tau, **FAST).value <= C.rho(p, tau + dtau, **FAST).value + 1e-9
