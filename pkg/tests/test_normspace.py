import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planeconst.normspace import (
    NormConfigError,
    NormedPlane,
    NormSpec,
    Vector2,
    norm,
    parse_space,
    random_polygon_spec,
    unit_vector,
    validate_norm,
)

from helpers import BUILTINS, plane

SQUARE = NormSpec.polygon([(1, 1), (-1, 1), (-1, -1), (1, -1)])
DIAMOND = NormSpec.polygon([(1, 0), (0, 1), (-1, 0), (0, -1)])
HEXAGON = NormSpec.polygon([(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)])


def facet_max_norm(vertices, x):
    """Gauge of a symmetric polygon as the largest facet functional (independent of the ray search)."""
    V = np.asarray(vertices, float)
    W = np.roll(V, -1, axis=0)
    # facet line through V_i, W_i: a . z = 1 with a normal to the edge
    d = W - V
    c = V[:, 0] * W[:, 1] - V[:, 1] * W[:, 0]
    return max((x[0] * di[1] - x[1] * di[0]) / ci for di, ci in zip(d, c))


@pytest.mark.parametrize(
    "spec, x, expected",
    [
        (NormSpec.lp(1), (1, 1), 2.0),
        (NormSpec.euclidean(), (3, 4), 5.0),
        (NormSpec.lplq(2, 1), (1, -1), 2.0),
        (SQUARE, (0.5, 0.25), 0.5),
    ],
)
def test_norm_examples(spec, x, expected):
    assert norm(NormedPlane(spec), Vector2(*x)) == pytest.approx(expected, abs=1e-14)


def test_vector2_rejects_non_finite():
    with pytest.raises(ValueError):
        Vector2(math.nan, 0.0)
    with pytest.raises(ValueError):
        Vector2(0.0, math.inf)


def test_vector2_arithmetic():
    a, b = Vector2(1.0, 2.0), Vector2(-0.5, 4.0)
    assert a + b == Vector2(0.5, 6.0)
    assert a - b == Vector2(1.5, -2.0)
    assert -a == Vector2(-1.0, -2.0)
    assert 2 * a == a * 2 == Vector2(2.0, 4.0)


@pytest.mark.parametrize(
    "spec, theta, expected",
    [
        (NormSpec.lp(1), math.pi / 4, (0.5, 0.5)),
        (NormSpec.euclidean(), 0.0, (1.0, 0.0)),
        (NormSpec.lplq(2, 1), 3 * math.pi / 4, (-0.5, 0.5)),
    ],
)
def test_unit_vector_examples(spec, theta, expected):
    w = unit_vector(NormedPlane(spec), theta)
    assert (w.u, w.v) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("name", BUILTINS)
def test_unit_vectors_have_norm_one(name):
    p = plane(name)
    th = 2 * math.pi * np.arange(720) / 720
    assert np.max(np.abs(p.norm(p.unit(th)) - 1.0)) <= 1e-12
    for theta in th[::37]:
        w = unit_vector(p, theta)
        assert abs(norm(p, w) - 1.0) <= 1e-12
        assert unit_vector(p, theta + math.pi) == pytest.approx(-w, abs=1e-14)
        assert unit_vector(p, theta + 2 * math.pi) == pytest.approx(w, abs=1e-12)


def test_lplq_with_equal_exponents_is_lp():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(1000, 2))
    for p in (1.0, 2.0, 3.5):
        a = NormedPlane(NormSpec.lplq(p, p)).norm(X)
        b = NormedPlane(NormSpec.lp(p)).norm(X)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_polygons_reproduce_l1_and_linf():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(1000, 2))
    assert np.max(np.abs(NormedPlane(DIAMOND).norm(X) - plane("l1").norm(X))) <= 1e-12
    assert np.max(np.abs(NormedPlane(SQUARE).norm(X) - plane("linf").norm(X))) <= 1e-12


def test_scalar_and_vector_paths_agree():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(200, 2))
    for p in [plane(n) for n in BUILTINS] + [NormedPlane(random_polygon_spec(s)) for s in range(5)]:
        vec = p.norm(X)
        sca = np.array([p.norm_uv(float(u), float(v)) for u, v in X])
        assert np.max(np.abs(vec - sca)) <= 1e-14


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), u=st.floats(-5, 5), v=st.floats(-5, 5))
def test_polygon_norm_matches_facet_functional(seed, u, v):
    spec = random_polygon_spec(seed)
    p = NormedPlane(spec)
    assert p.norm_uv(u, v) == pytest.approx(facet_max_norm(p.vertices, (u, v)), rel=1e-12, abs=1e-14)


def test_witness_span_of_affine_functions_is_linf():
    # x0, y0 affine on [a, b] with endpoint values (1, 0) and (0, 1); the sup norm of
    # c*x0 + d*y0 over a fine sample of [a, b] equals max(|c|, |d|)
    a, b = -1.0, 3.0
    m = np.linspace(a, b, 4001)
    x0 = (b - m) / (b - a)
    y0 = (m - a) / (b - a)
    linf = plane("linf")
    rng = np.random.default_rng(0)
    for c, d in rng.normal(size=(50, 2)):
        sup = np.max(np.abs(c * x0 + d * y0))
        assert sup == pytest.approx(linf.norm_uv(c, d), abs=1e-12)


@pytest.mark.parametrize("name", BUILTINS)
def test_validate_builtins(name):
    assert validate_norm(plane(name), 1000).passed


def test_validate_hexagon_and_random_polygons():
    assert validate_norm(NormedPlane(HEXAGON), 1000).passed
    for s in range(10):
        assert validate_norm(NormedPlane(random_polygon_spec(s)), 500, seed=s).passed


def test_validate_needs_enough_samples():
    with pytest.raises(ValueError):
        validate_norm(plane("l1"), 50)


@pytest.mark.parametrize(
    "spec",
    [
        {"family": "lp", "p": 0.5},
        {"family": "lp", "p": 65},
        {"family": "lplq", "p": 1, "q": 2},
        {"family": "polygon", "vertices": [[1, 0], [0, 1]]},
        {"family": "polygon", "vertices": [[1, 0], [0, 1], [-1, 0], [0, -2]]},
        {"family": "polygon", "vertices": [[2, 1], [3, 1], [3, 2], [2, 2]]},
        {"family": "polygon", "vertices": [[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1], [0.4, 0.4], [-0.4, -0.4]]},
        {"family": "polygon", "vertices": [[1, 0], [0.5, 0.5], [0, 1], [-1, 0], [-0.5, -0.5], [0, -1]]},
        {"family": "polygon", "vertices": [[0, 0], [1, 1], [0, 0], [-1, -1]]},
        {"family": "triangle"},
    ],
    ids=["p-low", "p-high", "q-above-p", "too-few", "asymmetric", "origin-outside", "nonconvex", "collinear", "zero-vertex", "unknown"],
)
def test_invalid_specs_fail_at_construction(spec):
    with pytest.raises(NormConfigError):
        NormedPlane(NormSpec.from_dict(spec))


def test_vertex_order_is_canonicalized():
    shuffled = NormSpec.polygon([(1, 1), (-1, -1), (1, -1), (-1, 1)])
    a = NormedPlane(shuffled)
    b = NormedPlane(SQUARE)
    X = np.random.default_rng(1).normal(size=(100, 2))
    assert np.array_equal(a.norm(X), b.norm(X))


@pytest.mark.parametrize(
    "text, label, probe, expected",
    [
        ("euclidean", "euclidean", (3, 4), 5.0),
        ("l1", "l1", (1, -2), 3.0),
        ("linf", "linf", (1, -2), 2.0),
        ("l2-l1", "l2-l1", (1, -1), 2.0),
        ("linf-l1", "linf-l1", (1, 2), 2.0),
        ("lp:3", "l3", (1, 1), 2 ** (1 / 3)),
        ('{"family":"lplq","p":"inf","q":1}', "linf-l1", (1, -1), 2.0),
        ('{"family":"polygon","vertices":[[1,1],[-1,1],[-1,-1],[1,-1]]}', "polygon4", (0.5, 0.25), 0.5),
    ],
)
def test_parse_space(text, label, probe, expected):
    p = parse_space(text)
    assert p.label == label
    assert p.norm_uv(*probe) == pytest.approx(expected, abs=1e-14)


def test_parse_space_from_file(tmp_path):
    f = tmp_path / "hex.json"
    f.write_text('{"family": "polygon", "vertices": [[1,0],[0.5,0.8],[-0.5,0.8],[-1,0],[-0.5,-0.8],[0.5,-0.8]]}')
    p = parse_space(str(f))
    assert p.norm_uv(1.0, 0.0) == pytest.approx(1.0)


def test_parse_space_rejects_garbage():
    with pytest.raises(NormConfigError):
        parse_space("not-a-space")
    with pytest.raises(NormConfigError):
        parse_space("{bad json")


def test_spec_dict_round_trip():
    for spec in [NormSpec.lp(3), NormSpec.linf(), NormSpec.lplq(math.inf, 1), HEXAGON]:
        assert NormSpec.from_dict(spec.to_dict()) == spec


def test_random_polygons_are_deterministic():
    assert random_polygon_spec(42) == random_polygon_spec(42)
    assert random_polygon_spec(1) != random_polygon_spec(2)


@settings(max_examples=80, deadline=None)
@given(
    p=st.floats(1.0, 64.0),
    x=st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
    y=st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
    lam=st.floats(-10, 10),
)
def test_lp_axioms(p, x, y, lam):
    P = NormedPlane(NormSpec.lp(p))
    nx, ny = P.norm_uv(*x), P.norm_uv(*y)
    assert P.norm_uv(x[0] + y[0], x[1] + y[1]) <= nx + ny + 1e-10
    assert abs(P.norm_uv(lam * x[0], lam * x[1]) - abs(lam) * nx) <= 1e-10 * (1 + abs(lam) * nx)
    assert P.norm_uv(-x[0], -x[1]) == nx
