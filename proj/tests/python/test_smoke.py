import math

import pytest

import grushin

CONE = {"type": "point", "at": [0, 0]}
V_AXIS = {"type": "line", "point": [0, 0], "normal": [1, 0]}


@pytest.fixture
def cone():
    return grushin.space(2, 0.5, [CONE], [-1, -1], [1, 1])


@pytest.fixture
def v_axis():
    return grushin.space(2, 0.5, [V_AXIS], [-1, -1], [1, 1], resolution=0.05, seed=3)


def test_space_from_json():
    s = grushin.Space.from_json(
        '{"dimension": 2, "beta": 0.25, "singular": [{"type": "point", "at": [0, 0]}],'
        ' "bbox": {"lo": [-1, -1], "hi": [1, 1]}}'
    )
    assert s.dimension == 2
    assert s.beta == 0.25
    assert len(s.hash) == 16
    assert s.distance_to_y([3, 4]) == pytest.approx(5.0)


def test_spec_errors_raise():
    with pytest.raises(grushin.SpecError, match="beta"):
        grushin.space(2, 1.5, [CONE], [0, 0], [1, 1])
    with pytest.raises(ValueError):
        grushin.Space.from_json("{")


def test_cone_distance(cone):
    exact = 4 * math.sin(math.pi / 8)
    b = grushin.distance(cone, [1, 0], [0, 1])
    assert b.lower <= exact <= b.upper * (1 + 1e-12)
    assert b.width <= 0.04 * exact
    assert b.witness[0] == [1.0, 0.0]
    r = grushin.refine(cone, b)
    assert r.upper <= b.upper
    assert b.to_dict()["upper"] == b.upper


def test_radial_closed_form(v_axis):
    assert grushin.distance_to_singular(v_axis, [0.25, 0.3]) == pytest.approx(1.0)
    exact = 2 * (1 - math.sqrt(0.5))
    assert grushin.lower_bound(v_axis, [0.5, 0], [1, 0]) == pytest.approx(exact, rel=1e-12)
    assert grushin.path_length(v_axis, [[0.5, 0], [1, 0]]) == pytest.approx(exact, rel=1e-9)


def test_point_outside_bbox(cone):
    with pytest.raises(grushin.PreconditionError):
        grushin.distance(cone, [5, 0], [0, 1])


def test_checks(v_axis):
    assert not grushin.check_holder(v_axis, 16.0, samples=50)["violated"]
    qs = grushin.check_quasisymmetry(v_axis, 16.0, triples=100, seed=2)
    assert not qs["violated"]
    etas = [grushin.eta_control(0.5, 16.0, 10.0**-k) for k in range(1, 7)]
    assert all(a > b for a, b in zip(etas, etas[1:]))
    assert grushin.nondoubling_balls(1.0, 2)["count"] == 436
    assert grushin.holder_constant_uniform(2.0, 2, 0.5) == pytest.approx(16.0)
    assert grushin.gaussian_curvature(v_axis, [1.0, 0.0]) == pytest.approx(-0.5, rel=1e-3)


def test_decompose():
    s = grushin.space(2, 0.5, [{"type": "coordinate-plane", "axis": 0}], [0, 0], [1, 1])
    out = grushin.decompose(s, per_axis=30, verify_balls=True, charts=True)
    sys = out["system"]
    assert sys["disjoint"] and sys["in_shell"] and sys["dense"]
    assert sys["data"]["a"] == grushin.admissible_a(0.5) == 21
    assert out["whitney_balls"]["diameter_violations"] == 0
    assert all(c["violations"] == 0 for c in out["charts"])
    assert len(out["points"]) == 900


def test_embeddings(cone):
    assert grushin.cone_map(0.5, [1, 0]) == pytest.approx([1, 0, math.sqrt(3)])
    p = [0.3, -0.8]
    assert grushin.grushin_chart_inverse(2.0, grushin.grushin_chart(2.0, p)) == pytest.approx(p)
    sf = grushin.snowflake_parameter(0.5, 1.0)
    assert sf["alpha_tilde"] == pytest.approx(1.0)
    assert grushin.cone_length_check(0.5, paths=10)["max_rel_error"] <= 2e-3
    pts = grushin.annulus_sample(100, 0.1, 1.0, 1)
    d = grushin.measure_distortion(cone, pts, [("cone", 0.5)], pairs=500)
    assert 1.0 <= d["L_lower"] <= 2 ** 0.25 + 1e-9
    assert d["map"] == "cone(0.5)"
    with pytest.raises(grushin.PreconditionError):
        grushin.measure_distortion(cone, pts, "blob")
