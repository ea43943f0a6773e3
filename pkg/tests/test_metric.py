import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idegen.algebra import CoordinateSystem, Polynomial, parse_poly
from idegen.curvature import invariants_at
from idegen.errors import CoefficientOutsideShape, MetricFormatError, NotClosed, NotTriangular
from idegen.lattice import enumerate_boost_vectors
from idegen.metric import (CanonicalMetric, FullMetric, instantiate_template, load_metric,
                           metric_from_json, metric_to_json, normalize_a, parse_point,
                           point_to_json, pullback, validate_class)
from strategies import METRICS, random_metric

CANONICAL = [b for k in (1, 2, 3) for b in enumerate_boost_vectors(k) if b[0]]


def test_assemble_matches_line_element():
    c = CoordinateSystem(3)
    direct = FullMetric.from_line_element(c, {
        ("u1", "v1"): 2, ("u2", "v2"): 2, ("u3", "v3"): 2,
        ("u1", "u1"): "2*v2", ("u2", "u2"): "2*v3", ("u3", "u3"): "2*v1^7",
    })
    doc = load_metric(METRICS / "v17.json")
    assert doc.metric.matrix == direct.matrix
    assert doc.metric.line_element() == "2*v2 du1^2 + 2 du1 dv1 + 2*v3 du2^2 + 2 du2 dv2 + 2*v1^7 du3^2 + 2 du3 dv3"
    assert doc.metric.signature == (3, 3)


def test_off_diagonal_A_convention():
    # 2 du1 (v2 du2) in the line element is A12 = A21 = v2/2
    doc = load_metric(METRICS / "csi4d.json")
    c = doc.metric.coords
    ref = FullMetric.from_line_element(c, {("u1", "v1"): 2, ("u2", "v2"): 2,
                                           ("u1", "u2"): "2*v2", ("u2", "u2"): "2*v1^4"})
    assert doc.metric.matrix == ref.matrix


def test_block_round_trip_through_full_matrix():
    for seed in range(20):
        cm = random_metric(seed)
        assert cm.assemble().to_canonical() == cm


def test_kundt_signature():
    doc = load_metric(METRICS / "kundt.json")
    assert doc.canonical.transverse_signature == (1, 0)
    assert doc.metric.signature == (2, 1)


# -- class validation ---------------------------------------------------------------

@pytest.mark.parametrize("seed", range(100))
def test_templates_validate(seed):
    b = CANONICAL[seed % len(CANONICAL)]
    cm = instantiate_template(b, seed=seed, m=seed % 2, u_terms=bool(seed % 3))
    rep = validate_class(cm, b)
    assert rep.passed, rep.violations
    assert validate_class(cm.assemble(), b).passed


def test_validation_reports_excess():
    c = CoordinateSystem(2)
    cm = CanonicalMetric.build(c, A=[["v1^3", "0"], ["0", "0"]])
    rep = validate_class(cm, (1, 2))
    assert not rep.passed
    (v,) = rep.violations
    assert (v.component, v.monomial, v.excess) == ("A11", "v1^3", 1)
    assert rep.to_dict()["status"] == "FAIL"


def test_validation_flags_bad_transverse_and_cross_terms():
    doc = load_metric(METRICS / "blowup_dv1dv2.json")
    rep = validate_class(doc.metric, (1, 1))
    assert not rep.passed and rep.violations[0].excess == 2


def test_validation_never_raises():
    cm = instantiate_template((1, 2), seed=0)
    rep = validate_class(cm, (1, 2, 4))
    assert not rep.passed and rep.violations[0].component == "boost"


def test_non_canonical_boost_is_flagged():
    cm = instantiate_template((1, 1), seed=0)
    assert validate_class(cm, (1, 0)).canonical_boost is False


def test_explicit_coefficients():
    cm = instantiate_template((1, 2), {"A11": {"v2": 1}, "A12": {"v1*v2": "1/2"}, "A22": {"v1^4": "u1"}})
    assert str(cm.A[0, 0]) == "v2" and str(cm.A[0, 1]) == "1/2*v1*v2" and str(cm.A[1, 1]) == "u1*v1^4"
    with pytest.raises(CoefficientOutsideShape):
        instantiate_template((1, 2), {"A11": {"v1^3": 1}})
    with pytest.raises(CoefficientOutsideShape):
        instantiate_template((1, 2), {"A11": {"v1": "v2"}})
    with pytest.raises(CoefficientOutsideShape):
        instantiate_template((1, 2), {"Q11": {"1": 1}})


# -- a-normalization -----------------------------------------------------------------

@pytest.mark.parametrize("seed", range(30))
def test_normalize_a_round_trip(seed):
    mixed = [b for b in CANONICAL if len(set(b)) > 1]
    b = mixed[seed % len(mixed)]
    cm = instantiate_template(b, seed=seed, m=seed % 2)
    new, forward = normalize_a(cm)
    assert new.a.is_identity()
    c = cm.coords
    # pulling the normalized metric back along new v_i = f_i recovers the input
    back = pullback(new.assemble(), {c.v(i): f for i, f in forward.items()})
    assert back.matrix == cm.assemble().matrix
    assert validate_class(new, b).passed
    assert invariants_at(new.assemble(), {}) == invariants_at(cm.assemble(), {})


def test_normalize_rejects_non_closed():
    doc = load_metric(METRICS / "type1.json")
    with pytest.raises(NotClosed):
        normalize_a(doc.canonical)


def test_normalize_rejects_non_triangular():
    c = CoordinateSystem(2)
    cm = CanonicalMetric.build(c, a=[["1", "1"], ["1", "2"]])
    with pytest.raises(NotTriangular):
        normalize_a(cm)


# -- JSON ----------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(25))
def test_json_round_trip(seed):
    cm = random_metric(seed)
    g = cm.assemble()
    for data in (cm.to_json_dict(), metric_to_json(g)):
        text = json.dumps(data)
        doc = metric_from_json(json.loads(text))
        assert doc.metric.matrix == g.matrix


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(-9, 9, max_denominator=9), min_size=5, max_size=5))
def test_point_round_trip(vals):
    c = CoordinateSystem(2, 1)
    data = {"u": [str(v) for v in vals[:2]], "v": [str(v) for v in vals[2:4]], "x": [str(vals[4])]}
    pt = parse_point(data, c)
    assert point_to_json(pt, c) == data
    assert parse_point(point_to_json(pt, c), c) == pt


def test_every_shipped_metric_loads():
    files = sorted(METRICS.glob("*.json"))
    assert len(files) >= 8
    for path in files:
        doc = load_metric(path)
        assert doc.description
        assert metric_from_json(metric_to_json(doc.metric)).metric.matrix == doc.metric.matrix


@pytest.mark.parametrize("data, fragment", [
    ({"k": 1, "a": [["1"]], "A": [["0"]], "colour": 1}, "unknown keys"),
    ({"k": 1, "a": [["1"]]}, "required"),
    ({"k": 1, "a": [["1"]], "A": [["v1 +"]]}, "A[0][0]"),
    ({"k": 1, "a": [["1"]], "A": [["w1"]]}, "at byte 0"),
    ({"k": 1, "a": [["1", "0"]], "A": [["0"]]}, "1x1"),
    ({"k": 1, "m": 1, "a": [["1"]], "A": [["0"]], "B": [["0"]], "g_trans": [["1"]],
      "transverse_signature": [1, 1]}, "add up"),
    ({"k": 1, "g": [["0", "1"], ["1", "0"]], "A": [["0"]]}, "not both"),
    ({"k": 1, "a": [["1"]], "A": [["0"]], "boost": [1, 2]}, "boost"),
    ({"k": "x"}, "k/m"),
])
def test_schema_errors(data, fragment):
    with pytest.raises(MetricFormatError) as info:
        metric_from_json(data)
    assert fragment in str(info.value)


def test_load_reports_path(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 1,\n "a": [["1"]] "A": []}', encoding="utf-8")
    with pytest.raises(MetricFormatError) as info:
        load_metric(bad)
    assert str(bad) in str(info.value) and "line 2" in str(info.value)


def test_pullback_of_linear_map():
    c = CoordinateSystem(1)
    g = FullMetric.from_line_element(c, {("u1", "v1"): 2, ("u1", "u1"): "2*v1^2"})
    # v1 = 2 w, u1 = z / 2 keeps 2 du dv and scales the v^2 term by 4 * 1/4
    g2 = pullback(g, {c.v(1): parse_poly("2*v1", c), c.u(1): parse_poly("1/2*u1", c)})
    assert g2.line_element() == "2*v1^2 du1^2 + 2 du1 dv1"
    assert g2.det == Polynomial.constant(c, -1)
