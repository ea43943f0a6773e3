import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from idegen.algebra import CoordinateSystem, Polynomial, PolyMatrix
from idegen.curvature import (BASIS, Geometry, bianchi2_residual, boost_generator, invariants,
                              invariants_at, killing_check, metric_compatibility_residual, nabla_F,
                              residual_symmetries, riemann, translation)
from idegen.errors import NonConstantDeterminant, SingularMetricAtPoint, WalkerInconsistent
from idegen.metric import FullMetric
from strategies import fixture_metric, random_metric
from sympy_oracle import curvature_invariants

seeds = st.integers(0, 10 ** 9)


# -- identities on random metrics (>= 500 cases each) ----------------------------------

@settings(max_examples=500, deadline=None)
@given(seeds)
def test_riemann_symmetries_and_first_bianchi(seed):
    geo = Geometry(random_metric(seed).assemble())
    assert residual_symmetries(geo) == {"antisym_12": 0, "antisym_34": 0, "pair": 0,
                                        "bianchi1": 0, "ricci_sym": 0}


@settings(max_examples=500, deadline=None)
@given(seeds)
def test_second_bianchi(seed):
    geo = Geometry(random_metric(seed).assemble())
    assert bianchi2_residual(geo) == 0


@settings(max_examples=500, deadline=None)
@given(seeds)
def test_metric_compatibility(seed):
    geo = Geometry(random_metric(seed).assemble())
    assert metric_compatibility_residual(geo) == 0


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_cov_deriv_leibniz(seed):
    # nabla(f g) = df (x) g because nabla g = 0; nabla of a scalar is its gradient
    geo = Geometry(random_metric(seed).assemble())
    rng = random.Random(seed)
    f = geo.scalar
    if f.is_zero():
        f = Polynomial.variable(geo.coords, rng.randrange(geo.coords.n))
    df = geo.cov_deriv(geo.scalar_field(f))
    fg = geo.metric_tensor().map(lambda p: p * f)
    lhs = geo.cov_deriv(fg)
    for (a, b, c), p in lhs.items():
        assert p == geo.metric.matrix[a, b] * df[(c,)]
    for (c,), p in df.items():
        assert p == f.diff(geo.metric.var_of[c])


@settings(max_examples=100, deadline=None)
@given(seeds, st.data())
def test_jet_evaluation_matches_full_symbolic(seed, data):
    g = random_metric(seed).assemble()
    pt = {v: data.draw(st.fractions(-2, 2, max_denominator=3)) for v in range(g.coords.n)}
    full = invariants(g)
    at = invariants_at(g, pt)
    for name in BASIS:
        assert at[name] == full[name].evaluate(pt)


# -- independent sympy reference ------------------------------------------------------------

def _poly_to_sympy(p, syms):
    expr = sympy.Integer(0)
    for exps, coeff in p.terms():
        term = sympy.Rational(int(coeff.numerator), int(coeff.denominator))
        for s, e in zip(syms, exps):
            term *= s ** e
        expr += term
    return expr


@pytest.mark.parametrize("source", ["kundt", "csi4d", "type3", "v18", 3, 4, 5, 11, 17, 23])
def test_invariants_match_sympy(source):
    g = fixture_metric(source).metric if isinstance(source, str) else random_metric(source).assemble()
    ref, syms = curvature_invariants(g)
    ours = invariants(g)
    for name in BASIS:
        assert sympy.expand(_poly_to_sympy(ours[name], syms) - ref[name]) == 0, name


# -- worked examples -------------------------------------------------------------------------

def test_flat_metric():
    g = fixture_metric("flat").metric
    r = riemann(g)
    assert r["riemann"].is_zero() and r["ricci"].is_zero() and r["scalar"].is_zero()
    assert all(p.is_zero() for p in invariants(g).values())


def test_vsi_example_invariants_vanish():
    g = fixture_metric("v17").metric
    assert all(p.is_zero() for p in invariants(g).values())
    assert not Geometry(g).is_flat()


def test_type_iv_example_null_form_is_parallel():
    res = nabla_F(fixture_metric("v18").metric)
    assert res.nabla_F.is_zero() and res.constant and res.killing_yano
    assert res.walker == {}


def test_type_iii_walker_form():
    g = fixture_metric("type3").metric
    res = nabla_F(g)
    assert not res.constant
    assert res.walker is not None
    # nabla F = k (x) F with k proportional to du1
    assert set(res.walker) == {0}
    assert res.walker_form(g.coords).endswith("du1")


def test_walker_missing_for_v_dependent_B():
    g = fixture_metric("kundt").metric
    assert nabla_F(g).walker is None
    with pytest.raises(WalkerInconsistent):
        nabla_F(g, strict=True)


def test_killing_vectors():
    g = fixture_metric("v18").metric
    c = g.coords
    for name in ("u1", "u2", "u3"):
        assert killing_check(g, translation(c, name))
    assert not killing_check(g, translation(c, "v2"))
    flat = fixture_metric("flat").metric
    assert killing_check(flat, translation(flat.coords, "v1"))


def test_boost_generator_is_killing_for_weight_zero_metric():
    g = fixture_metric("v17").metric
    c = g.coords
    # the v1^7 term has negative weight under (1,2,4), so only its absence makes X Killing
    assert not killing_check(g, boost_generator(c, (1, 2, 4)))
    g0 = FullMetric.from_line_element(c, {("u1", "v1"): 2, ("u2", "v2"): 2, ("u3", "v3"): 2,
                                          ("u1", "u1"): "2*v2", ("u2", "u2"): "2*v3"})
    assert killing_check(g0, boost_generator(c, (1, 2, 4)))


def test_geometry_requires_constant_determinant():
    c = CoordinateSystem(0, 2)
    g = FullMetric(c, PolyMatrix(c, [[Polynomial.variable(c, 0) + 1, Polynomial.zero(c)],
                                     [Polynomial.zero(c), Polynomial.constant(c, 1)]]), (2, 0))
    with pytest.raises(NonConstantDeterminant):
        Geometry(g)
    # the jet route handles it away from the degenerate locus
    vals = invariants_at(g, {0: 1})
    assert all(v == 0 for v in vals.values())
    with pytest.raises(SingularMetricAtPoint):
        invariants_at(g, {0: -1})


def test_curved_non_polynomial_inverse_through_jets():
    # 2D metric (1 + x1^2) dx1^2 + (1 + x1^2) dx2^2 is conformally flat but curved
    c = CoordinateSystem(0, 2)
    f = Polynomial.variable(c, 0) * Polynomial.variable(c, 0) + 1
    g = FullMetric(c, PolyMatrix(c, [[f, Polynomial.zero(c)], [Polynomial.zero(c), f]]), (2, 0))
    # R = -Laplacian(log f) / f = -2 at the origin
    assert invariants_at(g, {})["R"] == -2
