"""Shared generators for the property tests."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

from idegen.algebra import CoordinateSystem, Polynomial
from idegen.metric import CanonicalMetric, load_metric

ROOT = Path(__file__).resolve().parent.parent
METRICS = ROOT / "metrics"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

COORDS = [CoordinateSystem(1), CoordinateSystem(1, 1), CoordinateSystem(2), CoordinateSystem(2, 1)]

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def polynomials(draw, coords=None, max_terms=5, max_exp=3):
    c = coords if coords is not None else draw(st.sampled_from(COORDS))
    exps = st.tuples(*[st.integers(0, max_exp)] * c.n)
    terms = draw(st.dictionaries(exps, rationals, max_size=max_terms))
    return Polynomial.from_terms(c, terms)


@st.composite
def poly_triples(draw):
    c = draw(st.sampled_from(COORDS))
    return tuple(draw(polynomials(c)) for _ in range(3))


def random_poly(rng: random.Random, coords, vars_=None, max_terms=3, max_deg=2) -> Polynomial:
    vars_ = list(range(coords.n)) if vars_ is None else list(vars_)
    p = Polynomial.zero(coords)
    for _ in range(rng.randint(0, max_terms)):
        e = [0] * coords.n
        for _ in range(rng.randint(0, max_deg)):
            e[rng.choice(vars_)] += 1
        p = p + Polynomial.monomial(coords, e, Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
    return p


def random_metric(seed: int, k=None, m=None) -> CanonicalMetric:
    """A canonical metric with arbitrary polynomial blocks and constant determinant.

    ``a`` is unit lower-triangular and ``g_trans`` constant, so the inverse
    stays polynomial while A, B and a depend on every coordinate.
    """
    rng = random.Random(seed)
    k = rng.choice([1, 2]) if k is None else k
    m = rng.choice([0, 1]) if m is None else m
    c = CoordinateSystem(k, m)
    one = Polynomial.constant(c, 1)
    zero = Polynomial.zero(c)
    a = [[one if i == j else (random_poly(rng, c, max_terms=1) if j < i else zero)
          for j in range(k)] for i in range(k)]
    A = [[zero] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            A[i][j] = A[j][i] = random_poly(rng, c)
    B = [[random_poly(rng, c, max_terms=2) for _ in range(m)] for _ in range(k)]
    g_trans = [[Polynomial.constant(c, rng.choice([1, 2, -1]))]] if m else None
    return CanonicalMetric.build(c, a=a, A=A, B=B if m else None, g_trans=g_trans)


def fixture_metric(name: str):
    return load_metric(METRICS / f"{name}.json")
