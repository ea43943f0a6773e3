"""Acceptance criteria 1-10, one test each, every test printing a single PASS/FAIL line."""

import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

import test_algebra
import test_curvature
from idegen.classify import classify
from idegen.cli import main
from idegen.curvature import BASIS, invariants, invariants_at, killing_check, nabla_F, riemann
from idegen.lattice import enumerate_boost_vectors, format_shape, shape_tables
from idegen.limits import (NotFound, boost_generator_field, csi_certificate, finite_pullback,
                           graded_terms, invariant_agreement, is_flat, pullback_limit, vsi_search)
from idegen.metric import instantiate_template
from idegen.numeric import agrees, numeric_oracle
from strategies import FIXTURES, METRICS, fixture_metric

G1_TEXT = "2*v2 du1^2 + 2 du1 dv1 + 2*v3 du2^2 + 2 du2 dv2 + 2 du3 dv3"
FLAT3 = "2 du1 dv1 + 2 du2 dv2 + 2 du3 dv3"
CANONICAL = [b for k in (1, 2, 3) for b in enumerate_boost_vectors(k) if b[0]]


@contextmanager
def criterion(n, capsys, budget=None):
    start = time.perf_counter()
    status = "FAIL"
    detail = ""
    try:
        yield
        took = time.perf_counter() - start
        if budget is not None and took >= budget:
            detail = f" (over budget: {took:.2f}s >= {budget}s)"
            raise AssertionError(f"criterion {n} took {took:.2f}s, budget {budget}s")
        status = "PASS"
    except Exception as exc:
        detail = detail or f" ({type(exc).__name__}: {str(exc)[:120]})"
        raise
    finally:
        took = time.perf_counter() - start
        with capsys.disabled():
            print(f"\ncriterion {n}: {status} [{took:.2f}s]{detail if status == 'FAIL' else ''}")


def _monos(text):
    return {m.strip().replace("*", "") for m in text.strip("[]").split(",")}


def test_criterion_01_boost_enumeration(capsys):
    with criterion(1, capsys, budget=1):
        assert enumerate_boost_vectors(2) == [(0, 0), (0, 1), (1, 1), (1, 2)]
        assert enumerate_boost_vectors(3) == [(0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 2),
                                              (1, 1, 1), (1, 1, 2), (1, 2, 2), (1, 2, 4)]
        for k in range(1, 11):
            vecs = enumerate_boost_vectors(k)
            assert len(vecs) == len(set(vecs)) == 2 ** k


def test_criterion_02_shape_tables(capsys):
    with criterion(2, capsys, budget=1):
        t = shape_tables((1, 2, 4))
        A = {
            (0, 0): "[v1^2,v2]",
            (0, 1): "[v1^3,v1v2]",
            (0, 2): "[v1^5,v1^3v2,v1v2^2,v1v3]",
            (1, 1): "[v1^4,v1^2v2,v2^2,v3]",
            (1, 2): "[v1^6,v1^4v2,v1^2v2^2,v2^3,v1^2v3,v2v3]",
            (2, 2): "[v1^8,v1^6v2,v1^4v2^2,v1^2v2^3,v2^4,v1^4v3,v1^2v2v3,v2^2v3,v3^2]",
        }
        for (i, j), text in A.items():
            assert _monos(format_shape(t.A[i][j])) == _monos(text), (i, j)
        assert len(t.A[2][2].generators) == 9
        assert [_monos(format_shape(s)) for s in t.B] == [_monos("[v1]"), _monos("[v1^2,v2]"),
                                                          _monos("[v1^4,v1^2v2,v2^2,v3]")]
        a = [[format_shape(t.a[i][j]).replace("*", "") for j in range(3)] for i in range(3)]
        assert a == [["1", "0", "0"], ["0", "1", "0"], ["[v1v2]", "[v1^2]", "1"]]


def test_criterion_03_appendix_b(capsys):
    golden = (FIXTURES / "appendix_b.txt").read_text(encoding="utf-8")
    with criterion(3, capsys, budget=1):
        code = main(["appendix-b", "--k", "4", "--format", "table"])
        out = capsys.readouterr().out
        assert code == 0 and out == golden
        assert "    A44: d1 + 2d2 + 4d3 + 8d4 = 16" in out.split("(1,2,4,8):")[1]
        records = json.loads(_run_json(["appendix-b", "--k", "4"], capsys))
        assert len({tuple(r["boost"]) for r in records if r["k"] == 4}) == 16
        assert {"k": 4, "boost": [1, 2, 4, 8], "component": "A", "i": 4, "j": 4, "target": 16} in records


def _run_json(argv, capsys):
    main(argv + ["--format", "json"])
    return capsys.readouterr().out


def test_criterion_04_vsi_pipeline(capsys):
    with criterion(4, capsys, budget=60):
        g = fixture_metric("v17").metric
        r1 = pullback_limit(g, (1, 2, 4))
        assert r1.converged and r1.metric.line_element() == G1_TEXT
        r2 = pullback_limit(r1.metric, (1, 1, 0))
        assert r2.converged and r2.metric.line_element() == FLAT3
        assert riemann(r2.metric)["riemann"].is_zero() and is_flat(r2.metric)
        inv = invariants(g)
        assert set(inv) == set(BASIS) and all(p.is_zero() for p in inv.values())


def test_criterion_05_type_iv_example(capsys):
    with criterion(5, capsys, budget=60):
        fx = fixture_metric("v18")
        res = nabla_F(fx.metric)
        assert res.nabla_F.is_zero() and res.killing_yano
        rep = classify(fx.canonical)
        assert [t for t in ("I", "II", "III", "IV", "V") if rep.holds(t)] == ["I", "II", "III", "IV"]
        cm = fx.canonical
        v = cm.coords.v_vars()
        for j in range(cm.k):
            total = cm.A[0, j].diff(v[0])
            for i in range(1, cm.k):
                total = total + cm.A[i, j].diff(v[i])
            assert total.is_zero(), j


def _templates(n=50):
    rng = random.Random(2024)
    out = []
    for i in range(n):
        b = CANONICAL[i % len(CANONICAL)]
        cm = instantiate_template(b, seed=rng.randrange(10 ** 6), m=rng.randrange(2), u_terms=bool(i % 2))
        out.append((b, cm.assemble()))
    return out


def test_criterion_06_invariant_agreement(capsys):
    with criterion(6, capsys):
        for b, g in _templates():
            rep = invariant_agreement(g, b)
            assert rep.agree, (b, rep.to_dict())
            for s in (Fraction(1, 2), 2, Fraction(3, 5)):
                assert invariants_at(finite_pullback(g, b, s), {}) == rep.original, (b, s)


def test_criterion_07_limit_is_boost_invariant(capsys):
    with criterion(7, capsys):
        seen = 0
        for b, g in _templates():
            res = pullback_limit(g, b)
            if not res.converged:
                continue
            seen += 1
            g0 = res.limit_metric()
            assert all(w == 0 for *_, w in graded_terms(g0, b)), b
            assert killing_check(g0, boost_generator_field(g0.coords, b)), b
        assert seen > 0


def test_criterion_08_csi_certificate(capsys):
    frozen = json.loads((FIXTURES / "csi_invariants.json").read_text(encoding="utf-8"))["invariants"]
    with criterion(8, capsys, budget=120):
        g = fixture_metric("csi4d").metric
        cert = csi_certificate(g)
        assert cert.constant
        values = {k: str(v) for k, v in cert.to_dict()["invariants"].items()}
        assert values == frozen["csi4d"]
        res = vsi_search(g, max_depth=3)
        assert isinstance(res, NotFound), f"vsi_search found a limit chain {[s.boost for s in res.steps]}"


FIXTURE_NAMES = sorted(p.stem for p in METRICS.glob("*.json"))


def test_criterion_09_numeric_oracle(capsys):
    with criterion(9, capsys):
        for name in FIXTURE_NAMES:
            g = fixture_metric(name).metric
            rng = random.Random(name)
            for _ in range(5):
                pt = {i: Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for i in range(g.coords.n)}
                for i in g.coords.v_vars():
                    pt[i] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                exact = invariants_at(g, pt)
                approx = numeric_oracle(g, pt, h=Fraction(1, 10 ** 4))
                for k in BASIS:
                    assert agrees(exact[k], approx[k], rel=1e-6, abs_tol=1e-8), (name, k, pt)


PROPERTY_SUITES = [
    test_curvature.test_riemann_symmetries_and_first_bianchi,
    test_curvature.test_second_bianchi,
    test_curvature.test_metric_compatibility,
    test_algebra.test_ring_axioms,
    test_algebra.test_parse_format_round_trip,
]


def test_criterion_10_property_suites(capsys):
    with criterion(10, capsys, budget=600):
        for fn in PROPERTY_SUITES:
            assert fn._hypothesis_internal_use_settings.max_examples >= 500, fn.__name__
            fn()


@pytest.mark.parametrize("name", ["kundt", "csi4d_alt"])
def test_frozen_csi_constants(name):
    frozen = json.loads((FIXTURES / "csi_invariants.json").read_text(encoding="utf-8"))["invariants"]
    cert = csi_certificate(fixture_metric(name).metric)
    assert cert.constant
    assert {k: str(v) for k, v in cert.to_dict()["invariants"].items()} == frozen[name]
