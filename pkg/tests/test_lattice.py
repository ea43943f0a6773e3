import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idegen.lattice import (ComponentKind, GradedTerm, appendix_b_records, appendix_b_report,
                            component_target, enumerate_boost_vectors, format_appendix_b,
                            format_boost, format_shape, is_canonical, parse_boost, shape_tables,
                            solve_generators, term_weight)
from strategies import FIXTURES

# Equalities as printed in the reference tables (boost -> {target: components}).
# Entries absent here are omitted in the print; see test_printed_table_matches.
PRINTED = {
    (1,): {2: "all"},
    (1, 1): {2: "all"},
    (1, 2): {2: "A11", 3: "A12", 4: "A22"},
    (1, 1, 1): {2: "all"},
    (1, 1, 2): {2: "A11", 3: "A13 A23", 4: "A33"},
    (1, 2, 2): {2: "A11", 3: "A12 A23", 4: "A33"},
    (1, 2, 4): {2: "A11", 3: "A12", 4: "A22", 5: "A13", 6: "A23", 8: "A33"},
    (1, 1, 1, 1): {2: "all"},
    (1, 1, 1, 2): {2: "A11 A22 A33 A12 A13 A23", 3: "A14 A24 A34", 4: "A44"},
    (1, 1, 2, 2): {2: "A11 A22 A12", 3: "A13 A14 A23 A24", 4: "A33 A44 A34"},
    (1, 1, 2, 4): {2: "A11 A22 A12", 3: "A13 A23", 4: "A33", 5: "A14 A24", 6: "A34", 8: "A44"},
    (1, 2, 2, 2): {2: "A11", 3: "A12 A13 A14", 4: "A22 A33 A44 A23 A24 A34"},
    (1, 2, 2, 4): {2: "A11", 3: "A12 A13", 4: "A22 A33 A23", 5: "A14", 6: "A24 A34", 8: "A44"},
    (1, 2, 4, 4): {2: "A11", 3: "A12", 4: "A22", 5: "A13 A14", 6: "A23 A24", 8: "A33 A44 A34"},
    (1, 2, 4, 8): {2: "A11", 3: "A12", 4: "A22", 5: "A13", 6: "A23", 8: "A33",
                   9: "A14", 10: "A24", 12: "A34", 16: "A44"},
}
# the one printed label that contradicts its own equation: A23 has target 4 for (1,2,2)
MISPRINTS = {((1, 2, 2), "A23", 3)}


def _label(i, j):
    return ComponentKind("A", i, j).label


# -- enumeration -------------------------------------------------------------------

def test_enumeration_small_k_matches_printed_lists():
    assert enumerate_boost_vectors(1) == [(0,), (1,)]
    assert enumerate_boost_vectors(2) == [(0, 0), (0, 1), (1, 1), (1, 2)]
    assert enumerate_boost_vectors(3) == [(0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 2),
                                          (1, 1, 1), (1, 1, 2), (1, 2, 2), (1, 2, 4)]
    k4 = [b for b in enumerate_boost_vectors(4) if b[0] == 1]
    assert k4 == [(1, 1, 1, 1), (1, 1, 1, 2), (1, 1, 2, 2), (1, 1, 2, 4),
                  (1, 2, 2, 2), (1, 2, 2, 4), (1, 2, 4, 4), (1, 2, 4, 8)]


@pytest.mark.parametrize("k", range(1, 11))
def test_enumeration_cardinality(k):
    vecs = enumerate_boost_vectors(k)
    assert len(vecs) == 2 ** k == len(set(vecs))
    assert all(is_canonical(b) for b in vecs)


def test_enumeration_rule_brute_force():
    # canonical: the first nonzero entry is 1, then each entry equals or doubles its predecessor
    for k in range(1, 6):
        brute = set()
        for b in itertools.product(range(2 ** k), repeat=k):
            nz = [x for x in b if x]
            if b != tuple([0] * (k - len(nz)) + nz):
                continue
            if nz and (nz[0] != 1 or any(y not in (x, 2 * x) for x, y in zip(nz, nz[1:]))):
                continue
            brute.add(b)
        assert brute == set(enumerate_boost_vectors(k))


def test_boost_text_round_trip():
    assert parse_boost(" 1, 2,4") == (1, 2, 4)
    assert format_boost((1, 2, 4)) == "(1,2,4)"
    for bad in ("", "1,,2", "1,-1", "a"):
        with pytest.raises(ValueError):
            parse_boost(bad)


# -- shapes ---------------------------------------------------------------------

def _shape(text):
    return {m.strip() for m in text.strip("[]").split(",")}


def _fmt(s):
    return _shape(format_shape(s).replace("*", ""))


def test_worked_example_A_matrix():
    t = shape_tables((1, 2, 4))
    expected = {
        (0, 0): "[v1^2,v2]",
        (0, 1): "[v1^3,v1v2]",
        (0, 2): "[v1^5,v1^3v2,v1v2^2,v1v3]",
        (1, 1): "[v1^4,v1^2v2,v2^2,v3]",
        (1, 2): "[v1^6,v1^4v2,v1^2v2^2,v2^3,v1^2v3,v2v3]",
        (2, 2): "[v1^8,v1^6v2,v1^4v2^2,v1^2v2^3,v2^4,v1^4v3,v1^2v2v3,v2^2v3,v3^2]",
    }
    for (i, j), text in expected.items():
        assert _fmt(t.A[i][j]) == _shape(text)
    assert len(t.A[2][2].generators) == 9


def test_worked_example_B_and_a():
    t = shape_tables((1, 2, 4))
    assert [_fmt(s) for s in t.B] == [_shape("[v1]"), _shape("[v1^2,v2]"), _shape("[v1^4,v1^2v2,v2^2,v3]")]
    raw = [[format_shape(t.a_raw[i][j]) for j in range(3)] for i in range(3)]
    assert raw[0] == ["1", "0", "0"] and raw[1][1:] == ["1", "0"] and raw[2][2] == "1"
    assert _fmt(t.a_raw[1][0]) == {"v1"}
    assert _fmt(t.a_raw[2][0]) == _shape("[v1^3,v1v2]")
    assert _fmt(t.a_raw[2][1]) == _shape("[v1^2,v2]")
    simplified = [[format_shape(t.a[i][j]).replace("*", "") for j in range(3)] for i in range(3)]
    assert simplified == [["1", "0", "0"], ["0", "1", "0"], ["[v1v2]", "[v1^2]", "1"]]


def test_equal_weights_make_a_constant():
    t = shape_tables((1, 1, 2))
    assert t.a[1][0].note == "constant, absorbable" and format_shape(t.a[1][0]) == "0"


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda k: st.sampled_from([b for b in enumerate_boost_vectors(k) if b[0]])),
       st.integers(0, 16))
def test_closure_matches_brute_force(b, c):
    s = solve_generators(b, c)
    bound = [c // w for w in b]
    brute_eq = sorted((d for d in itertools.product(*[range(x + 1) for x in bound])
                       if sum(e * w for e, w in zip(d, b)) == c), key=lambda d: tuple(reversed(d)))
    assert list(s.generators) == brute_eq
    brute_le = {d for d in itertools.product(*[range(x + 1) for x in bound])
                if sum(e * w for e, w in zip(d, b)) <= c}
    # b_1 = 1, so every monomial below the bound is dominated by a generator
    assert set(s.members()) == brute_le
    assert all(d in s for d in brute_le)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda k: st.sampled_from([b for b in enumerate_boost_vectors(k) if b[0]])),
       st.data())
def test_generators_give_weight_zero_terms(b, data):
    k = len(b)
    i = data.draw(st.integers(1, k))
    j = data.draw(st.integers(i, k))
    comp = ComponentKind("A", i, j)
    for g in solve_generators(b, component_target(b, comp)).generators:
        assert term_weight(GradedTerm(g, (), (("u", i), ("u", j))), b) == 0


# -- appendix report ---------------------------------------------------------------

def test_appendix_b_golden_fixture():
    assert format_appendix_b(4) == (FIXTURES / "appendix_b.txt").read_text(encoding="utf-8")


def test_printed_table_matches():
    ours = {}
    for r in appendix_b_records(4):
        if "component" in r and "reduces_to" not in r:
            ours.setdefault(tuple(r["boost"]), {})[_label(r["i"], r["j"])] = r["target"]
    mismatches = set()
    for b, groups in PRINTED.items():
        for target, names in groups.items():
            names = [_label(i + 1, j + 1) for i in range(len(b)) for j in range(i, len(b))] \
                if names == "all" else names.split()
            for name in names:
                if ours[b][name] != target:
                    mismatches.add((b, name, target))
    assert mismatches == MISPRINTS


def test_every_canonical_boost_is_reported():
    for k in range(1, 5):
        reps = appendix_b_report(k)
        assert [r.boost for r in reps] == enumerate_boost_vectors(k)
    assert appendix_b_report(4)[-1].groups[-1].target == 16


def test_leading_zero_reduction():
    rep = appendix_b_report(3)[3]
    assert rep.boost == (0, 1, 2) and rep.reduces_to == (1, 2) and rep.shift == 1
    assert "(0,1,2): reduces to k=2 case (1,2), indices shifted by 1" in format_appendix_b(3)
