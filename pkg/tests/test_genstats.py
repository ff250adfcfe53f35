"""Exact generation statistics: oracles, identities, growth bounds."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genwait.config import Caps
from genwait.errors import CapExceeded
from genwait.genstats import (brute_force_prob, expected_waiting,
                              expected_waiting_series, frattini_criterion,
                              generation_report, growth_degree, max_counts,
                              min_generators, prob_generating, singleton_gap,
                              strong_scan, theorem_bounds)

from conftest import group, lattice


def test_known_expectations():
    assert expected_waiting(lattice("sym(3)"), []) == Fraction(29, 10)
    assert expected_waiting(lattice("cyclic(2)"), []) == 2
    # d + sum 1/(2^i - 1) at d = 3
    assert expected_waiting(lattice("elementary_abelian(2,3)"), []) == \
        3 + Fraction(1, 1) + Fraction(1, 3) + Fraction(1, 7)


def test_prob_table_values():
    L = lattice("sym(3)")
    assert prob_generating(L, [], 2) == Fraction(1, 2)
    assert prob_generating(L, [], 3) == Fraction(7, 9)
    assert prob_generating(L, [], 0) == 0
    assert prob_generating(L, [], 1) == 0


@pytest.mark.parametrize("spec", ["sym(3)", "dihedral(4)", "alt(4)", "cyclic(6)"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_mobius_prob_matches_brute_force(spec, n):
    G = group(spec)
    L = lattice(spec)
    assert prob_generating(L, [], n) == brute_force_prob(G, [], n)
    for r in G.class_representatives:
        y = [G.element(int(r))]
        assert prob_generating(L, y, n) == brute_force_prob(G, y, n)


@pytest.mark.parametrize("spec", ["sym(3)", "quaternion8()", "alt(4)",
                                  "dihedral(6)", "cyclic(12)"])
def test_series_equals_closed_form(spec):
    L = lattice(spec)
    G = L.group
    assert expected_waiting_series(L, []) == expected_waiting(L, [])
    for r in G.class_representatives:
        y = [int(r)]
        assert expected_waiting_series(L, y) == expected_waiting(L, y)


@given(st.integers(0, 23), st.integers(0, 7))
@settings(max_examples=60, deadline=None)
def test_probability_monotone_in_n_and_y(g_idx, n):
    L = lattice("sym(4)")
    g = g_idx % L.group.order
    p0 = prob_generating(L, [], n)
    p1 = prob_generating(L, [], n + 1)
    assert 0 <= p0 <= p1 <= 1
    # adjoining an element can only help
    assert prob_generating(L, [g], n) >= p0


@given(st.lists(st.integers(0, 23), max_size=3))
@settings(max_examples=40, deadline=None)
def test_expectation_shrinks_with_larger_y(y):
    L = lattice("sym(4)")
    e_y = expected_waiting(L, y)
    assert e_y <= expected_waiting(L, [])
    assert e_y >= 0


def test_max_counts_by_hand():
    assert max_counts(lattice("sym(3)"), []) == {2: 1, 3: 3}
    # C2^2: three maximals of index 2
    assert max_counts(lattice("elementary_abelian(2,2)"), []) == {2: 3}
    # counting only maximals containing y
    L = lattice("sym(3)")
    g = 1  # some transposition
    mt = max_counts(L, [g])
    assert mt == {2: 1} or mt == {3: 1}


def test_growth_degree_values():
    g = growth_degree({2: 1, 3: 3})
    assert g.ceil == 1 and g.witness_n == 3
    g0 = growth_degree({})
    assert g0.ceil == 0 and g0.value_str == "0"
    # log 2 / log 4 = 1/2 exactly
    g2 = growth_degree({4: 2})
    assert g2.ceil == 1
    assert g2.value_str.startswith("0.5000000")


@pytest.mark.parametrize("spec", ["sym(3)", "sym(4)", "alt(4)", "alt(5)",
                                  "quaternion8()", "cyclic(15)",
                                  "elementary_abelian(3,2)", "dihedral(8)"])
def test_bounds_and_gaps_hold(spec):
    L = lattice(spec)
    assert theorem_bounds(L, []).ok
    for r in L.group.class_representatives:
        assert theorem_bounds(L, [int(r)]).ok
        assert singleton_gap(L, int(r)).ok


@pytest.mark.parametrize("spec,expected", [
    ("sym(3)", 2), ("elementary_abelian(2,3)", 3), ("quaternion8()", 2),
    ("cyclic(15)", 1), ("alt(5)", 2), ("cyclic(2)", 1),
])
def test_min_generators(spec, expected):
    assert min_generators(lattice(spec)) == expected


@pytest.mark.parametrize("spec", ["quaternion8()", "dihedral(4)", "cyclic(12)",
                                  "sym(3)", "alt(4)"])
def test_frattini_criterion_everywhere(spec):
    assert frattini_criterion(lattice(spec))


def test_scan_rows_s3():
    rows = strong_scan(lattice("sym(3)"))
    by_order = {r.element_order: r for r in rows}
    assert by_order[1].gap == 0 and by_order[1].in_frattini
    assert by_order[2].gap == Fraction(7, 5)
    assert by_order[3].gap == Fraction(9, 10)
    assert not by_order[2].gap_zero


def test_generation_report_closure():
    L = lattice("sym(3)")
    rep = generation_report(L, [1, 2, 3, 4, 5])
    assert rep.closure_order == 6
    assert rep.e == 0
    assert rep.m_table == {}
    assert rep.p_table[0] == 1


def test_identity_element_changes_nothing():
    L = lattice("alt(4)")
    assert expected_waiting(L, [0]) == expected_waiting(L, [])


def test_growth_cap_escalation_guard():
    # comparing two nearly equal irrational ratios must raise once the
    # precision ladder is exhausted, never silently pick one
    from genwait.errors import PrecisionExhausted
    table = {10**6 + 3: 10**6 - 1, 10**6 + 7: 10**6 + 1}
    with pytest.raises(PrecisionExhausted):
        growth_degree(table, caps=Caps(mpmath_dps=5, mpmath_dps_max=6))
    # and resolve fine with the default ladder
    assert growth_degree(table).ceil == 1
