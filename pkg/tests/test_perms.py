"""Permutation arithmetic and group closure."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genwait.errors import ParseError, ValidationError
from genwait.perms import (Permutation, cycle_string, generate_group,
                           parse_cycles)

from conftest import group


def perm_strategy(degree=7):
    return st.permutations(range(degree)).map(
        lambda imgs: Permutation(np.array(imgs, dtype=np.int32)))


@given(perm_strategy(), perm_strategy(), perm_strategy())
def test_composition_associative(a, b, c):
    assert ((a * b) * c).images == (a * (b * c)).images


@given(perm_strategy())
def test_inverse_cancels(a):
    assert (a * a.inverse()).is_identity()
    assert (a.inverse() * a).is_identity()


@given(perm_strategy())
@settings(max_examples=40)
def test_cycle_string_round_trip(a):
    assert parse_cycles(cycle_string(a), a.degree).images == a.images


def test_parse_fixed_points_implicit():
    p = parse_cycles("(1,3)", 5)
    assert p.images == (2, 1, 0, 3, 4)
    assert cycle_string(p) == "(1,3)"
    assert cycle_string(parse_cycles("()", 4)) == "()"


@pytest.mark.parametrize("bad", ["(1,2", "(0,1)", "(1,1)", "(1,9)", "(a,b)"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ParseError):
        parse_cycles(bad, 5)


def test_s3_structure(s3):
    assert s3.order == 6
    assert len(s3.conjugacy_classes) == 3
    sizes = sorted(len(c) for c in s3.conjugacy_classes)
    assert sizes == [1, 2, 3]
    orders = sorted(s3.element_orders.tolist())
    assert orders == [1, 2, 2, 2, 3, 3]


def test_product_index_matches_permutation_product(s3):
    for i in range(s3.order):
        for j in range(s3.order):
            via_table = s3.product_index(i, j)
            direct = s3.index_of(s3.element(i) * s3.element(j))
            assert via_table == direct


def test_class_representatives_cover(s3):
    reps = set()
    for r in s3.class_representatives:
        for c, cls in enumerate(s3.conjugacy_classes):
            if int(r) in cls:
                reps.add(c)
    assert reps == set(range(len(s3.conjugacy_classes)))


def test_center_and_derived():
    q8 = group("quaternion8()")
    assert len(q8.center_indices()) == 2
    s4 = group("sym(4)")
    der = s4.derived_subgroup_indices()
    assert len(der) == 12  # Alt(4)


def test_nilpotency_flags():
    assert group("dihedral(4)").is_nilpotent()
    assert group("quaternion8()").is_nilpotent()
    assert not group("sym(3)").is_nilpotent()
    assert not group("alt(4)").is_nilpotent()


def test_normal_closure():
    s4 = group("sym(4)")
    # the normal closure of a double transposition is the Klein four-group
    g = s4.index_of(parse_cycles("(1,2)(3,4)", 4))
    assert len(s4.normal_closure_indices([g])) == 4
    # of a transposition: everything
    t = s4.index_of(parse_cycles("(1,2)", 4))
    assert len(s4.normal_closure_indices([t])) == 24


def test_generate_group_rejects_wrong_degrees():
    a = parse_cycles("(1,2)", 3)
    b = parse_cycles("(1,2)", 4)
    with pytest.raises(ValidationError):
        generate_group([a, b])


def test_generated_order_is_lcm_free():
    # closure must find the whole group, not the cyclic hull of one generator
    d5 = group("dihedral(5)")
    assert d5.order == 10
    assert sorted(np.unique(d5.element_orders).tolist()) == [1, 2, 5]


@given(st.integers(2, 10))
def test_cyclic_element_orders_divide(n):
    g = generate_group([parse_cycles(
        "(" + ",".join(str(i + 1) for i in range(n)) + ")", n)])
    assert g.order == n
    assert all(n % int(o) == 0 for o in g.element_orders)
