"""Builder catalog, presets, product classification, strong instances."""
import numpy as np
import pytest

from genwait import constructions as cx
from genwait.config import Caps
from genwait.errors import CapExceeded, ParseError, ValidationError
from genwait.lattice import enumerate_subgroups
from genwait.perms import epimorphisms_onto, parse_cycles

from conftest import group, lattice


@pytest.mark.parametrize("spec,order", [
    ("cyclic(12)", 12), ("dihedral(7)", 14), ("elementary_abelian(3,2)", 9),
    ("sym(4)", 24), ("alt(5)", 60), ("quaternion8()", 8),
    ("semidihedral16()", 16), ("direct_power(sym(3),2)", 36),
    ("inversion(3,2)", 18), ("inversion(5,1)", 10),
])
def test_catalog_orders(spec, order):
    assert cx.build(spec).order == order


def test_quaternion_element_orders():
    q8 = group("quaternion8()")
    orders = sorted(q8.element_orders.tolist())
    assert orders == [1, 2, 4, 4, 4, 4, 4, 4]


def test_semidihedral_relations():
    X = cx.semidihedral16()
    a = next(i for i in range(16) if X.element_orders[i] == 8)
    bs = [i for i in range(16) if X.element_orders[i] == 2]
    # b a b = a^3 for some involution b outside <a>
    a_cubed = X.product_index(X.product_index(a, a), a)
    hits = [b for b in bs if X.product_index(X.product_index(b, a), b) == a_cubed]
    assert hits, "semidihedral relation not realized"


def test_semidihedral_matrices_form_the_group():
    X, mats = cx.semidihedral16(with_matrices=True)
    assert len(mats) == 16
    def mul(A, B):
        return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(2)) % 3
                           for j in range(2)) for i in range(2))
    lookup = {m: i for i, m in enumerate(mats)}
    assert len(lookup) == 16
    for i in range(16):
        for j in range(16):
            assert lookup[mul(mats[i], mats[j])] == X.product_index(i, j)


def test_sd16_epimorphism_census():
    X = cx.semidihedral16()
    census = epimorphisms_onto(2, X)
    assert census.count == 96
    assert census.aut_count == 16
    assert len(census.kernel_classes) == 6


def test_inversion_is_generalized_dihedral():
    d = cx.build("inversion(5,1)")
    assert sorted(np.unique(d.element_orders).tolist()) == [1, 2, 5]


def test_crown_power_preset_108():
    cp = cx.crown_power_preset("c2xc2_c3")
    assert cp.group.order == 108
    assert cp.module_order ** cp.rho * cp.h_order == 108
    assert cp.rho == 3
    # the distinguished element has order lcm(3, |h|) with nonzero projections
    assert cp.strong_index < cp.group.order


def test_crown_power_108_strong_instance():
    rep = cx.strong_instance_check(cx.crown_power_preset("c2xc2_c3"))
    assert rep.lattice_path
    assert rep.m_v_zero
    assert rep.gap_positive
    assert rep.d_group == rep.generator_target
    assert rep.ok


@pytest.mark.slow
def test_crown_power_sd16_strong_instance():
    cp = cx.crown_power_preset("sd16")
    assert cp.group.order == 5184
    rep = cx.strong_instance_check(cp)
    assert not rep.lattice_path  # order is far above the lattice cap
    assert rep.blocks_primitive
    assert rep.counts_match
    assert rep.factors_pairwise_noniso
    assert rep.sum_has_only_factor_submodules
    assert rep.m_v_zero
    assert rep.d_group == 2 == rep.generator_target
    assert rep.ok


def test_goursat_counts_without_materialization():
    rep = cx.goursat_maximals(group("alt(5)"), 2, materialize=False)
    assert rep.kind1_by_index == {5: 10, 6: 12, 10: 20}
    assert rep.kind2_count == 120
    assert rep.kind2_index == 60
    assert rep.total_by_index == {5: 10, 6: 12, 10: 20, 60: 120}
    assert not rep.materialized


def test_goursat_rejects_non_simple_base():
    with pytest.raises(ValidationError):
        cx.goursat_maximals(group("sym(4)"), 2)
    with pytest.raises(ValidationError):
        cx.goursat_maximals(group("cyclic(5)"), 2)


def test_diagonal_count_a5():
    A5 = group("alt(5)")
    sigma = next(i for i in range(60) if A5.element_orders[i] == 5)
    rep = cx.diagonal_count(A5, 2, sigma)
    assert rep.type1 == {6: 2}
    assert rep.type2 == (1, 5, 60)
    assert rep.total == {6: 2, 60: 5}
    assert rep.verified


@pytest.mark.parametrize("text", [
    "cyclic(7)", "dihedral(12)", "elementary_abelian(2,4)", "sym(5)",
    "alt(6)", "quaternion8()", "semidihedral16()", "inversion(3,3)",
    "direct_power(alt(5),2)", "crown_power(c2xc2_c3)",
])
def test_builder_round_trip(text):
    spec = cx.parse_builder(text)
    assert cx.parse_builder(str(spec)) == spec


def test_builder_rejects_garbage():
    # arity and name problems are parse errors; bad values are validation
    for bad in ["cyclic", "unknown(3)", "sym(2,3)",
                "direct_power(cyclic(2))", "cyclic(x)"]:
        with pytest.raises(ParseError):
            cx.build(bad)
    with pytest.raises(ValidationError):
        cx.build("cyclic(0)")


def test_build_determinism():
    a = cx.build("dihedral(6)")
    b = cx.build("dihedral(6)")
    assert [g.images for g in a.generators] == [g.images for g in b.generators]


def test_group_order_cap():
    with pytest.raises(CapExceeded):
        cx.build("sym(9)", caps=Caps(group_order_cap=100_000))


@pytest.mark.parametrize("p,want", [(7, False), (11, False), (13, False),
                                    (17, False), (19, True), (23, False),
                                    (29, True), (31, False), (37, True)])
def test_special_prime_set(p, want):
    assert cx.is_P_prime(p) == want


def test_special_prime_edge_inputs():
    for composite in (6, 9, 15):
        with pytest.raises(ValidationError):
            cx.is_P_prime(composite)
    # primes below 7 are excluded by definition, not an error
    assert not any(cx.is_P_prime(p) for p in (2, 3, 5))
