"""Subgroup lattice enumeration against a brute-force oracle."""
import itertools

import numpy as np
import pytest

from genwait import constructions as cx
from genwait.config import Caps, caps_from_env
from genwait.errors import CapExceeded
from genwait.lattice import enumerate_subgroups

from conftest import group, lattice

SMALL = ["cyclic(6)", "cyclic(8)", "sym(3)", "dihedral(4)", "quaternion8()",
         "elementary_abelian(2,3)", "alt(4)", "dihedral(6)", "sym(4)",
         "elementary_abelian(2,4)", "cyclic(15)"]


def brute_force_subgroups(G):
    """All subgroups as frozensets, by closing every generating set of size
    up to 4.  d(H) <= 4 for every subgroup of every group of order <= 24
    (the worst case, C_2^4, is order 16), so this misses nothing."""
    n = G.order
    found = {frozenset([0])}
    max_gens = 4 if n <= 16 else 3
    for k in range(1, max_gens + 1):
        for combo in itertools.combinations(range(1, n), k):
            found.add(frozenset(G.closure_indices(list(combo))))
    return found


@pytest.mark.parametrize("spec", SMALL)
def test_subgroup_enumeration_matches_brute_force(spec):
    G = group(spec)
    assert G.order <= 24
    L = lattice(spec)
    got = {frozenset(r.elems.tolist()) for r in L.subgroups}
    assert got == brute_force_subgroups(G)


@pytest.mark.parametrize("spec", SMALL)
def test_mobius_column_sums(spec):
    # sum of mu over [H, G] is 1 at H = G and 0 below it
    L = lattice(spec)
    for h, r in enumerate(L.subgroups):
        total = sum(L.mobius[k] for k in L.overgroups_containing(r.elems))
        assert total == (1 if r.order == L.group.order else 0)


@pytest.mark.parametrize("spec", ["sym(3)", "dihedral(4)", "alt(4)", "quaternion8()"])
def test_maximal_flags_match_cover_relation(spec):
    L = lattice(spec)
    for i, r in enumerate(L.subgroups):
        is_max = (r.order < L.group.order) and L.upper_covers[i] == [L.top_index]
        assert bool(L.maximal_flags[i]) == is_max


def test_frattini_is_intersection_of_maximals(q8_lattice):
    L = q8_lattice
    maximal_sets = [set(L.subgroups[i].elems.tolist())
                    for i in np.flatnonzero(L.maximal_flags)]
    frat = set.intersection(*maximal_sets)
    assert set(L.subgroups[L.frattini_index()].elems.tolist()) == frat
    assert len(frat) == 2  # Frat(Q8) = {1, -1}


def test_normality_matches_conjugation(s3_lattice):
    L = s3_lattice
    for i in range(len(L.subgroups)):
        orbit = L.conjugacy_orbit(i)
        assert L.is_normal(i) == (len(orbit) == 1)


def test_a5_lattice_shape():
    L = lattice("alt(5)")
    assert len(L.subgroups) == 59
    # index-5, -6, -10 maximal classes: 5 x A4, 6 x D5, 10 x S3
    counts = {}
    for i in np.flatnonzero(L.maximal_flags):
        idx = L.group.order // L.subgroups[i].order
        counts[idx] = counts.get(idx, 0) + 1
    assert counts == {5: 5, 6: 6, 10: 10}


def test_order_cap_refuses():
    with pytest.raises(CapExceeded):
        enumerate_subgroups(group("alt(5)"),
                            caps=Caps(lattice_order_cap=10))


def test_subgroup_orders_agree_across_presentations():
    # D6 on 6 points and S3 x C2 on 5 points are isomorphic groups, so
    # their subgroup order multisets must match
    L1 = lattice("dihedral(6)")
    assert L1.group.order == 12
    counts1 = sorted(r.order for r in L1.subgroups)
    from genwait.perms import generate_group, parse_cycles
    a = parse_cycles("(1,2,3)", 5)
    b = parse_cycles("(2,3)", 5)
    c = parse_cycles("(4,5)", 5)
    G2 = generate_group([a, b, c], name="S3xC2")
    L2 = enumerate_subgroups(G2)
    counts2 = sorted(r.order for r in L2.subgroups)
    assert counts1 == counts2


def test_caps_env_round_trip(monkeypatch):
    monkeypatch.setenv("GENWAIT_LATTICE_ORDER_CAP", "123")
    caps = caps_from_env()
    assert caps.lattice_order_cap == 123
