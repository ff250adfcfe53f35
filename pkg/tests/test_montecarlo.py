"""Seeded simulation of the waiting time."""
from fractions import Fraction

import numpy as np
import pytest

from genwait.config import Caps
from genwait.errors import CapExceeded, ValidationError
from genwait.genstats import expected_waiting
from genwait.montecarlo import estimate_expectation, sample_tau

from conftest import group, lattice


def test_same_seed_same_estimate():
    G = group("sym(3)")
    a = estimate_expectation(G, [], samples=2000, seed=123)
    b = estimate_expectation(G, [], samples=2000, seed=123)
    assert a.mean == b.mean
    assert a.variance == b.variance
    assert a.max_observed_tau == b.max_observed_tau


def test_different_seeds_decorrelate():
    G = group("sym(3)")
    a = estimate_expectation(G, [], samples=2000, seed=1)
    b = estimate_expectation(G, [], samples=2000, seed=2)
    assert a.mean != b.mean


def test_worker_split_is_deterministic():
    G = group("alt(4)")
    a = estimate_expectation(G, [], samples=3000, seed=9, workers=3)
    b = estimate_expectation(G, [], samples=3000, seed=9, workers=3)
    assert a.mean == b.mean
    assert a.sample_count == b.sample_count == 3000


@pytest.mark.parametrize("spec", ["cyclic(2)", "sym(3)", "elementary_abelian(2,3)",
                                  "quaternion8()", "alt(4)"])
def test_three_sigma_agreement(spec):
    G = group(spec)
    exact = expected_waiting(lattice(spec), [])
    est = estimate_expectation(G, [], samples=40_000, seed=42)
    z = abs(est.mean - float(exact)) / est.standard_error
    assert z <= 3.0, f"{spec}: z = {z:.2f}"


def test_generating_y_gives_zero_tau():
    G = group("sym(3)")
    y = [1, 2, 3, 4, 5]
    est = estimate_expectation(G, y, samples=500, seed=5)
    assert est.mean == 0.0
    assert est.max_observed_tau == 0
    rng = np.random.default_rng(0)
    assert sample_tau(G, y, rng) == 0


def test_singleton_speeds_up_waiting():
    G = group("sym(3)")
    t = G.index_of(__import__("genwait.perms", fromlist=["parse_cycles"])
                   .parse_cycles("(1,2)", 3))
    full = estimate_expectation(G, [], samples=20_000, seed=7)
    with_t = estimate_expectation(G, [t], samples=20_000, seed=7)
    assert with_t.mean < full.mean


def test_per_sample_iteration_cap():
    # with a 1-draw budget, any tau > 1 sample must raise the diagnostic
    G = group("cyclic(2)")
    with pytest.raises(CapExceeded):
        estimate_expectation(G, [], samples=200, seed=1,
                             caps=Caps(mc_iteration_cap=1))


def test_bad_sample_count_rejected():
    G = group("cyclic(2)")
    with pytest.raises(ValidationError):
        estimate_expectation(G, [], samples=0, seed=1)


def test_estimate_to_json_shape():
    est = estimate_expectation(group("cyclic(3)"), [], samples=100, seed=3)
    d = est.to_json()
    assert set(d) >= {"sample_count", "mean", "standard_error", "seed"}
