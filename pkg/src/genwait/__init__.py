"""Exact and simulated waiting-time statistics for generating finite groups.

The package computes, for a finite permutation group G and a fixed subset Y,
the distribution and expectation of the number of uniform random elements
needed so that the drawn elements together with Y generate G.  Everything
user-facing is exact rational arithmetic; the Monte Carlo module exists to
cross-check the exact path, not to replace it.
"""
from .config import Caps, caps_from_env
from .errors import (CapExceeded, CheckFailed, GenwaitError, ParseError,
                     PrecisionExhausted, ValidationError)
from .perms import (FiniteGroup, Permutation, cycle_string, generate_group,
                    parse_cycles)
from .lattice import SubgroupLattice, enumerate_subgroups
from .genstats import (brute_force_prob, expected_waiting,
                       expected_waiting_series, frattini_criterion,
                       generation_report, growth_degree, max_counts,
                       min_generators, prob_generating, singleton_gap,
                       strong_scan, theorem_bounds)
from .montecarlo import estimate_expectation, sample_tau
from .crowns import (chief_classify, chief_series, delta_cross_check,
                     intertwiner_space, module_invariants, mu_split,
                     soluble_checks)
from .constructions import (build, crown_power_group, crown_power_preset,
                            diagonal_count, goursat_maximals, inversion,
                            is_P_prime, parse_builder, strong_instance_check)
from .corpus import CORPUS, run_criteria

__version__ = "0.1.0"

__all__ = [
    "Caps", "caps_from_env",
    "GenwaitError", "ParseError", "ValidationError", "CapExceeded",
    "CheckFailed", "PrecisionExhausted",
    "Permutation", "FiniteGroup", "generate_group", "parse_cycles",
    "cycle_string",
    "SubgroupLattice", "enumerate_subgroups",
    "prob_generating", "brute_force_prob", "expected_waiting",
    "expected_waiting_series", "max_counts", "growth_degree",
    "theorem_bounds", "singleton_gap", "strong_scan", "frattini_criterion",
    "min_generators", "generation_report",
    "estimate_expectation", "sample_tau",
    "chief_classify", "chief_series", "delta_cross_check",
    "intertwiner_space", "module_invariants", "mu_split", "soluble_checks",
    "build", "parse_builder", "crown_power_group", "crown_power_preset",
    "inversion", "goursat_maximals", "diagonal_count", "is_P_prime",
    "strong_instance_check",
    "CORPUS", "run_criteria",
    "__version__",
]
