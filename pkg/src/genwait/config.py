"""Resource caps and numeric configuration.

Every cap can be overridden per call (pass a Caps instance), per process
(GENWAIT_* environment variables) or from the CLI.  Hitting a cap raises
CapExceeded; nothing is ever truncated silently.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

_ENV_PREFIX = "GENWAIT_"


@dataclass(frozen=True)
class Caps:
    # largest group that enumerate-from-generators will materialize
    group_order_cap: int = 100_000
    # largest group whose full subgroup lattice may be requested; 2600 keeps
    # Alt(7) (order 2520, ~2.5 min) inside and pushes Alt(5)^2 (order 3600,
    # hours of joins) to the counting-only path
    lattice_order_cap: int = 2600
    # abort lattice enumeration past this many subgroups
    subgroup_count_cap: int = 100_000
    # multiplication tables are cached only up to this order (memory guard)
    table_order_cap: int = 4096
    # automorphism-group search refuses larger groups
    aut_order_cap: int = 360
    # homomorphism validation is exhaustive up to this order, sampled above
    hom_exhaustive_cap: int = 4096
    hom_sample_count: int = 100_000
    # Monte Carlo per-sample draw budget
    mc_iteration_cap: int = 10_000_000
    # module-isomorphism brute force refuses larger parameters
    module_dim_cap: int = 6
    module_prime_cap: int = 7
    # epimorphism census enumerates |X|**d tuples up to this many
    epi_tuple_cap: int = 1_000_000
    # starting decimal precision for real comparisons (doubled on demand)
    mpmath_dps: int = 60
    mpmath_dps_max: int = 4000


def caps_from_env(base: Caps | None = None) -> Caps:
    """Default caps with any GENWAIT_<FIELD> environment overrides applied."""
    caps = base if base is not None else Caps()
    overrides = {}
    for f in fields(Caps):
        raw = os.environ.get(_ENV_PREFIX + f.name.upper())
        if raw is not None:
            try:
                overrides[f.name] = int(raw)
            except ValueError as exc:
                raise ValueError(
                    f"environment override {_ENV_PREFIX}{f.name.upper()}={raw!r} is not an integer"
                ) from exc
    return replace(caps, **overrides) if overrides else caps


DEFAULT_CAPS = Caps()
