"""Seeded Monte Carlo estimation of the generation waiting time.

The estimator is an independent check on the exact Möbius values: it never
touches the subgroup lattice unless one is explicitly attached for fast
state joins.  All randomness comes from numpy's Philox counter-based
generator; worker w draws from Philox(SeedSequence(seed, spawn_key=(w,))),
so results are reproducible for a fixed (seed, workers, samples) triple.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .config import Caps, caps_from_env
from .errors import IterationCapExceeded, ValidationError
from .perms import FiniteGroup, Permutation

__all__ = ["McEstimate", "sample_tau", "estimate_expectation", "worker_sample_counts"]


@dataclass
class McEstimate:
    sample_count: int
    mean: float
    variance: float
    standard_error: float
    seed: int
    max_observed_tau: int

    def to_json(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "mean": self.mean,
            "variance": self.variance,
            "standard_error": self.standard_error,
            "seed": self.seed,
            "max_observed_tau": self.max_observed_tau,
        }


class _JoinWalker:
    """Tracks the subgroup generated so far, one drawn element at a time.

    States are interned element sets; transitions are memoized per
    (state, canonical cyclic generator), so repeated samples mostly replay
    dictionary lookups.  Join cost is bounded by Dimino coset fills.
    """

    def __init__(self, G: FiniteGroup, y_idx: list[int], caps: Caps):
        if G.order < 2:
            raise ValidationError("sampling is defined for nontrivial groups only")
        self.G = G
        self.table = G.table  # enforces the table cap before any sampling
        self.full = G.order
        # one canonical generator index per cyclic subgroup
        reps: dict[bytes, int] = {}
        self.cyc_of = np.empty(G.order, dtype=np.int64)
        for g in range(G.order):
            key = G.cyclic_subgroup_indices(g).tobytes()
            self.cyc_of[g] = reps.setdefault(key, g)
        self.states: list[tuple[np.ndarray, tuple[int, ...]]] = []
        self.state_ids: dict[bytes, int] = {}
        self.members: list[set] = []
        start = G.closure_indices(y_idx)
        self.start = self._intern(start, tuple(sorted(y_idx)))
        self.memo: dict[tuple[int, int], int] = {}

    def _intern(self, elems: np.ndarray, gens: tuple[int, ...]) -> int:
        key = elems.tobytes()
        sid = self.state_ids.get(key)
        if sid is None:
            sid = len(self.states)
            self.state_ids[key] = sid
            self.states.append((elems, gens))
            self.members.append(set(int(x) for x in elems))
        return sid

    def is_full(self, sid: int) -> bool:
        return len(self.states[sid][0]) == self.full

    def step(self, sid: int, g: int) -> int:
        c = int(self.cyc_of[g])
        key = (sid, c)
        out = self.memo.get(key)
        if out is None:
            elems, gens = self.states[sid]
            if c in self.members[sid]:
                out = sid
            else:
                new_gens = gens + (c,)
                new = _kernels.dimino_join(
                    self.table, elems, np.asarray(new_gens, dtype=np.int32))
                out = self._intern(new, new_gens)
            self.memo[key] = out
        return out


def _resolve_y(G: FiniteGroup, y) -> list[int]:
    out = set()
    for item in y or ():
        if isinstance(item, Permutation):
            out.add(G.index_of(item))
        else:
            out.add(int(item))
    return sorted(out)


def sample_tau(G: FiniteGroup, y, rng: np.random.Generator,
               walker: _JoinWalker | None = None,
               caps: Caps | None = None) -> int:
    """One draw of tau: the number of uniform elements needed so that they
    generate G together with Y.  Returns 0 without consuming randomness when
    Y alone generates."""
    caps = caps or caps_from_env()
    if walker is None:
        walker = _JoinWalker(G, _resolve_y(G, y), caps)
    sid = walker.start
    if walker.is_full(sid):
        return 0
    n = 0
    cap = caps.mc_iteration_cap
    while not walker.is_full(sid):
        if n >= cap:
            raise IterationCapExceeded(
                f"tau sample exceeded {cap} draws; group order {G.order}")
        sid = walker.step(sid, int(rng.integers(0, G.order)))
        n += 1
    return n


def worker_sample_counts(samples: int, workers: int) -> list[int]:
    """Deterministic split of the sample budget across workers."""
    base, extra = divmod(samples, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def estimate_expectation(G: FiniteGroup, y, samples: int, seed: int,
                         workers: int = 1, caps: Caps | None = None) -> McEstimate:
    """Empirical mean of tau over `samples` seeded draws.

    Worker w consumes its own Philox stream and a fixed share of the budget,
    so the estimate is bit-reproducible for fixed (seed, workers, samples)
    regardless of scheduling; the aggregation below is sequential in worker
    order.  Variance is the unbiased sample variance.
    """
    caps = caps or caps_from_env()
    if samples < 1:
        raise ValidationError("need at least one sample")
    if workers < 1:
        raise ValidationError("need at least one worker")
    y_idx = _resolve_y(G, y)
    walker = _JoinWalker(G, y_idx, caps)
    total = 0
    total_sq = 0
    max_tau = 0
    for w, share in enumerate(worker_sample_counts(samples, workers)):
        rng = np.random.Generator(
            np.random.Philox(seed=np.random.SeedSequence(entropy=seed, spawn_key=(w,))))
        for _ in range(share):
            t = sample_tau(G, y_idx, rng, walker=walker, caps=caps)
            total += t
            total_sq += t * t
            max_tau = max(max_tau, t)
    mean = Fraction(total, samples)
    if samples > 1:
        var = float((Fraction(total_sq) - samples * mean * mean) / (samples - 1))
    else:
        var = 0.0
    return McEstimate(
        sample_count=samples,
        mean=float(mean),
        variance=var,
        standard_error=math.sqrt(var / samples),
        seed=seed,
        max_observed_tau=max_tau,
    )
