"""Full subgroup lattice enumeration and lattice-level invariants.

The enumeration is a breadth-first closure: starting from the trivial
subgroup, every known subgroup is joined with every cyclic subgroup (one
canonical generator each), deduplicating by element bitset.  Every subgroup
of the group is a join of cyclic subgroups, so the sweep is exhaustive.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import Caps, caps_from_env
from .errors import CapExceeded, ValidationError
from .perms import FiniteGroup, GroupHomomorphism, cycle_string, quotient_group

__all__ = [
    "SubgroupRef", "SubgroupLattice", "MaximalInfo", "enumerate_subgroups",
]


@dataclass
class SubgroupRef:
    index: int
    order: int
    elems: np.ndarray          # sorted element indices
    bits: bytes                # bitset key
    gen_hint: tuple[int, ...]  # generator element indices found during the sweep


@dataclass
class MaximalInfo:
    """A maximal subgroup together with its core, the primitive quotient
    G/core, and the socle of that quotient."""

    subgroup_index: int
    index_in_group: int
    core_index: int
    quotient: FiniteGroup
    projection: GroupHomomorphism | None  # None when the core is trivial (quotient is G)
    socle_indices: np.ndarray             # element indices inside the quotient
    socle_abelian: bool
    socle_prime: int | None
    socle_dim: int | None


class SubgroupLattice:
    """All subgroups of a finite group, with containment, Möbius values and
    maximality precomputed.  Subgroups are sorted by (order, element list),
    so index 0 is trivial and the last index is the whole group."""

    def __init__(self, group: FiniteGroup, refs: list[SubgroupRef]):
        self.group = group
        self.subgroups = refs
        self.by_bits = {r.bits: r.index for r in refs}
        self.bottom_index = 0
        self.top_index = len(refs) - 1
        if refs[0].order != 1 or refs[-1].order != group.order:
            raise ValidationError("lattice endpoints are wrong")
        self._nwords = (group.order + 63) >> 6
        self._bits_matrix = np.stack([
            np.frombuffer(r.bits, dtype=np.uint64) for r in refs])
        self._orders = np.array([r.order for r in refs], dtype=np.int64)
        self.strict_overs = self._compute_overs()
        self.mobius = self._compute_mobius()
        self.maximal_flags = np.array(
            [len(o) == 1 and o[0] == self.top_index for o in self.strict_overs])
        self.maximal_flags[self.top_index] = False
        self._upper_covers = None
        self._census = None
        self._quotient_cache = {}

    # -- construction helpers -------------------------------------------

    def _compute_overs(self) -> list[np.ndarray]:
        n = len(self.subgroups)
        bits = self._bits_matrix
        orders = self._orders
        overs = []
        for i in range(n):
            cand = np.flatnonzero((orders > orders[i]) & (orders % orders[i] == 0))
            if len(cand):
                mine = bits[i]
                ok = ((bits[cand] & mine) == mine).all(axis=1)
                overs.append(cand[ok].astype(np.int64))
            else:
                overs.append(np.empty(0, dtype=np.int64))
        return overs

    def _compute_mobius(self) -> list[int]:
        n = len(self.subgroups)
        mob = [0] * n
        mob[self.top_index] = 1
        for i in sorted(range(n), key=lambda j: -self._orders[j]):
            if i == self.top_index:
                continue
            mob[i] = -sum(mob[int(k)] for k in self.strict_overs[i])
        return mob

    # -- lookups ----------------------------------------------------------

    def __len__(self):
        return len(self.subgroups)

    @property
    def maximal_indices(self) -> np.ndarray:
        return np.flatnonzero(self.maximal_flags)

    def index_by_elems(self, elems) -> int:
        key = _kernels.pack_key(elems, self.group.order)
        try:
            return self.by_bits[key]
        except KeyError:
            raise ValidationError("element set is not a subgroup of the lattice") from None

    def closure_index(self, gen_idxs) -> int:
        return self.index_by_elems(self.group.closure_indices(gen_idxs))

    def overgroups_containing(self, elem_idxs) -> np.ndarray:
        """Lattice indices of every subgroup containing the given elements
        (equivalently, containing their closure), ascending, self included."""
        h = self.closure_index(elem_idxs)
        return np.sort(np.append(self.strict_overs[h], h))

    def maximals_containing(self, elem_idxs) -> np.ndarray:
        overs = self.overgroups_containing(elem_idxs)
        return overs[self.maximal_flags[overs]]

    def max_counts(self, elem_idxs) -> dict[int, int]:
        """m_n: number of maximal subgroups of each index n containing the
        given elements; indices with count zero are absent."""
        g_order = self.group.order
        counts: dict[int, int] = {}
        for m in self.maximals_containing(elem_idxs):
            n = g_order // int(self._orders[m])
            counts[n] = counts.get(n, 0) + 1
        return dict(sorted(counts.items()))

    def frattini_index(self) -> int:
        maxs = self.maximal_indices
        if len(maxs) == 0:  # trivial group
            return self.top_index
        inter = self._bits_matrix[maxs[0]].copy()
        for m in maxs[1:]:
            inter &= self._bits_matrix[m]
        return self.by_bits[inter.tobytes()]

    def conjugate_index(self, idx: int, g: int) -> int:
        conj = self.group.conjugate_set(self.subgroups[idx].elems, g)
        return self.index_by_elems(conj)

    def conjugacy_orbit(self, idx: int) -> list[int]:
        seen = {idx}
        queue = [idx]
        gens = self.group.generator_indices
        pos = 0
        while pos < len(queue):
            cur = queue[pos]
            pos += 1
            for g in gens:
                j = self.conjugate_index(cur, g)
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return sorted(seen)

    def is_normal(self, idx: int) -> bool:
        return len(self.conjugacy_orbit(idx)) == 1

    def core_index(self, idx: int) -> int:
        orbit = self.conjugacy_orbit(idx)
        inter = self._bits_matrix[orbit[0]].copy()
        for j in orbit[1:]:
            inter &= self._bits_matrix[j]
        return self.by_bits[inter.tobytes()]

    @property
    def upper_covers(self) -> list[list[int]]:
        """Minimal strict overgroups of each subgroup (transitive reduction)."""
        if self._upper_covers is None:
            over_sets = [set(int(x) for x in o) for o in self.strict_overs]
            covers = []
            for i in range(len(self.subgroups)):
                mine = self.strict_overs[i]
                cov = []
                for k in mine:
                    k = int(k)
                    if not any(k in over_sets[int(l)] for l in mine if int(l) != k):
                        cov.append(k)
                covers.append(sorted(cov))
            self._upper_covers = covers
        return self._upper_covers

    # -- maximal census -----------------------------------------------------

    def _quotient_data(self, core_idx: int):
        cached = self._quotient_cache.get(core_idx)
        if cached is not None:
            return cached
        G = self.group
        core = self.subgroups[core_idx]
        if core.order == 1:
            Q, hom = G, None
        else:
            Q, hom = quotient_group(G, core.elems)
        socle = _socle_indices(Q)
        socle_set = socle.tolist()
        abelian = _is_abelian_subset(Q, socle)
        prime = dim = None
        if abelian:
            orders = Q.element_orders[socle]
            nontriv = orders[orders > 1]
            primes = set(int(o) for o in nontriv)
            if len(primes) == 1:
                p = primes.pop()
                size = len(socle_set)
                dim = 0
                while p**dim < size:
                    dim += 1
                if p**dim == size:
                    prime = p
            if prime is None:
                raise ValidationError("abelian socle is not elementary abelian")
        data = (Q, hom, socle, abelian, prime, dim)
        self._quotient_cache[core_idx] = data
        return data

    def maximal_census(self) -> list[MaximalInfo]:
        """Core, primitive quotient and socle data for every maximal subgroup."""
        if self._census is None:
            out = []
            for m in self.maximal_indices:
                m = int(m)
                core_idx = self.core_index(m)
                Q, hom, socle, abelian, prime, dim = self._quotient_data(core_idx)
                out.append(MaximalInfo(
                    subgroup_index=m,
                    index_in_group=self.group.order // int(self._orders[m]),
                    core_index=core_idx,
                    quotient=Q,
                    projection=hom,
                    socle_indices=socle,
                    socle_abelian=abelian,
                    socle_prime=prime,
                    socle_dim=dim,
                ))
            self._census = out
        return self._census

    # -- export ------------------------------------------------------------

    def to_json(self, include_covers: bool = False) -> dict:
        subs = []
        for r in self.subgroups:
            entry = {
                "index": r.index,
                "order": r.order,
                "generators": [cycle_string(self.group.element(int(g)))
                               for g in r.gen_hint] or ["()"],
                "mobius": str(self.mobius[r.index]),
                "maximal": bool(self.maximal_flags[r.index]),
            }
            if include_covers:
                entry["upper_covers"] = self.upper_covers[r.index]
            subs.append(entry)
        return {
            "schema": "genwait/1",
            "kind": "lattice",
            "group": {"name": self.group.name, "order": self.group.order,
                      "degree": self.group.degree},
            "subgroup_count": len(self.subgroups),
            "subgroups": subs,
        }


def _is_prime_power(m: int) -> bool:
    if m < 2:
        return False
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            return m == 1
        p += 1
    return True  # m itself is prime


def _socle_indices(Q: FiniteGroup) -> np.ndarray:
    """Socle of Q: the join of its minimal normal subgroups, found as the
    inclusion-minimal normal closures of single elements."""
    closures: dict[bytes, np.ndarray] = {}
    for rep in Q.class_representatives:
        if rep == 0:
            continue
        ncl = Q.normal_closure_indices([rep])
        closures[_kernels.pack_key(ncl, Q.order)] = ncl
    items = list(closures.values())
    minimal = []
    for i, a in enumerate(items):
        sa = set(a.tolist())
        if not any(set(b.tolist()) < sa for b in items):
            minimal.append(a)
    gens: set[int] = set()
    for m in minimal:
        gens.update(int(x) for x in m)
    gens.discard(0)
    if not gens:
        return np.array([0], dtype=np.int32)
    return Q.closure_indices(sorted(gens))


def _is_abelian_subset(Q: FiniteGroup, elems: np.ndarray) -> bool:
    sub = Q.table[np.ix_(elems, elems)]
    return bool((sub == sub.T).all())


def enumerate_subgroups(G: FiniteGroup, caps: Caps | None = None) -> SubgroupLattice:
    """Enumerate every subgroup of G.  Aborts (never truncates) when the
    group order or the running subgroup count exceeds its cap."""
    caps = caps or caps_from_env()
    if G.order > caps.lattice_order_cap:
        raise CapExceeded(
            f"lattice enumeration refused for order {G.order} "
            f"(cap {caps.lattice_order_cap})")
    table = G.table
    table_t = np.ascontiguousarray(table.T)
    n = G.order

    # One canonical generator per distinct cyclic subgroup of prime-power
    # order, smallest generator first.  Composite-order cyclics are joins of
    # the prime-power cyclics inside them (an element is a product of its own
    # commuting prime-power powers), so they are redundant as candidates yet
    # still show up in the enumeration as joins.
    orders = G.element_orders
    cyc_keys: set[bytes] = set()
    cyc_gens: list[int] = []
    for g in range(1, n):
        if not _is_prime_power(int(orders[g])):
            continue
        elems = G.cyclic_subgroup_indices(g)
        key = _kernels.pack_key(elems, n)
        if key not in cyc_keys:
            cyc_keys.add(key)
            cyc_gens.append(g)
    cands = np.array(cyc_gens, dtype=np.int32)

    trivial_elems = np.array([0], dtype=np.int32)
    trivial_key = _kernels.pack_key(trivial_elems, n)
    seen = {trivial_key}
    found: list[tuple[bytes, np.ndarray, tuple[int, ...]]] = [
        (trivial_key, trivial_elems, ())]
    pos = 0
    while pos < len(found):
        _key, elems, gens = found[pos]
        pos += 1
        if len(elems) == n:
            continue  # the whole group joins to nothing new
        base_gens = np.asarray(gens, dtype=np.int32)
        for key, new_elems, c in _kernels.extend_round(table, table_t, elems,
                                                       base_gens, cands, seen):
            found.append((key, new_elems, gens + (int(c),)))
            if len(found) > caps.subgroup_count_cap:
                raise CapExceeded(
                    f"subgroup count exceeded cap {caps.subgroup_count_cap}",
                    partial=len(found))

    order_key = sorted(range(len(found)),
                       key=lambda i: (len(found[i][1]), tuple(found[i][1])))
    refs = []
    for new_idx, old_idx in enumerate(order_key):
        key, elems, gens = found[old_idx]
        refs.append(SubgroupRef(index=new_idx, order=len(elems), elems=elems,
                                bits=key, gen_hint=gens))
    return SubgroupLattice(G, refs)
