"""Pure-Python/numpy fallback for the composition kernels.

Same contract as the compiled backend:

  * elements of a group of order n are the integers 0..n-1, row-sorted
    lexicographically by image array, so 0 is the identity;
  * table[i, j] is the index of the product "apply i, then j";
  * subgroup bitset keys are the raw bytes of a little-endian uint64 word
    array, word w bit b marking element 64*w + b.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def _pack_key(member: np.ndarray, nwords: int) -> bytes:
    # np.packbits with bitorder="little" lays bits out exactly like the
    # little-endian uint64 words the compiled backend emits
    raw = np.packbits(member, bitorder="little").tobytes()
    return raw.ljust(nwords * 8, b"\x00")


def build_table(images: np.ndarray) -> np.ndarray:
    """Multiplication table of a closed, lexicographically sorted list of
    permutations given as an (n, degree) int32 image matrix.

    table[i, j] = index of the permutation x -> images[j][images[i][x]].
    """
    n, _deg = images.shape
    index = {images[i].tobytes(): i for i in range(n)}
    table = np.empty((n, n), dtype=np.int32)
    for i in range(n):
        block = images[:, images[i]]
        row = table[i]
        for j in range(n):
            try:
                row[j] = index[block[j].tobytes()]
            except KeyError:
                raise ValueError(
                    "product fell outside the element list; input is not a closed group"
                ) from None
    return table


def dimino_join(table: np.ndarray, base_elems: np.ndarray, gens) -> np.ndarray:
    """Elements of <base_elems, gens>, ascending.

    base_elems must be a subgroup and gens must contain a generating set of
    it together with whatever new elements are being adjoined (Dimino's coset
    filling multiplies coset representatives by every generator of the join,
    so the base's own generators have to be in the list).  A join that grows
    past half the group is returned as the whole group without finishing the
    fill (Lagrange: no proper subgroup is that large).
    """
    n = table.shape[0]
    half = n >> 1
    member = np.zeros(n, dtype=bool)
    member[np.asarray(base_elems, dtype=np.intp)] = True
    gens = [int(g) for g in gens]
    if all(member[g] for g in gens):
        return np.flatnonzero(member).astype(np.int32)
    base = np.asarray(base_elems, dtype=np.intp)
    m = len(base)
    reps: list[int] = []
    count = int(member.sum())
    if count != m:
        raise ValueError("base element list contains duplicates")

    def add_coset(t: int) -> None:
        member[table[base, t]] = True
        reps.append(t)

    for g in gens:
        if not member[g]:
            add_coset(g)
            count += m
    i = 0
    while i < len(reps) and count <= half:
        row = table[reps[i]]
        i += 1
        for s in gens:
            t = int(row[s])
            if not member[t]:
                add_coset(t)
                count += m
    if count > half:
        return np.arange(n, dtype=np.int32)
    out = np.flatnonzero(member).astype(np.int32)
    if len(out) != count:
        raise ValueError("coset filling collided; base is not a subgroup")
    return out


def extend_round(table: np.ndarray, table_t: np.ndarray, base_elems: np.ndarray,
                 base_gens, cands, seen: set) -> list:
    """Join the base subgroup with each candidate generator.

    Returns (bits_key, elems, generator) triples for every join whose bitset
    key was not yet in `seen`; `seen` is updated in place.  Candidates already
    inside the base are skipped.  table_t is the transposed table (coset fills
    gather within one of its rows); a join that grows past half the group is
    cut short since by Lagrange it can only be the whole group.
    """
    n = table.shape[0]
    nwords = (n + 63) >> 6
    half = n >> 1
    base = np.asarray(base_elems, dtype=np.intp)
    m = len(base)
    base_member = np.zeros(n, dtype=bool)
    base_member[base] = True
    gens_prefix = [int(g) for g in base_gens]
    full_key = None
    results = []
    for c in cands:
        c = int(c)
        if base_member[c]:
            continue
        member = base_member.copy()
        gens = gens_prefix + [c]
        reps = []
        count = m
        for g in gens:
            if not member[g]:
                member[table_t[g][base]] = True
                reps.append(g)
                count += m
        i = 0
        while i < len(reps) and count <= half:
            row = table[reps[i]]
            i += 1
            for s in gens:
                t = int(row[s])
                if not member[t]:
                    member[table_t[t][base]] = True
                    reps.append(t)
                    count += m
        if count > half:
            if full_key is None:
                full_key = _pack_key(np.ones(n, dtype=bool), nwords)
            key, elems = full_key, np.arange(n, dtype=np.int32)
        else:
            key = _pack_key(member, nwords)
            elems = np.flatnonzero(member).astype(np.int32)
        if key in seen:
            continue
        seen.add(key)
        results.append((key, elems, c))
    return results
