# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled composition kernels.

Contract shared with the fallback backend in _pykernels: elements are
0..n-1 sorted lexicographically by image array (0 = identity), table[i, j]
is "apply i, then j", and subgroup bitset keys are the bytes of a
little-endian uint64 word array.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, uint64_t
from libc.string cimport memcpy

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

BACKEND = "c"


cdef inline bint _bit(const uint64_t* bits, Py_ssize_t i) nogil:
    return (bits[i >> 6] >> (i & 63)) & 1


cdef inline void _setbit(uint64_t* bits, Py_ssize_t i) nogil:
    bits[i >> 6] |= (<uint64_t>1) << (i & 63)


def build_table(const int32_t[:, ::1] images):
    """Multiplication table of a closed, lexicographically sorted image
    matrix; products are located by binary search over the sorted rows."""
    cdef Py_ssize_t n = images.shape[0]
    cdef Py_ssize_t deg = images.shape[1]
    out = np.empty((n, n), dtype=np.int32)
    cdef int32_t[:, ::1] table = out
    buf_arr = np.empty(deg, dtype=np.int32)
    cdef int32_t[::1] buf = buf_arr
    cdef Py_ssize_t i, j, x, lo, hi, mid
    cdef int cmp
    with nogil:
        for i in range(n):
            for j in range(n):
                for x in range(deg):
                    buf[x] = images[j, images[i, x]]
                lo = 0
                hi = n
                while lo < hi:
                    mid = (lo + hi) >> 1
                    cmp = 0
                    for x in range(deg):
                        if images[mid, x] < buf[x]:
                            cmp = -1
                            break
                        elif images[mid, x] > buf[x]:
                            cmp = 1
                            break
                    if cmp < 0:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo >= n:
                    break
                for x in range(deg):
                    if images[lo, x] != buf[x]:
                        lo = n
                        break
                if lo >= n:
                    break
                table[i, j] = <int32_t>lo
            if lo >= n:
                break
    if lo >= n:
        raise ValueError(
            "product fell outside the element list; input is not a closed group"
        )
    return out


def dimino_join(const int32_t[:, ::1] table, const int32_t[::1] base_elems, gens):
    """Elements of <base_elems, gens>, ascending.  gens must contain a
    generating set of the base subgroup plus the adjoined elements.  Growth
    past half the group short-circuits to the whole group (Lagrange)."""
    cdef Py_ssize_t n = table.shape[0]
    cdef Py_ssize_t m = base_elems.shape[0]
    cdef Py_ssize_t half = n >> 1
    gens_arr = np.asarray(gens, dtype=np.int32).reshape(-1)
    cdef int32_t[::1] gv = gens_arr
    cdef Py_ssize_t k = gv.shape[0]
    cdef Py_ssize_t nwords = (n + 63) >> 6
    words_arr = np.zeros(nwords, dtype=np.uint64)
    cdef uint64_t[::1] words = words_arr
    reps_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] reps = reps_arr
    cdef Py_ssize_t i, b, rep_i = 0, rep_count = 0, count = m
    cdef int32_t g, t, r
    cdef bint all_in = True
    for i in range(m):
        _setbit(&words[0], base_elems[i])
    for i in range(k):
        if not _bit(&words[0], gv[i]):
            all_in = False
            break
    if not all_in:
        for i in range(k):
            g = gv[i]
            if not _bit(&words[0], g):
                for b in range(m):
                    _setbit(&words[0], table[base_elems[b], g])
                reps[rep_count] = g
                rep_count += 1
                count += m
        while rep_i < rep_count and count <= half:
            r = reps[rep_i]
            rep_i += 1
            for i in range(k):
                t = table[r, gv[i]]
                if not _bit(&words[0], t):
                    for b in range(m):
                        _setbit(&words[0], table[base_elems[b], t])
                    reps[rep_count] = t
                    rep_count += 1
                    count += m
        if count > half:
            return np.arange(n, dtype=np.int32)
    return _extract(words_arr, count)


cdef _extract(words_arr, Py_ssize_t count):
    cdef uint64_t[::1] words = words_arr
    cdef Py_ssize_t nwords = words.shape[0]
    out = np.empty(count, dtype=np.int32)
    cdef int32_t[::1] o = out
    cdef Py_ssize_t i, w = 0, base
    cdef uint64_t word
    cdef int bit
    for i in range(nwords):
        word = words[i]
        base = i << 6
        while word:
            bit = __builtin_ctzll(word)
            if w >= count:
                raise ValueError("coset filling collided; base is not a subgroup")
            o[w] = <int32_t>(base + bit)
            w += 1
            word &= word - 1
    if w != count:
        raise ValueError("coset filling collided; base is not a subgroup")
    return out


def extend_round(const int32_t[:, ::1] table,
                 const int32_t[:, ::1] table_t,
                 const int32_t[::1] base_elems,
                 const int32_t[::1] base_gens,
                 const int32_t[::1] cands,
                 set seen):
    """Join the base subgroup with each candidate generator; return
    (bits_key, elems, generator) triples for joins not already in `seen`.

    table_t is the transposed table: coset fills read products h*t for all h
    across one fixed t, so going through table_t[t] keeps them in one row.
    A join is cut short as soon as it exceeds half the group: by Lagrange it
    can only be the whole group then.
    """
    cdef Py_ssize_t n = table.shape[0]
    cdef Py_ssize_t m = base_elems.shape[0]
    cdef Py_ssize_t kb = base_gens.shape[0]
    cdef Py_ssize_t nc = cands.shape[0]
    cdef Py_ssize_t nwords = (n + 63) >> 6
    cdef Py_ssize_t half = n >> 1
    base_words_arr = np.zeros(nwords, dtype=np.uint64)
    cdef uint64_t[::1] base_words = base_words_arr
    work_arr = np.zeros(nwords, dtype=np.uint64)
    cdef uint64_t[::1] work = work_arr
    gens_arr = np.empty(kb + 1, dtype=np.int32)
    cdef int32_t[::1] gens = gens_arr
    reps_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] reps = reps_arr
    cdef Py_ssize_t ci, i, b, rep_i, rep_count, count
    cdef int32_t c, g, t, r
    cdef bint is_full
    cdef list results = []
    cdef object full_key = None
    for i in range(m):
        _setbit(&base_words[0], base_elems[i])
    for i in range(kb):
        gens[i] = base_gens[i]
    for ci in range(nc):
        c = cands[ci]
        if _bit(&base_words[0], c):
            continue
        memcpy(&work[0], &base_words[0], nwords * sizeof(uint64_t))
        gens[kb] = c
        count = m
        rep_count = 0
        rep_i = 0
        with nogil:
            for i in range(kb + 1):
                g = gens[i]
                if not _bit(&work[0], g):
                    for b in range(m):
                        _setbit(&work[0], table_t[g, base_elems[b]])
                    reps[rep_count] = g
                    rep_count += 1
                    count += m
            while rep_i < rep_count and count <= half:
                r = reps[rep_i]
                rep_i += 1
                for i in range(kb + 1):
                    t = table[r, gens[i]]
                    if not _bit(&work[0], t):
                        for b in range(m):
                            _setbit(&work[0], table_t[t, base_elems[b]])
                        reps[rep_count] = t
                        rep_count += 1
                        count += m
        is_full = count > half
        if is_full:
            if full_key is None:
                full = np.empty(nwords, dtype=np.uint64)
                full[:] = ~np.uint64(0)
                if n & 63:
                    full[nwords - 1] = (np.uint64(1) << np.uint64(n & 63)) - np.uint64(1)
                full_key = full.tobytes()
            key = full_key
        else:
            key = work_arr.tobytes()
        if key in seen:
            continue
        seen.add(key)
        if is_full:
            results.append((key, np.arange(n, dtype=np.int32), int(c)))
        else:
            results.append((key, _extract(work_arr, count), int(c)))
    return results
