"""Compiled and pure-python kernels must implement the same contract."""
import numpy as np
import pytest

from genwait import _kernels
from genwait._kernels import _pykernels as pk
from genwait._kernels import pack_key, unpack_key
from genwait import constructions as cx

try:
    from genwait._kernels import _ckernels as ck
except ImportError:
    ck = None

needs_c = pytest.mark.skipif(ck is None, reason="compiled kernels unavailable")


def _images(spec):
    G = cx.build(spec)
    return np.array([G.element(i).images for i in range(G.order)],
                    dtype=np.int32)


@needs_c
@pytest.mark.parametrize("spec", ["sym(3)", "dihedral(6)", "alt(4)", "quaternion8()"])
def test_build_table_parity(spec):
    images = _images(spec)
    assert np.array_equal(ck.build_table(images), pk.build_table(images))


@needs_c
@pytest.mark.parametrize("spec", ["sym(4)", "dihedral(8)"])
def test_dimino_join_parity(spec):
    images = _images(spec)
    table = pk.build_table(images)
    rng = np.random.default_rng(7)
    for _ in range(25):
        base = np.array([0], dtype=np.int32)
        gens = rng.integers(0, len(table), size=rng.integers(1, 4)).astype(np.int32)
        a = ck.dimino_join(table, base, gens)
        b = pk.dimino_join(table, base, gens)
        assert np.array_equal(np.sort(a), np.sort(b))


@needs_c
def test_extend_round_parity():
    images = _images("sym(4)")
    table = pk.build_table(images)
    table_t = np.ascontiguousarray(table.T)
    base = pk.dimino_join(table, np.array([0], dtype=np.int32),
                          np.array([1], dtype=np.int32))
    base = np.asarray(base, dtype=np.int32)
    base_gens = np.array([1], dtype=np.int32)
    cands = np.arange(len(table), dtype=np.int32)
    got_c = ck.extend_round(table, table_t, base, base_gens, cands, set())
    got_p = pk.extend_round(table, table_t, base, base_gens, cands, set())
    norm = lambda out: sorted((k, tuple(np.sort(v)), c) for k, v, c in out)
    assert norm(got_c) == norm(got_p)


def test_dimino_join_is_a_subgroup():
    images = _images("sym(4)")
    table = pk.build_table(images)
    sub = pk.dimino_join(table, np.array([0], dtype=np.int32),
                         np.array([3, 11], dtype=np.int32))
    member = np.zeros(len(table), dtype=bool)
    member[sub] = True
    prod = table[np.ix_(sub, sub)]
    assert member[prod].all()
    assert 24 % len(sub) == 0


def test_pack_unpack_round_trip():
    rng = np.random.default_rng(11)
    for n in (5, 64, 65, 200):
        elems = np.flatnonzero(rng.random(n) < 0.3)
        key = pack_key(elems, n)
        assert unpack_key(key).tolist() == elems.tolist()
        assert len(key) % 8 == 0


def test_backend_reports_name():
    assert _kernels.BACKEND in ("c", "python")
