"""Hot-kernel backend selection.

The compiled Cython kernels are preferred; the numpy fallback in _pykernels
implements the identical contract and is selected when the extension is
missing or GENWAIT_PURE_PYTHON is set to a non-empty value other than "0".
"""
import os

import numpy as np

_force_py = os.environ.get("GENWAIT_PURE_PYTHON", "") not in ("", "0")
if not _force_py:
    try:
        from ._ckernels import BACKEND, build_table, dimino_join, extend_round
    except ImportError:
        _force_py = True
if _force_py:
    from ._pykernels import BACKEND, build_table, dimino_join, extend_round


def pack_key(elems, n: int) -> bytes:
    """Bitset key of an element index set, in the shared word layout."""
    member = np.zeros(n, dtype=bool)
    member[np.asarray(elems, dtype=np.intp)] = True
    raw = np.packbits(member, bitorder="little").tobytes()
    return raw.ljust(((n + 63) >> 6) * 8, b"\x00")


def unpack_key(key: bytes) -> np.ndarray:
    """Sorted element indices encoded by a bitset key."""
    bits = np.unpackbits(np.frombuffer(key, dtype=np.uint8), bitorder="little")
    return np.flatnonzero(bits).astype(np.int32)


__all__ = ["BACKEND", "build_table", "dimino_join", "extend_round",
           "pack_key", "unpack_key"]
