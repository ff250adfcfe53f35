"""Timing comparison of the compiled kernels against the numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeat 3]

Times the three hot paths behind lattice enumeration: multiplication table
construction, subgroup joins, and one full extension round.  The compiled
backend is skipped gracefully when the extension is not built.
"""
import argparse
import time

import numpy as np

from genwait import constructions as cx
from genwait._kernels import _pykernels as pk

try:
    from genwait._kernels import _ckernels as ck
except ImportError:
    ck = None


def _images(spec: str) -> np.ndarray:
    G = cx.build(spec)
    return np.array([G.element(i).images for i in range(G.order)],
                    dtype=np.int32)


def _best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(spec: str, repeat: int):
    images = _images(spec)
    n = len(images)
    table = pk.build_table(images)
    table_t = np.ascontiguousarray(table.T)
    base = np.array([0], dtype=np.int32)
    gens = np.arange(1, min(4, n), dtype=np.int32)
    cands = np.arange(n, dtype=np.int32)
    cyc = pk.dimino_join(table, base, gens[:1]).astype(np.int32)

    rows = []
    cases = [
        ("build_table", lambda be: be.build_table(images)),
        ("dimino_join", lambda be: be.dimino_join(table, base, gens)),
        ("extend_round", lambda be: be.extend_round(
            table, table_t, cyc, gens[:1], cands, set())),
    ]
    for name, call in cases:
        t_py = _best_of(lambda: call(pk), repeat)
        t_c = _best_of(lambda: call(ck), repeat) if ck else float("nan")
        rows.append((name, n, t_py, t_c))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--specs", nargs="*",
                    default=["sym(4)", "sym(5)", "alt(5)", "sym(6)"])
    args = ap.parse_args()

    if ck is None:
        print("compiled backend not available; timing fallback only")
    header = f"{'kernel':<14} {'|G|':>5} {'python':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for spec in args.specs:
        for name, n, t_py, t_c in bench(spec, args.repeat):
            ratio = t_py / t_c if t_c == t_c and t_c > 0 else float("nan")
            print(f"{name:<14} {n:>5} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms "
                  f"{ratio:>7.1f}x")
        print()


if __name__ == "__main__":
    main()
