"""Exact generation statistics over a subgroup lattice.

Everything here is rational arithmetic except the growth degree M, which is
a supremum of log(m)/log(n) values.  Those are compared exactly whenever the
two logs share a common base after perfect-power reduction (and the ceiling
of M is always computed by pure integer tests); genuinely irrational
comparisons fall back to mpmath with escalating precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .config import Caps, caps_from_env
from .errors import PrecisionExhausted, ValidationError
from .lattice import SubgroupLattice
from .perms import FiniteGroup, Permutation, cycle_string

__all__ = [
    "prob_generating", "expected_waiting", "expected_waiting_series",
    "expected_waiting_markov", "brute_force_prob", "max_counts",
    "growth_degree", "ceil_growth", "theorem_bounds", "singleton_gap",
    "strong_scan", "frattini_criterion", "min_generators", "generation_report",
    "GrowthDegree", "TheoremBounds", "SingletonGap", "ScanRow", "GenerationReport",
]


def _require_nontrivial(G: FiniteGroup) -> None:
    if G.order < 2:
        raise ValidationError("statistics are defined for nontrivial groups only")


def _y_indices(L: SubgroupLattice, y) -> list[int]:
    out = []
    for item in y:
        if isinstance(item, Permutation):
            out.append(L.group.index_of(item))
        else:
            out.append(int(item))
    return sorted(set(out))


def prob_generating(L: SubgroupLattice, y, n: int) -> Fraction:
    """P(n): probability that n uniform elements together with Y generate,
    via the Möbius expansion over subgroups containing <Y>."""
    _require_nontrivial(L.group)
    if n < 0:
        raise ValidationError("n must be nonnegative")
    g_order = L.group.order
    total = Fraction(0)
    for h in L.overgroups_containing(_y_indices(L, y)):
        h = int(h)
        total += L.mobius[h] * Fraction(L.subgroups[h].order, g_order) ** n
    return total


def expected_waiting(L: SubgroupLattice, y) -> Fraction:
    """e(G, Y) in closed form: -sum of mu(H) |G|/(|G|-|H|) over the proper
    subgroups H containing <Y>."""
    _require_nontrivial(L.group)
    g_order = L.group.order
    total = Fraction(0)
    for h in L.overgroups_containing(_y_indices(L, y)):
        h = int(h)
        h_order = L.subgroups[h].order
        if h_order == g_order:
            continue
        total -= L.mobius[h] * Fraction(g_order, g_order - h_order)
    return total


def expected_waiting_series(L: SubgroupLattice, y, head: int = 32) -> Fraction:
    """Same expectation as a tail sum: e = sum_{n>=0} (1 - P(n)), evaluated
    termwise for n < head and then with the exact geometric tail of every
    proper subgroup.  A deliberately different arithmetic path than the
    closed form, used to cross-check it."""
    _require_nontrivial(L.group)
    g_order = L.group.order
    overs = [int(h) for h in L.overgroups_containing(_y_indices(L, y))]
    total = Fraction(0)
    for n in range(head):
        total += 1 - prob_generating(L, y, n)
    for h in overs:
        h_order = L.subgroups[h].order
        if h_order == g_order:
            continue
        ratio = Fraction(h_order, g_order)
        total -= L.mobius[h] * ratio**head * Fraction(g_order, g_order - h_order)
    return total


def expected_waiting_markov(L: SubgroupLattice, y) -> Fraction:
    """Absorption time of the chain on subgroups containing <Y> that moves
    from H to <H, g> for a uniform g.  Transition counts come from explicit
    joins, making this independent of the Möbius machinery."""
    _require_nontrivial(L.group)
    G = L.group
    g_order = G.order
    start = L.closure_index(_y_indices(L, y))
    if start == L.top_index:
        return Fraction(0)
    states = [int(h) for h in L.overgroups_containing(_y_indices(L, y))]
    # canonical cyclic generator for every element, to memoize joins
    cyc_of = {}
    cyc_gen = {}
    for g in range(g_order):
        elems = G.cyclic_subgroup_indices(g)
        key = elems.tobytes()
        if key not in cyc_gen:
            cyc_gen[key] = g
        cyc_of[g] = cyc_gen[key]
    join_memo: dict[tuple[int, int], int] = {}

    def join_state(h: int, g: int) -> int:
        c = cyc_of[g]
        key = (h, c)
        out = join_memo.get(key)
        if out is None:
            ref = L.subgroups[h]
            if c in set(int(x) for x in ref.elems):
                out = h
            else:
                gens = list(ref.gen_hint) + [c]
                elems = G.closure_indices(gens) if not ref.gen_hint else None
                if elems is None:
                    from . import _kernels
                    elems = _kernels.dimino_join(G.table, ref.elems,
                                                 np.asarray(gens, dtype=np.int32))
                out = L.index_by_elems(elems)
            join_memo[key] = out
        return out

    expect: dict[int, Fraction] = {L.top_index: Fraction(0)}
    for h in sorted(states, key=lambda i: -L.subgroups[i].order):
        if h == L.top_index:
            continue
        counts: dict[int, int] = {}
        for g in range(g_order):
            k = join_state(h, g)
            counts[k] = counts.get(k, 0) + 1
        stay = counts.pop(h, 0)
        acc = Fraction(1)
        for k, c in counts.items():
            acc += Fraction(c, g_order) * expect[k]
        expect[h] = acc / (1 - Fraction(stay, g_order))
    return expect[start]


def brute_force_prob(G: FiniteGroup, y, n: int, caps: Caps | None = None) -> Fraction:
    """Oracle for P(n): count generating n-tuples by dynamic programming over
    the running subgroup, one level per draw.  Uses no lattice and no Möbius
    values."""
    _require_nontrivial(G)
    table = G.table
    y_idx = sorted({G.index_of(p) if isinstance(p, Permutation) else int(p) for p in y})
    from . import _kernels
    start = G.closure_indices(y_idx)
    states: dict[bytes, tuple[np.ndarray, tuple[int, ...]]] = {}

    def intern(elems, gens):
        key = elems.tobytes()
        if key not in states:
            states[key] = (elems, tuple(gens))
        return key

    start_key = intern(start, y_idx)
    join_memo: dict[tuple[bytes, int], bytes] = {}

    def join(key: bytes, g: int) -> bytes:
        mkey = (key, g)
        out = join_memo.get(mkey)
        if out is None:
            elems, gens = states[key]
            if g in set(int(x) for x in elems):
                out = key
            else:
                new_gens = list(gens) + [g]
                new = _kernels.dimino_join(table, elems,
                                           np.asarray(new_gens, dtype=np.int32))
                out = intern(new, new_gens)
            join_memo[mkey] = out
        return out

    level = {start_key: 1}
    for _ in range(n):
        nxt: dict[bytes, int] = {}
        for key, cnt in level.items():
            for g in range(G.order):
                k2 = join(key, g)
                nxt[k2] = nxt.get(k2, 0) + cnt
        level = nxt
    full = sum(cnt for key, cnt in level.items()
               if len(states[key][0]) == G.order)
    return Fraction(full, G.order**n)


def max_counts(L: SubgroupLattice, y) -> dict[int, int]:
    """m_n(G, Y) table: maximal subgroups containing Y, counted by index."""
    _require_nontrivial(L.group)
    return L.max_counts(_y_indices(L, y))


# -- growth degree: exact log-ratio arithmetic ------------------------------


def _iroot(m: int, k: int) -> int:
    if k == 1:
        return m
    x = int(round(m ** (1.0 / k)))
    while x > 1 and x**k > m:
        x -= 1
    while (x + 1) ** k <= m:
        x += 1
    return x


def _smallest_root(m: int) -> tuple[int, int]:
    """m = a**s with a minimal (equivalently s maximal); m >= 2."""
    for s in range(m.bit_length(), 1, -1):
        a = _iroot(m, s)
        if a**s == m:
            return a, s
    return m, 1


@dataclass(frozen=True)
class LogRatio:
    """log(m)/log(n) for m >= 1, n >= 2, in canonical perfect-power form."""

    m: int
    n: int
    base_m: int
    exp_m: int
    base_n: int
    exp_n: int

    @staticmethod
    def of(m: int, n: int) -> "LogRatio":
        if m < 1 or n < 2:
            raise ValidationError("log ratio needs m >= 1, n >= 2")
        bm, em = (1, 1) if m == 1 else _smallest_root(m)
        bn, en = _smallest_root(n)
        return LogRatio(m=m, n=n, base_m=bm, exp_m=em, base_n=bn, exp_n=en)

    @property
    def rational(self) -> Fraction | None:
        if self.m == 1:
            return Fraction(0)
        if self.base_m == self.base_n:
            return Fraction(self.exp_m, self.exp_n)
        return None

    @property
    def key(self):
        if self.rational is not None:
            return ("Q", self.rational)
        return ("L", self.base_m, self.base_n, Fraction(self.exp_m, self.exp_n))

    def mpf(self) -> mp.mpf:
        return mp.log(self.m) / mp.log(self.n)


def _signed_terms_value(frac: Fraction, terms) -> mp.mpf:
    val = mp.mpf(frac.numerator) / frac.denominator
    for coef, ratio in terms:
        val -= coef * ratio.mpf()
    return val


def compare_fraction_to_combo(frac: Fraction, terms, caps: Caps | None = None) -> int:
    """Sign of frac - sum(coef * ratio) with exact fast paths: rational ratios
    are folded in exactly and identical irrational ratios cancel; only a
    genuinely irrational residue goes to escalating-precision mpmath."""
    caps = caps or caps_from_env()
    residue: dict = {}
    exact = Fraction(frac)
    keep = []
    for coef, ratio in terms:
        r = ratio.rational
        if r is not None:
            exact -= coef * r
        else:
            residue[ratio.key] = residue.get(ratio.key, (0, ratio))[0] + coef, ratio
    for key, (coef, ratio) in residue.items():
        if coef != 0:
            keep.append((coef, ratio))
    if not keep:
        return (exact > 0) - (exact < 0)
    dps = caps.mpmath_dps
    while dps <= caps.mpmath_dps_max:
        with mp.workdps(dps):
            val = _signed_terms_value(exact, keep)
            scale = 1 + sum(abs(c) * r.mpf() for c, r in keep) + abs(
                mp.mpf(exact.numerator) / exact.denominator)
            margin = mp.mpf(10) ** (6 - dps) * scale
            if abs(val) > margin:
                return 1 if val > 0 else -1
        dps *= 2
    raise PrecisionExhausted(
        "comparison unresolved at maximum precision; operands may be equal")


def _compare_ratios(a: LogRatio, b: LogRatio, caps: Caps | None = None) -> int:
    """Sign of a - b."""
    if a.key == b.key:
        return 0
    ra, rb = a.rational, b.rational
    if ra is not None and rb is not None:
        return (ra > rb) - (ra < rb)
    if ra is not None:
        return compare_fraction_to_combo(ra, [(1, b)], caps)
    if rb is not None:
        return -compare_fraction_to_combo(rb, [(1, a)], caps)
    return compare_fraction_to_combo(Fraction(0), [(-1, a), (1, b)], caps)


def ceil_growth(m_table: dict[int, int]) -> int:
    """Ceiling of the growth degree, by pure integer comparisons:
    ceil(log m / log n) = min{c >= 0 : n**c >= m}."""
    best = 0
    for n, m in m_table.items():
        if m < 1:
            continue
        c = 0
        v = 1
        while v < m:
            v *= n
            c += 1
        best = max(best, c)
    return best


@dataclass
class GrowthDegree:
    table: dict[int, int]
    witness_n: int | None
    witness_m: int | None
    ceil: int
    value_str: str

    @property
    def ratio(self) -> LogRatio | None:
        if self.witness_n is None:
            return None
        return LogRatio.of(self.witness_m, self.witness_n)


def growth_degree(m_table: dict[int, int], caps: Caps | None = None) -> GrowthDegree:
    """M = sup over the table of log(m_n)/log(n); an empty table gives 0.

    The maximizing entry is selected with exact comparisons where possible
    (see LogRatio); the reported decimal value is computed at the working
    precision, 50 significant digits by default."""
    caps = caps or caps_from_env()
    entries = [(n, m) for n, m in sorted(m_table.items()) if m >= 1]
    if not entries:
        return GrowthDegree(table=dict(m_table), witness_n=None, witness_m=None,
                            ceil=0, value_str="0")
    best_n, best_m = entries[0]
    best_ratio = LogRatio.of(best_m, best_n)
    for n, m in entries[1:]:
        r = LogRatio.of(m, n)
        if _compare_ratios(r, best_ratio, caps) > 0:
            best_n, best_m, best_ratio = n, m, r
    with mp.workdps(max(caps.mpmath_dps, 60)):
        val_str = mp.nstr(best_ratio.mpf(), 50, strip_zeros=False)
    return GrowthDegree(table=dict(m_table), witness_n=best_n, witness_m=best_m,
                        ceil=ceil_growth(m_table), value_str=val_str)


# -- bound checks ------------------------------------------------------------


@dataclass
class TheoremBounds:
    e: Fraction
    m_table: dict[int, int]
    ceil_M: int
    lower: int
    upper: int
    ok: bool


def theorem_bounds(L: SubgroupLattice, y) -> TheoremBounds:
    """ceil(M) - 4 <= e <= ceil(M) + 3, checked with exact arithmetic only
    (the ceiling needs no real numbers at all)."""
    e = expected_waiting(L, y)
    table = max_counts(L, y)
    c = ceil_growth(table)
    ok = Fraction(c - 4) <= e <= Fraction(c + 3)
    return TheoremBounds(e=e, m_table=table, ceil_M=c, lower=c - 4, upper=c + 3, ok=ok)


@dataclass
class SingletonGap:
    g: int
    e_full: Fraction
    e_g: Fraction
    gap: Fraction
    ok: bool


def singleton_gap(L: SubgroupLattice, g: int, caps: Caps | None = None) -> SingletonGap:
    """e(G) - e(G, g) <= M(G) - M(G, g) + 8 for a single element g."""
    caps = caps or caps_from_env()
    e_full = expected_waiting(L, [])
    e_g = expected_waiting(L, [g])
    gap = e_full - e_g
    table_full = max_counts(L, [])
    table_g = max_counts(L, [g])
    gf = growth_degree(table_full, caps)
    gg = growth_degree(table_g, caps)
    terms = []
    if gf.ratio is not None:
        terms.append((1, gf.ratio))
    if gg.ratio is not None:
        terms.append((-1, gg.ratio))
    # ok iff gap - 8 - (M(G) - M(G,g)) <= 0
    sign = compare_fraction_to_combo(gap - 8, terms, caps)
    return SingletonGap(g=g, e_full=e_full, e_g=e_g, gap=gap, ok=sign <= 0)


@dataclass
class ScanRow:
    rep: int
    rep_cycles: str
    class_size: int
    element_order: int
    e_g: Fraction
    gap: Fraction
    in_frattini: bool
    gap_zero: bool


def strong_scan(L: SubgroupLattice) -> list[ScanRow]:
    """One row per conjugacy class: waiting time with the representative
    pinned, the gap against e(G), and Frattini membership."""
    _require_nontrivial(L.group)
    e_full = expected_waiting(L, [])
    frat = set(int(x) for x in L.subgroups[L.frattini_index()].elems)
    rows = []
    for cls in L.group.conjugacy_classes:
        rep = int(cls[0])
        e_g = expected_waiting(L, [rep])
        gap = e_full - e_g
        rows.append(ScanRow(
            rep=rep,
            rep_cycles=cycle_string(L.group.element(rep)),
            class_size=len(cls),
            element_order=int(L.group.element_orders[rep]),
            e_g=e_g,
            gap=gap,
            in_frattini=rep in frat,
            gap_zero=gap == 0,
        ))
    return rows


def frattini_criterion(L: SubgroupLattice) -> bool:
    """e(G, g) == e(G) exactly for the g lying in the Frattini subgroup."""
    return all(row.gap_zero == row.in_frattini for row in strong_scan(L))


def min_generators(L: SubgroupLattice) -> int:
    """d(G): least n with P(n) > 0."""
    _require_nontrivial(L.group)
    bound = L.group.order.bit_length() + 1
    for n in range(1, bound + 1):
        if prob_generating(L, [], n) > 0:
            return n
    raise ValidationError("no generating tuple size found below the bound")


@dataclass
class GenerationReport:
    group_name: str | None
    group_order: int
    group_degree: int
    y_cycles: list[str]
    closure_order: int
    e: Fraction
    p_table: dict[int, Fraction]
    m_table: dict[int, int]
    growth: GrowthDegree
    bounds: TheoremBounds


def generation_report(L: SubgroupLattice, y, depth: int = 10,
                      caps: Caps | None = None) -> GenerationReport:
    caps = caps or caps_from_env()
    y_idx = _y_indices(L, y)
    closure = L.subgroups[L.closure_index(y_idx)]
    table = max_counts(L, y_idx)
    return GenerationReport(
        group_name=L.group.name,
        group_order=L.group.order,
        group_degree=L.group.degree,
        y_cycles=[cycle_string(L.group.element(i)) for i in y_idx],
        closure_order=closure.order,
        e=expected_waiting(L, y_idx),
        p_table={n: prob_generating(L, y_idx, n) for n in range(depth + 1)},
        m_table=table,
        growth=growth_degree(table, caps),
        bounds=theorem_bounds(L, y_idx),
    )
