"""Chief-factor bookkeeping behind maximal-subgroup counts.

Every maximal subgroup M determines a section X_M/Y_M (socle over core of
the primitive quotient G/core).  When that socle is elementary abelian the
section is an irreducible G-module V, and the maximals sharing one module
class are counted exactly by

    |Max(G, V)| = ((q^delta - 1) / (q - 1)) * |V|^theta

with q the order of the endomorphism field, theta = 0 iff the action is
trivial, and delta read off from |C_G(V)| / |R_G(V)| = |V|^delta where
R_G(V) is the intersection of the class and C_G(V) the kernel of the
action.  This module extracts the modules, groups them up to
G-isomorphism, verifies that identity, and runs the inequalities that
transfer maximal counts from G to (G, g) for soluble G.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import Caps, caps_from_env
from .constructions import _matmul, _mat_identity_n, _spin_irreducible
from .errors import CheckFailed, ValidationError
from .genstats import ceil_growth, expected_waiting, max_counts
from .lattice import SubgroupLattice
from .perms import FiniteGroup, Permutation, cycle_string, quotient_group, subgroup_as_group

__all__ = [
    "ModuleData", "ChiefFactorClass", "chief_classify", "module_invariants",
    "crown_params", "mu_split", "soluble_checks", "SolubleReport",
    "IndexCheckRow", "ClassCheckRow", "intertwiner_space", "g_isomorphic",
    "endo_field_order", "chief_series", "ChiefStep", "delta_cross_check",
]


# -- linear algebra over F_p (dense, tiny dimensions) ------------------------

def _inv_mod(x: int, p: int) -> int:
    return pow(x, p - 2, p)


def _nullspace(rows: list, width: int, p: int) -> list:
    """Basis of the solution space of rows * x = 0 over F_p."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(width):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] % p), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = _inv_mod(mat[rank][col] % p, p)
        mat[rank] = [(x * inv) % p for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col] % p:
                c = mat[i][col] % p
                mat[i] = [(a - c * b) % p for a, b in zip(mat[i], mat[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(mat):
            break
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * width
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-mat[r][f]) % p
        basis.append(tuple(v))
    return basis


def _rank(mat, p: int) -> int:
    rows = [list(r) for r in mat]
    rank = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = _inv_mod(rows[rank][col] % p, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(rank + 1, len(rows)):
            if rows[i][col] % p:
                c = rows[i][col] % p
                rows[i] = [(a - c * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def intertwiner_space(mats_a, mats_b, p: int, dim: int) -> list:
    """Basis of {T : A_i T = T B_i for every i}, row-vector convention.

    A G-map between the modules (v -> v*A_i) and (w -> w*B_i) is exactly a
    matrix satisfying these relations, so a nonzero element here certifies a
    G-isomorphism when both modules are irreducible.
    """
    width = dim * dim
    rows = []
    for A, B in zip(mats_a, mats_b):
        for a in range(dim):
            for b in range(dim):
                row = [0] * width
                for k in range(dim):
                    row[k * dim + b] = (row[k * dim + b] + A[a][k]) % p
                for l in range(dim):
                    row[a * dim + l] = (row[a * dim + l] - B[l][b]) % p
                rows.append(row)
    sols = _nullspace(rows, width, p) if rows else []
    return [tuple(tuple(v[i * dim + j] for j in range(dim)) for i in range(dim))
            for v in sols]


def g_isomorphic(prime_a: int, mats_a, prime_b: int, mats_b, dim_a: int, dim_b: int) -> bool:
    """G-isomorphism test for two irreducible modules given by their action
    matrices over the same generator list."""
    if prime_a != prime_b or dim_a != dim_b:
        return False
    space = intertwiner_space(mats_a, mats_b, prime_a, dim_a)
    if not space:
        return False
    # Schur: a nonzero map between irreducibles is invertible.  A singular
    # witness would mean one side is reducible, which the extraction rejects.
    if _rank(space[0], prime_a) != dim_a:
        raise CheckFailed("singular intertwiner between supposedly irreducible modules")
    return True


def endo_field_order(mats, p: int, dim: int) -> int:
    """Order of the endomorphism algebra, verified to be a field."""
    basis = intertwiner_space(mats, mats, p, dim)
    e = len(basis)
    if e == 0:
        raise CheckFailed("endomorphism algebra lost the identity map")
    q = p ** e
    if q > 4096:
        raise ValidationError(f"endomorphism algebra too large to verify ({q} elements)")
    zero = tuple(tuple(0 for _ in range(dim)) for _ in range(dim))
    for coeffs in itertools.product(range(p), repeat=e):
        T = [[0] * dim for _ in range(dim)]
        for c, B in zip(coeffs, basis):
            for i in range(dim):
                for j in range(dim):
                    T[i][j] = (T[i][j] + c * B[i][j]) % p
        if tuple(tuple(r) for r in T) == zero:
            continue
        if _rank(T, p) != dim:
            raise ValidationError(
                "endomorphism algebra is not a field; the module is reducible")
    return q


# -- module extraction from sections -----------------------------------------

@dataclass
class ModuleData:
    """Irreducible module carried by the section X_M/Y_M of a maximal M:
    the socle of the primitive quotient G/core, with G acting by
    conjugation.  Matrices act on row vectors and are indexed by the
    group's canonical generator list."""

    prime: int
    dim: int
    action: tuple                  # one dim x dim row-matrix per generator
    witness_maximal: int           # lattice index of the maximal it came from
    witness_core: int              # lattice index of Y_M
    section_order: int             # |X_M / Y_M| = prime**dim
    quotient: FiniteGroup = field(repr=False, default=None)
    proj_images: np.ndarray = field(repr=False, default=None)
    basis: tuple = field(repr=False, default=())
    vec_of: dict = field(repr=False, default_factory=dict)


def _section_coordinates(Q: FiniteGroup, section: list[int], p: int, dim: int):
    """Greedy basis of an elementary abelian section plus the coordinate map
    element-index -> F_p^dim."""
    table = Q.table
    basis: list[int] = []
    span = {0}
    for s in section:
        if s in span or s == 0:
            continue
        basis.append(s)
        if len(basis) == dim:
            break
        # re-span: all words in the current basis
        span = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for b in basis:
                y = int(table[x, b])
                if y not in span:
                    span.add(y)
                    frontier.append(y)
    if len(basis) != dim:
        raise CheckFailed("section basis extraction came up short")
    pow_tab = []
    for b in basis:
        pw = [0]
        for _ in range(p - 1):
            pw.append(int(table[pw[-1], b]))
        pow_tab.append(pw)
    vec_of: dict[int, tuple] = {}
    for coeffs in itertools.product(range(p), repeat=dim):
        acc = 0
        for j, c in enumerate(coeffs):
            acc = int(table[acc, pow_tab[j][c]])
        vec_of[acc] = coeffs
    if len(vec_of) != p ** dim:
        raise CheckFailed("section is not elementary abelian of the stated rank")
    return tuple(basis), vec_of


def _matrix_of(Q: FiniteGroup, basis, vec_of, y: int):
    """Row matrix of conjugation by y on the section, rows = images of basis."""
    table = Q.table
    yi = int(Q.inverses[y])
    rows = []
    for b in basis:
        c = int(table[int(table[yi, b]), y])
        v = vec_of.get(c)
        if v is None:
            raise CheckFailed("conjugation leaves the section")
        rows.append(v)
    return tuple(rows)


def _extract_module(L: SubgroupLattice, info) -> ModuleData:
    G = L.group
    Q = info.quotient
    p, dim = info.socle_prime, info.socle_dim
    proj = info.projection.images if info.projection is not None else np.arange(G.order, dtype=np.int32)
    basis, vec_of = _section_coordinates(Q, [int(x) for x in info.socle_indices], p, dim)
    gens = G.generator_indices
    mats = tuple(_matrix_of(Q, basis, vec_of, int(proj[g])) for g in gens)
    # the map x -> matrix_of(x) must be a homomorphism on the generators
    for gi in gens:
        for gj in gens:
            prod = G.product_index(gi, gj)
            left = _matmul(_matrix_of(Q, basis, vec_of, int(proj[gi])),
                           _matrix_of(Q, basis, vec_of, int(proj[gj])), p)
            if left != _matrix_of(Q, basis, vec_of, int(proj[prod])):
                raise CheckFailed("section action is not a homomorphism")
    if not _spin_irreducible(list(mats), p, dim):
        raise CheckFailed("section module is reducible; socle of a primitive "
                          "soluble-type quotient must be irreducible")
    return ModuleData(
        prime=p, dim=dim, action=mats,
        witness_maximal=info.subgroup_index, witness_core=info.core_index,
        section_order=p ** dim, quotient=Q, proj_images=np.asarray(proj),
        basis=basis, vec_of=vec_of)


# -- classes and crown parameters --------------------------------------------

@dataclass
class ChiefFactorClass:
    module: ModuleData
    maximals: list[int]            # lattice indices of Max(G, V)
    q: int = 0                     # |End_G(V)|
    r: int = 0                     # dim of V over the endomorphism field
    theta: int = 0
    delta: int = 0
    C: np.ndarray = field(repr=False, default=None)   # element indices of C_G(V)
    R: np.ndarray = field(repr=False, default=None)   # element indices of R_G(V)
    count_ok: bool = False

    @property
    def v_order(self) -> int:
        return self.module.section_order


def module_invariants(module: ModuleData) -> tuple[int, int, int, bool]:
    """(q, r, theta, irreducible) for one extracted module."""
    p, dim = module.prime, module.dim
    q = endo_field_order(module.action, p, dim)
    e = 0
    t = q
    while t > 1:
        t //= p
        e += 1
    if p ** e != q or dim % e:
        raise ValidationError("endomorphism field order does not divide the dimension")
    ident = _mat_identity_n(dim)
    theta = 0 if all(m == ident for m in module.action) else 1
    return q, dim // e, theta, _spin_irreducible(list(module.action), p, dim)


def crown_params(L: SubgroupLattice, cls: ChiefFactorClass):
    """(C, R, delta) for one class, with the count identity enforced.

    C is the set of elements acting trivially on the section, R the
    intersection of the class's maximals; |C|/|R| must be |V|^delta and the
    class size must equal ((q^delta - 1)/(q - 1)) * |V|^theta.
    """
    G = L.group
    module = cls.module
    Q, proj = module.quotient, module.proj_images
    table = Q.table
    mask = np.ones(G.order, dtype=bool)
    proj_col = proj.astype(np.int64)
    for b in module.basis:
        mask &= table[proj_col, b] == table[b, proj_col]
    C = np.nonzero(mask)[0].astype(np.int32)

    member = np.ones(G.order, dtype=bool)
    for m in cls.maximals:
        sel = np.zeros(G.order, dtype=bool)
        sel[L.subgroups[m].elems] = True
        member &= sel
    R = np.nonzero(member)[0].astype(np.int32)

    if not mask[R].all():
        raise CheckFailed("R_G(V) is not inside the centralizer C_G(V)")
    if not G.is_normal_indices(C) or not G.is_normal_indices(R):
        raise CheckFailed("crown endpoints are not normal")
    v = module.section_order
    ratio, delta = len(C) // len(R), 0
    if len(C) % len(R):
        raise CheckFailed("|C| not divisible by |R|")
    while ratio % v == 0 and ratio > 1:
        ratio //= v
        delta += 1
    if ratio != 1:
        raise CheckFailed(f"|C|/|R| = {len(C) // len(R)} is not a power of |V| = {v}")

    # C/R must be elementary abelian of exponent p: commutators and p-th
    # powers of C-elements land in R.
    gt = G.table
    inv = G.inverses
    Ci = C.astype(np.int64)
    comm = gt[gt[np.ix_(inv[Ci], inv[Ci])], gt[np.ix_(Ci, Ci)]]
    in_r = np.zeros(G.order, dtype=bool)
    in_r[R] = True
    if not in_r[comm].all():
        raise CheckFailed("C/R is not abelian")
    pw = np.zeros(len(Ci), dtype=np.int64)
    for _ in range(module.prime):
        pw = gt[pw, Ci]
    if not in_r[pw].all():
        raise CheckFailed("C/R has exponent larger than p")

    q, _, theta, _ = module_invariants(module)
    predicted = ((q ** delta - 1) // (q - 1)) * v ** theta
    if predicted != len(cls.maximals):
        raise CheckFailed(
            f"class count {len(cls.maximals)} disagrees with the identity "
            f"((q^d - 1)/(q - 1)) * |V|^theta = {predicted} "
            f"(q={q}, delta={delta}, theta={theta}, |V|={v})")
    return C, R, delta


def chief_classify(L: SubgroupLattice, caps: Caps | None = None):
    """Group the maximal subgroups by G-isomorphism class of their section
    module.  Returns (classes, residue) where residue lists the maximals
    whose socle is nonabelian (no module attached)."""
    census = L.maximal_census()
    classes: list[ChiefFactorClass] = []
    residue: list[int] = []
    for info in census:
        if not info.socle_abelian:
            residue.append(info.subgroup_index)
            continue
        module = _extract_module(L, info)
        ident = _mat_identity_n(module.dim)
        theta = 0 if all(m == ident for m in module.action) else 1
        placed = False
        for cls in classes:
            c_theta = 0 if all(m == _mat_identity_n(cls.module.dim) for m in cls.module.action) else 1
            if c_theta == theta and g_isomorphic(
                    cls.module.prime, cls.module.action,
                    module.prime, module.action, cls.module.dim, module.dim):
                cls.maximals.append(info.subgroup_index)
                placed = True
                break
        if not placed:
            classes.append(ChiefFactorClass(module=module, maximals=[info.subgroup_index]))
    classes.sort(key=lambda c: (c.module.section_order, c.module.action))
    for cls in classes:
        cls.q, cls.r, cls.theta, _ = module_invariants(cls.module)
        cls.C, cls.R, cls.delta = crown_params(L, cls)
        cls.count_ok = True    # crown_params raised otherwise
        cls.maximals.sort()
    total = sum(len(c.maximals) for c in classes) + len(residue)
    if total != len(census):
        raise CheckFailed("classification lost a maximal subgroup")
    return classes, residue


# -- the split of m_n(G) and the soluble inequalities ------------------------

def mu_split(L: SubgroupLattice, n: int, decomp=None):
    """Split the count of index-n maximals into mu_plus (classes with
    delta > r) and mu_circ (delta <= r).  Errors when an index-n maximal
    carries a nonabelian socle, since the split is only defined through the
    module classes."""
    classes, residue = decomp if decomp is not None else chief_classify(L)
    for m in residue:
        ref = L.subgroups[m]
        if L.group.order // ref.order == n:
            raise ValidationError(
                f"index-{n} maximal with nonabelian socle: mu split undefined")
    mu_plus = mu_circ = 0
    flags = []
    for cls in classes:
        if cls.v_order != n:
            continue
        circ = cls.delta <= cls.r
        flags.append(circ)
        if circ:
            mu_circ += len(cls.maximals)
        else:
            mu_plus += len(cls.maximals)
    return mu_plus, mu_circ, flags


@dataclass
class IndexCheckRow:
    n: int
    m_n: int
    m_n_g: int
    mu_plus: int
    mu_circ: int
    dominant: bool                 # ceil(log m_n / log n) attains ceil(M(G))
    plus_bound_ok: bool            # mu_plus <= m_n(G, g) * n^2
    transfer_applies: bool         # mu_plus >= mu_circ
    transfer_ok: bool | None       # then m_n(G, g) * n^3 >= m_n(G)


@dataclass
class ClassCheckRow:
    v_order: int
    q: int
    r: int
    theta: int
    delta: int
    count: int
    count_with_g: int
    lower_ok: bool | None          # delta > r: count_with_g >= ((q^(d-r)-1)/(q-1))*|V|^theta
    ratio_ok: bool | None          # delta > r: count <= count_with_g * |V|^2


@dataclass
class SolubleReport:
    group_name: str
    g_cycles: str
    e_full: Fraction
    e_g: Fraction
    gap: Fraction
    ceil_m: int
    index_rows: list[IndexCheckRow]
    class_rows: list[ClassCheckRow]
    dominant_transfer: bool        # some dominant n has mu_plus >= mu_circ
    dominant_gap_ok: bool | None   # then e(G) - e(G, g) <= 11
    derived_nilpotent: bool
    nilpotent_gap_ok: bool | None  # derived nilpotent: gap <= 11
    all_ok: bool


def soluble_checks(L: SubgroupLattice, g, decomp=None, caps: Caps | None = None) -> SolubleReport:
    """Run the maximal-count transfer inequalities for soluble G and one
    element g, plus the waiting-time gap bounds they imply."""
    caps = caps or caps_from_env()
    G = L.group
    if isinstance(g, Permutation):
        g = G.index_of(g)
    g = int(g)
    classes, residue = decomp if decomp is not None else chief_classify(L, caps)
    if residue:
        raise ValidationError("maximal subgroup with nonabelian socle: "
                              "these checks need a soluble group")

    m_full = max_counts(L, [])
    m_g = max_counts(L, [g])
    ceil_m = ceil_growth(m_full)
    with_g = set(int(x) for x in L.maximals_containing([g]))

    index_rows = []
    for n in sorted(m_full):
        mu_plus, mu_circ, _ = mu_split(L, n, (classes, residue))
        mn, mng = m_full[n], m_g.get(n, 0)
        applies = mu_plus >= mu_circ
        row = IndexCheckRow(
            n=n, m_n=mn, m_n_g=mng, mu_plus=mu_plus, mu_circ=mu_circ,
            dominant=ceil_growth({n: mn}) == ceil_m,
            plus_bound_ok=mu_plus <= mng * n * n,
            transfer_applies=applies,
            transfer_ok=(mng * n ** 3 >= mn) if applies else None)
        index_rows.append(row)

    class_rows = []
    for cls in classes:
        v = cls.v_order
        cnt = len(cls.maximals)
        cnt_g = sum(1 for m in cls.maximals if m in with_g)
        lower = ratio = None
        if cls.delta > cls.r:
            lower = cnt_g >= ((cls.q ** (cls.delta - cls.r) - 1) // (cls.q - 1)) * v ** cls.theta
            ratio = cnt <= cnt_g * v * v
        class_rows.append(ClassCheckRow(
            v_order=v, q=cls.q, r=cls.r, theta=cls.theta, delta=cls.delta,
            count=cnt, count_with_g=cnt_g, lower_ok=lower, ratio_ok=ratio))

    e_full = expected_waiting(L, [])
    e_g = expected_waiting(L, [g])
    gap = e_full - e_g
    dom_transfer = any(r.dominant and r.transfer_applies for r in index_rows)
    derived = subgroup_as_group(G, G.derived_subgroup_indices())
    derived_nilp = derived.is_nilpotent()
    report = SolubleReport(
        group_name=G.name or f"order-{G.order}",
        g_cycles=cycle_string(G.element(g)),
        e_full=e_full, e_g=e_g, gap=gap, ceil_m=ceil_m,
        index_rows=index_rows, class_rows=class_rows,
        dominant_transfer=dom_transfer,
        dominant_gap_ok=(gap <= 11) if dom_transfer else None,
        derived_nilpotent=derived_nilp,
        nilpotent_gap_ok=(gap <= 11) if derived_nilp else None,
        all_ok=False)
    oks = [r.plus_bound_ok for r in index_rows]
    oks += [r.transfer_ok for r in index_rows if r.transfer_ok is not None]
    oks += [r.lower_ok for r in class_rows if r.lower_ok is not None]
    oks += [r.ratio_ok for r in class_rows if r.ratio_ok is not None]
    if report.dominant_gap_ok is not None:
        oks.append(report.dominant_gap_ok)
    if report.nilpotent_gap_ok is not None:
        oks.append(report.nilpotent_gap_ok)
    report.all_ok = all(oks)
    return report


# -- chief series cross-check -------------------------------------------------

@dataclass
class ChiefStep:
    lower: int                     # lattice index of N
    upper: int                     # lattice index of K, K/N a chief factor
    order: int                     # |K/N|
    abelian: bool
    prime: int | None
    dim: int | None
    action: tuple | None           # matrices per canonical generator
    complemented: bool
    class_position: int | None     # which ChiefFactorClass it matches, if any


def chief_series(L: SubgroupLattice, classes=None) -> list[ChiefStep]:
    """One chief series of G assembled from the lattice: each step is a
    minimal-order normal subgroup over the previous one.  Steps carry their
    module data and whether a complement exists (a subgroup U with
    U meet K = N, which forces UK = G by order)."""
    G = L.group
    normal = [r.index for r in L.subgroups if L.is_normal(r.index)]
    bitsets = {}
    for r in L.subgroups:
        b = np.zeros(G.order, dtype=bool)
        b[r.elems] = True
        bitsets[r.index] = b
    steps: list[ChiefStep] = []
    cur = 0
    while cur != L.top_index:
        cur_elems = L.subgroups[cur].elems
        cand = [k for k in normal
                if L.subgroups[k].order > L.subgroups[cur].order
                and bool(bitsets[k][cur_elems].all())]
        nxt = min(cand, key=lambda k: (L.subgroups[k].order, k))
        steps.append(_chief_step(L, bitsets, cur, nxt, classes))
        cur = nxt
    return steps


def _chief_step(L: SubgroupLattice, bitsets, lo: int, hi: int, classes) -> ChiefStep:
    G = L.group
    n_ref, k_ref = L.subgroups[lo], L.subgroups[hi]
    order = k_ref.order // n_ref.order

    complemented = False
    want = G.order * n_ref.order // k_ref.order
    k_bits = bitsets[hi]
    n_bits = bitsets[lo]
    for r in L.subgroups:
        if r.order != want:
            continue
        meet = bitsets[r.index] & k_bits
        if meet.sum() == n_ref.order and bool((meet == n_bits).all()):
            complemented = True
            break

    if n_ref.order == 1:
        Q, images = G, np.arange(G.order, dtype=np.int32)
    else:
        Q, hom = quotient_group(G, n_ref.elems)
        images = hom.images
    section = sorted(set(int(images[x]) for x in k_ref.elems))
    sub = Q.table[np.ix_(section, section)]
    abelian = bool((sub == sub.T).all())
    prime = dim = None
    action = None
    pos = None
    if abelian:
        orders = set(int(o) for o in Q.element_orders[section] if o > 1)
        if len(orders) == 1:
            p = orders.pop()
            d = 0
            while p ** d < order:
                d += 1
            if p ** d == order:
                prime, dim = p, d
    if prime is not None:
        basis, vec_of = _section_coordinates(Q, section, prime, dim)
        gens = G.generator_indices
        action = tuple(_matrix_of(Q, basis, vec_of, int(images[g])) for g in gens)
        if classes:
            for i, cls in enumerate(classes):
                if g_isomorphic(cls.module.prime, cls.module.action,
                                prime, action, cls.module.dim, dim):
                    pos = i
                    break
    return ChiefStep(lower=lo, upper=hi, order=order, abelian=abelian,
                     prime=prime, dim=dim, action=action,
                     complemented=complemented, class_position=pos)


def delta_cross_check(L: SubgroupLattice, decomp=None) -> bool:
    """delta of every class equals the number of complemented factors
    G-isomorphic to its module in a computed chief series."""
    classes, _ = decomp if decomp is not None else chief_classify(L)
    steps = chief_series(L, classes)
    for i, cls in enumerate(classes):
        seen = sum(1 for s in steps if s.complemented and s.class_position == i)
        if seen != cls.delta:
            return False
    return True
