"""Builders for the example groups, plus maximal-subgroup classification of
direct powers of a nonabelian simple group and diagonal containment counts.

Catalog names understood by build(): cyclic(n), dihedral(n),
elementary_abelian(p,k), sym(n), alt(n), semidihedral16, quaternion8,
direct_power(spec,t), inversion(p,k), crown_power(c2xc2_c3 | sd16).
dihedral(n) is the symmetry group of the n-gon (order 2n).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import Caps, caps_from_env
from .errors import CapExceeded, CheckFailed, ParseError, ValidationError
from .perms import (FiniteGroup, Permutation, SemidirectAction,
                    VectorSpaceStructure, _action_element_matrices,
                    automorphisms, cycle_string, epimorphisms_onto,
                    generate_group, group_product, identity, subgroup_as_group)

__all__ = [
    "BuilderSpec", "parse_builder", "build", "vector_space_group",
    "matrix_group", "cyclic", "dihedral", "elementary_abelian", "sym", "alt",
    "semidihedral16", "quaternion8", "direct_power", "inversion",
    "CrownPower", "crown_power_group", "crown_power_preset",
    "GoursatMaximal", "GoursatReport", "goursat_maximals",
    "DiagonalCountReport", "diagonal_count", "is_P_prime",
]


# -- vector-space scaffolding ------------------------------------------------


def vector_space_group(p: int, dims, name=None, caps: Caps | None = None) -> FiniteGroup:
    """Translation group of ⊕_f F_p^dims[f], acting on the disjoint union of
    the affine point sets.  Carries the vector structure used by semidirect
    products."""
    caps = caps or caps_from_env()
    dims = tuple(int(d) for d in dims)
    if not _is_prime(p):
        raise ValidationError(f"{p} is not prime")
    if any(d < 1 for d in dims) or not dims:
        raise ValidationError("factor dimensions must be positive")
    order = p ** sum(dims)
    if order > caps.group_order_cap:
        raise CapExceeded(f"translation group order {order} exceeds cap")
    offsets = tuple(itertools.accumulate((p**d for d in dims[:-1]), initial=0))
    vs = VectorSpaceStructure(prime=p, dims=dims, offsets=offsets)
    degree = offsets[-1] + p ** dims[-1]
    gens = []
    for f in range(len(dims)):
        for j in range(dims[f]):
            img = np.arange(degree)
            for pt in vs.block(f):
                v = list(vs.decode(f, pt))
                v[j] = (v[j] + 1) % p
                img[pt] = vs.encode(f, v)
            gens.append(Permutation(img))
    G = generate_group(gens, name=name, caps=caps)
    if G.order != order:
        raise ValidationError("translation closure has unexpected order")
    return FiniteGroup(G.images, gens, name=name, vector_structure=vs)


def _mat_tuple(m) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in m)


def matrix_group(mats, p: int, name=None, caps: Caps | None = None):
    """Group generated by invertible matrices over F_p, acting on the p^dim
    vectors (zero included, as a fixed point).  Returns (group, aligned) with
    aligned[i] the matrix of element i, recovered from the basis images."""
    caps = caps or caps_from_env()
    mats = [_mat_tuple(m) for m in mats]
    dim = len(mats[0])
    vs = VectorSpaceStructure(prime=p, dims=(dim,), offsets=(0,))
    degree = p**dim
    gens = []
    for A in mats:
        if len(A) != dim or any(len(r) != dim for r in A):
            raise ValidationError("generator matrices must share one square shape")
        img = np.empty(degree, dtype=np.int64)
        for pt in range(degree):
            v = vs.decode(0, pt)
            w = tuple(sum(v[i] * A[i][j] for i in range(dim)) % p for j in range(dim))
            img[pt] = vs.encode(0, w)
        if len(set(img.tolist())) != degree:
            raise ValidationError("generator matrix is not invertible")
        gens.append(Permutation(img))
    G = generate_group(gens, name=name, caps=caps)
    basis_pts = [vs.encode(0, tuple(1 if i == j else 0 for i in range(dim)))
                 for j in range(dim)]
    aligned = []
    for i in range(G.order):
        perm = G.images[i]
        aligned.append(tuple(vs.decode(0, int(perm[pt])) for pt in basis_pts))
    for a in range(min(G.order, 8)):
        for b in range(min(G.order, 8)):
            prod = _matmul(aligned[a], aligned[b], p)
            if prod != aligned[G.product_index(a, b)]:
                raise ValidationError("matrix alignment disagrees with composition")
    return G, aligned


def _matmul(A, B, p):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) % p
                       for j in range(n)) for i in range(n))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _prime_power_base(q: int) -> int | None:
    """Smallest prime f with q = f**k, or None if q is not a prime power."""
    if q < 2:
        return None
    f = 2
    while f * f <= q:
        if q % f == 0:
            m = q
            while m % f == 0:
                m //= f
            return f if m == 1 else None
        f += 1
    return q


# -- the catalog -------------------------------------------------------------


def cyclic(n: int, caps: Caps | None = None) -> FiniteGroup:
    if n < 1:
        raise ValidationError("cyclic group order must be positive")
    img = np.roll(np.arange(max(n, 1)), -1)
    return generate_group([Permutation(img)], name=f"C{n}", caps=caps)


def dihedral(n: int, caps: Caps | None = None) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    if n < 3:
        raise ValidationError("dihedral builder needs n >= 3")
    rot = Permutation(np.roll(np.arange(n), -1))
    refl = Permutation([(n - i) % n for i in range(n)])
    G = generate_group([rot, refl], name=f"D{n}", caps=caps)
    if G.order != 2 * n:
        raise ValidationError("dihedral closure has unexpected order")
    return G


def elementary_abelian(p: int, k: int, caps: Caps | None = None) -> FiniteGroup:
    if k < 1:
        raise ValidationError("rank must be positive")
    return vector_space_group(p, [k], name=f"C{p}^{k}", caps=caps)


def sym(n: int, caps: Caps | None = None) -> FiniteGroup:
    if n < 2:
        raise ValidationError("sym builder needs n >= 2")
    gens = [Permutation([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(Permutation(np.roll(np.arange(n), -1)))
    G = generate_group(gens, name=f"S{n}", caps=caps)
    if G.order != math.factorial(n):
        raise ValidationError("symmetric closure has unexpected order")
    return G


def alt(n: int, caps: Caps | None = None) -> FiniteGroup:
    if n < 3:
        raise ValidationError("alt builder needs n >= 3")
    three = Permutation([1, 2, 0] + list(range(3, n)))
    if n % 2 == 1:
        big = Permutation(np.roll(np.arange(n), -1))
    else:
        big = Permutation([0] + list(np.roll(np.arange(1, n), -1)))
    G = generate_group([three, big] if n > 3 else [three], name=f"A{n}", caps=caps)
    if G.order != math.factorial(n) // 2:
        raise ValidationError("alternating closure has unexpected order")
    return G


def _gl23_elements():
    for entries in itertools.product(range(3), repeat=4):
        A = ((entries[0], entries[1]), (entries[2], entries[3]))
        det = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % 3
        if det:
            yield A


def _mat_order(A, p):
    k = 1
    M = A
    I = tuple(tuple(1 if i == j else 0 for j in range(len(A))) for i in range(len(A)))
    while M != I:
        M = _matmul(M, A, p)
        k += 1
        if k > 64:
            raise ValidationError("runaway matrix order")
    return k


def _mat_inv2(A, p):
    det = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % p
    dinv = pow(det, -1, p)
    return ((A[1][1] * dinv % p, -A[0][1] * dinv % p),
            (-A[1][0] * dinv % p, A[0][0] * dinv % p))


def semidihedral16(caps: Caps | None = None, with_matrices: bool = False):
    """Sylow 2-subgroup of GL(2,3): the order-16 group with presentation
    a^8 = b^2 = 1, b a b = a^3.  Generators are found by deterministic search
    and the relations are verified on the permutation images."""
    gl = list(_gl23_elements())
    A = next(M for M in gl if _mat_order(M, 3) == 8)
    A3 = _matmul(_matmul(A, A, 3), A, 3)
    B = next(M for M in gl
             if _mat_order(M, 3) <= 2 and M != _mat_identity_n(2)
             and _matmul(_matmul(M, A, 3), _mat_inv2(M, 3), 3) == A3)
    G, aligned = matrix_group([A, B], 3, name="SD16", caps=caps)
    if G.order != 16:
        raise ValidationError("semidihedral closure has unexpected order")
    a, b = G.generators
    if not ((a**8).is_identity and (b * b).is_identity and b * a * b == a**3):
        raise ValidationError("semidihedral relations failed")
    orders = [int(x) for x in G.element_orders]
    if max(orders) == 16:
        raise ValidationError("semidihedral group cannot be cyclic")
    return (G, aligned) if with_matrices else G


def _mat_identity_n(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def quaternion8(caps: Caps | None = None) -> FiniteGroup:
    """Q8 as a subgroup of SL(2,3): i, j of order 4 with i^2 = j^2 central
    and j i j^-1 = i^-1."""
    i_mat = ((0, 2), (1, 0))
    j_mat = ((1, 1), (1, 2))
    G, _ = matrix_group([i_mat, j_mat], 3, name="Q8", caps=caps)
    if G.order != 8:
        raise ValidationError("quaternion closure has unexpected order")
    i, j = G.generators
    if not (i * i == j * j and (i * i * i * i).is_identity
            and j * i * j.inverse() == i.inverse()):
        raise ValidationError("quaternion relations failed")
    return G


def direct_power(base: FiniteGroup, t: int, caps: Caps | None = None) -> FiniteGroup:
    caps = caps or caps_from_env()
    if t < 1:
        raise ValidationError("power must be positive")
    if t == 1:
        return base
    if base.order**t > caps.group_order_cap:
        raise CapExceeded(f"order {base.order}**{t} exceeds cap")
    G = base
    for _ in range(t - 1):
        G = group_product(G, base, caps=caps)
    G.name = f"{base.name or 'G'}^{t}"
    return G


def inversion(p: int, k: int, caps: Caps | None = None) -> FiniteGroup:
    """C_p^k ⋊ C_2 with the involution inverting every vector (p odd)."""
    if p == 2 or not _is_prime(p):
        raise ValidationError("inversion action needs an odd prime")
    left = vector_space_group(p, [k], caps=caps)
    neg = tuple(tuple((p - 1) if i == j else 0 for j in range(k)) for i in range(k))
    action = SemidirectAction(prime=p, matrices=((neg,),))
    G = group_product(left, cyclic(2, caps=caps), action,
                      name=f"C{p}^{k}:C2", caps=caps)
    if G.order != 2 * p**k:
        raise ValidationError("inversion product has unexpected order")
    return G


# -- crown powers -------------------------------------------------------------


@dataclass
class CrownPower:
    """Semidirect product ∏_i V_i ⋊ H, together with the distinguished
    element translating every factor by a nonzero vector."""

    group: FiniteGroup
    strong_index: int
    rho: int
    module_order: int
    h_order: int
    kernels: list  # per factor, sorted H-element indices acting trivially
    prime: int = 0
    dim: int = 0
    factor_actions: tuple = ()  # per factor, one matrix per H generator


def _spin_irreducible(mats, p: int, dim: int) -> bool:
    """True when no proper nonzero subspace is invariant under all matrices:
    spin every nonzero vector and require full dimension."""
    vectors = [v for v in itertools.product(range(p), repeat=dim) if any(v)]
    for v0 in vectors:
        basis: list = []
        seen = {tuple([0] * dim)}
        frontier = [v0]
        _gauss_add(basis, v0, p)
        while frontier:
            v = frontier.pop()
            for A in mats:
                w = tuple(sum(v[i] * A[i][j] for i in range(dim)) % p
                          for j in range(dim))
                if w not in seen:
                    seen.add(w)
                    if _gauss_add(basis, w, p):
                        frontier.append(w)
        if len(basis) < dim:
            return False
    return True


def _gauss_add(basis: list, v, p: int) -> bool:
    """Reduce v against an echelonized basis; append and return True if it
    enlarges the span."""
    v = list(v)
    for b in basis:
        lead = next(i for i, x in enumerate(b) if x)
        if v[lead]:
            c = v[lead] * pow(b[lead], -1, p)
            v = [(x - c * y) % p for x, y in zip(v, b)]
    if any(v):
        basis.append(v)
        return True
    return False


def crown_power_group(H: FiniteGroup, p: int, dim: int, factor_actions,
                      name=None, caps: Caps | None = None) -> CrownPower:
    """∏_{i<ρ} V_i ⋊ H with V_i = F_p^dim and H acting on V_i through
    factor_actions[i] (one matrix per H generator).

    Every factor action must be irreducible, the action kernels must be
    pairwise distinct and intersect trivially, and the total order must fit
    the caps.  The returned strong element translates each factor by e_1.
    """
    caps = caps or caps_from_env()
    rho = len(factor_actions)
    if rho < 1:
        raise ValidationError("at least one module factor required")
    factor_actions = [[_mat_tuple(m) for m in gen_mats] for gen_mats in factor_actions]
    for i, gen_mats in enumerate(factor_actions):
        if len(gen_mats) != len(H.generators):
            raise ValidationError("one matrix per H generator required")
        if not _spin_irreducible(gen_mats, p, dim):
            raise ValidationError(f"factor {i} action is reducible")
    order = p ** (dim * rho) * H.order
    if order > caps.group_order_cap:
        raise CapExceeded(f"crown power order {order} exceeds cap")
    action = SemidirectAction(
        prime=p,
        matrices=tuple(tuple(factor_actions[i][g] for i in range(rho))
                       for g in range(len(H.generators))))
    mats = _action_element_matrices(H, action)
    kernels = []
    for i in range(rho):
        ker = sorted(x for x in range(H.order)
                     if mats[x][i] == _mat_identity_n(dim))
        kernels.append(ker)
    if len({tuple(k) for k in kernels}) != rho:
        raise ValidationError("factor action kernels must be pairwise distinct")
    common = set(kernels[0])
    for ker in kernels[1:]:
        common &= set(ker)
    if common != {0}:
        raise ValidationError("factor action kernels must intersect trivially")
    left = vector_space_group(p, [dim] * rho, caps=caps)
    G = group_product(left, H, action, name=name, caps=caps)
    vs = left.vector_structure
    img = np.arange(G.degree)
    for f in range(rho):
        for pt in vs.block(f):
            v = list(vs.decode(f, pt))
            v[0] = (v[0] + 1) % p
            img[pt] = vs.encode(f, v)
    g_idx = G.index_of(Permutation(img))
    return CrownPower(group=G, strong_index=g_idx, rho=rho,
                      module_order=p**dim, h_order=H.order, kernels=kernels,
                      prime=p, dim=dim,
                      factor_actions=tuple(tuple(gm) for gm in factor_actions))


def crown_power_preset(variant: str, caps: Caps | None = None) -> CrownPower:
    """Named instances: c2xc2_c3 is the order-108 product of three sign
    modules over the Klein group; sd16 is the order 81·|H| product of two
    natural F_9-modules over a subdirect square of the semidihedral group."""
    caps = caps or caps_from_env()
    if variant == "c2xc2_c3":
        H = elementary_abelian(2, 2, caps=caps)
        one, neg = ((1,),), ((2,),)
        # kernels <t1>, <t2>, <t1 t2>: each generator acts by -1 exactly on
        # the factors whose kernel misses it
        factor_actions = [[one, neg], [neg, one], [neg, neg]]
        cp = crown_power_group(H, 3, 1, factor_actions,
                               name="(C3^3):(C2xC2)", caps=caps)
        if cp.group.order != 108:
            raise ValidationError("preset c2xc2_c3 has unexpected order")
        return cp
    if variant == "sd16":
        X, aligned = semidihedral16(caps=caps, with_matrices=True)
        census = epimorphisms_onto(2, X, caps=caps)
        reps = [census.kernel_classes[i][0] for i in range(2)]
        deg = X.degree
        h_gens = []
        for k in range(2):
            img = np.concatenate([X.images[reps[0][k]], X.images[reps[1][k]] + deg])
            h_gens.append(Permutation(img))
        H = generate_group(h_gens, name="SD16 subdirect square", caps=caps)
        if H.order % X.order != 0:
            raise ValidationError("subdirect square order must be a multiple of 16")
        factor_actions = [[aligned[reps[i][k]] for k in range(2)] for i in range(2)]
        return crown_power_group(H, 3, 2, factor_actions,
                                 name="(F9^2):(SD16 subdirect)", caps=caps)
    raise ParseError(f"unknown crown power variant {variant!r}")


@dataclass
class StrongInstanceReport:
    """Verification that the distinguished element of a crown power lies in
    no maximal subgroup of index |V|, so m_{|V|}(G, g) = 0.

    Small groups go through the full lattice.  Above the lattice cap the
    index-|V| maximals are pinned down as the point stabilizers of the
    factor blocks: each block action is transitive and primitive (so the
    stabilizers are maximal), the factors are pairwise non-isomorphic
    irreducibles whose direct sum has no other invariant subspaces (so no
    other order-|V| chief factor exists), and the per-block stabilizer
    count matches ((q - 1)/(q - 1))·|V| from the endomorphism field."""

    group_name: str
    order: int
    rho: int
    module_order: int
    lattice_path: bool
    m_v_zero: bool
    generator_target: int          # d(H), which d(G) must match
    d_group: int | None = None
    e_full: Fraction | None = None
    e_g: Fraction | None = None
    gap_positive: bool | None = None
    blocks_primitive: bool | None = None
    stabilizer_counts: tuple = ()
    counts_match: bool | None = None
    factors_pairwise_noniso: bool | None = None
    sum_has_only_factor_submodules: bool | None = None
    ok: bool = False


def _min_block_size(gen_rows, n: int, a: int, b: int) -> int:
    """Size of the smallest block (of an imprimitivity system) containing
    {a, b} for the transitive group generated by the given image rows."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.pop()
        for row in gen_rows:
            gx, gy = find(int(row[x])), find(int(row[y]))
            if gx != gy:
                parent[gy] = gx
                queue.append((gx, gy))
    root = find(a)
    return sum(1 for x in range(n) if find(x) == root)


def _is_primitive(gen_rows, n: int) -> bool:
    return all(_min_block_size(gen_rows, n, 0, b) == n for b in range(1, n))


def strong_instance_check(cp: CrownPower, caps: Caps | None = None) -> StrongInstanceReport:
    """Check m_{|V|}(G, g) = 0 for a crown power and its strong element, and
    that adjoining g costs nothing in rank: d(G) = d(H)."""
    caps = caps or caps_from_env()
    from .crowns import intertwiner_space, endo_field_order
    from .genstats import expected_waiting, max_counts, min_generators
    from .lattice import enumerate_subgroups

    G, g = cp.group, cp.strong_index
    v = cp.module_order
    p, dim, rho = cp.prime, cp.dim, cp.rho
    if not cp.factor_actions:
        raise ValidationError("crown power lacks its factor action matrices")
    ident = _mat_identity_n(dim)
    if any(all(m == ident for m in fa) for fa in cp.factor_actions):
        raise ValidationError("stabilizer reasoning needs every factor acted on nontrivially")

    lattice_ok = G.order <= caps.lattice_order_cap
    report = StrongInstanceReport(
        group_name=G.name or f"order-{G.order}", order=G.order, rho=rho,
        module_order=v, lattice_path=lattice_ok, m_v_zero=False,
        generator_target=0)

    if lattice_ok:
        L = enumerate_subgroups(G, caps=caps)
        report.m_v_zero = max_counts(L, [g]).get(v, 0) == 0
        report.e_full = expected_waiting(L, [])
        report.e_g = expected_waiting(L, [g])
        report.gap_positive = report.e_g < report.e_full
        report.d_group = min_generators(L)
    else:
        vs = G.vector_structure
        if vs is None or len(vs.dims) != rho:
            raise ValidationError("crown power lost its block structure")
        imgs = G.images
        prim = True
        stab_counts = []
        distinct = True
        avoid = True
        seen_stabs = set()
        for f in range(rho):
            pts = np.fromiter(vs.block(f), dtype=np.int64)
            local = imgs[:, pts] - pts[0]
            gen_rows = [local[x] for x in G.generator_indices]
            orbit = {0}
            frontier = [0]
            while frontier:
                x = frontier.pop()
                for row in gen_rows:
                    y = int(row[x])
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)
            if len(orbit) != v:
                raise CheckFailed(f"block {f} action is not transitive")
            if not _is_primitive(gen_rows, v):
                prim = False
            fixed = local == np.arange(v, dtype=local.dtype)
            for pt in range(v):
                stab = np.nonzero(fixed[:, pt])[0]
                if len(stab) * v != G.order:
                    raise CheckFailed("stabilizer order violates orbit counting")
                key = stab.tobytes()
                if key in seen_stabs:
                    distinct = False
                seen_stabs.add(key)
                if bool(fixed[g, pt]):
                    avoid = False
            stab_counts.append(v)
        report.blocks_primitive = prim
        report.stabilizer_counts = tuple(stab_counts)
        # one crown class per factor with delta = 1, theta = 1: the count
        # identity ((q^d - 1)/(q - 1)) * |V|^theta collapses to |V|, but the
        # endomorphism algebra still has to be a field for it to apply
        predicted = []
        for f in range(rho):
            q = endo_field_order(cp.factor_actions[f], p, dim)
            predicted.append((q ** 1 - 1) // (q - 1) * v)
        report.counts_match = predicted == stab_counts and distinct
        noniso = True
        for i in range(rho):
            for j in range(i + 1, rho):
                if intertwiner_space(cp.factor_actions[i], cp.factor_actions[j], p, dim):
                    noniso = False
        report.factors_pairwise_noniso = noniso
        report.sum_has_only_factor_submodules = _direct_sum_submodules_are_factors(
            cp.factor_actions, p, dim, rho)
        report.m_v_zero = prim and distinct and avoid and noniso and report.counts_match \
            and report.sum_has_only_factor_submodules

    # d(G) = d(H): d(G) >= d(H) since H is the quotient of G by the module
    # product, so exhibiting a generating tuple of size d(H) settles it.
    target = _min_generators_of_h(cp, caps)
    report.generator_target = target
    if report.d_group is None and _exhibits_rank(G, target, caps):
        report.d_group = target
    ok = report.m_v_zero and report.d_group == target
    if lattice_ok:
        ok = ok and bool(report.gap_positive)
    else:
        ok = ok and report.blocks_primitive and report.counts_match \
            and report.factors_pairwise_noniso and report.sum_has_only_factor_submodules
    report.ok = ok
    return report


def _min_generators_of_h(cp: CrownPower, caps: Caps) -> int:
    """d(H), computed on the copy of H inside the crown power: the builder
    lists the translation generators first (one per factor and basis vector),
    so the remaining generators close into a complement isomorphic to H."""
    G = cp.group
    h_idx = G.generator_indices[cp.rho * cp.dim:]
    H = generate_group([G.element(x) for x in h_idx], caps=caps)
    if H.order != cp.h_order:
        raise CheckFailed("complement copy of H has the wrong order")
    from .genstats import min_generators
    from .lattice import enumerate_subgroups
    return min_generators(enumerate_subgroups(H, caps=caps))


def _exhibits_rank(G: FiniteGroup, target: int, caps: Caps) -> bool:
    """Deterministic scan for a generating tuple of the given size.  d(G) is
    bounded below by the quotient's rank, so one hit settles equality."""
    if target <= 1:
        return any(len(G.cyclic_subgroup_indices(x)) == G.order
                   for x in range(G.order))
    if target > 2:
        raise ValidationError(f"rank search not implemented for d = {target}")
    step = max(1, G.order // 61)
    xs = list(range(1, G.order, step))
    for i, x in enumerate(xs):
        for y in xs[i + 1:]:
            sub = generate_group([G.element(x), G.element(y)], caps=caps)
            if sub.order == G.order:
                return True
    return False


def _direct_sum_submodules_are_factors(factor_actions, p: int, dim: int, rho: int) -> bool:
    """Spin every nonzero vector of the direct sum: with pairwise
    non-isomorphic irreducible summands, each spin must be the sum of the
    factors where the vector has a nonzero component."""
    total = dim * rho
    mats = []
    for k in range(len(factor_actions[0])):
        M = [[0] * total for _ in range(total)]
        for f in range(rho):
            A = factor_actions[f][k]
            for i in range(dim):
                for j in range(dim):
                    M[f * dim + i][f * dim + j] = A[i][j]
        mats.append(tuple(tuple(r) for r in M))
    for v0 in itertools.product(range(p), repeat=total):
        if not any(v0):
            continue
        support = [f for f in range(rho) if any(v0[f * dim:(f + 1) * dim])]
        want = dim * len(support)
        basis: list = []
        seen = {tuple([0] * total)}
        frontier = [v0]
        _gauss_add(basis, v0, p)
        while frontier:
            vv = frontier.pop()
            for A in mats:
                w = tuple(sum(vv[i] * A[i][j] for i in range(total)) % p
                          for j in range(total))
                if w not in seen:
                    seen.add(w)
                    if _gauss_add(basis, w, p):
                        frontier.append(w)
        if len(basis) != want:
            return False
    return True


# -- maximal subgroups of S^t --------------------------------------------------


@dataclass
class GoursatMaximal:
    kind: int          # 1 = coordinate preimage of a maximal of S, 2 = graph
    index: int         # index in S^t
    coords: tuple      # (c,) or (r, s)
    source: int        # lattice index of the factor maximal, or Aut number
    elems: np.ndarray | None = None


@dataclass
class GoursatReport:
    factor_order: int
    t: int
    aut_count: int
    kind1_by_index: dict
    kind2_count: int
    kind2_index: int
    total_by_index: dict
    materialized: bool
    maximality_verified: bool
    maximals: list = field(default_factory=list)
    product: FiniteGroup | None = None
    pair_index: np.ndarray | None = None
    factor_lattice: object = None


def _tuple_index_matrix(P: FiniteGroup, S: FiniteGroup) -> np.ndarray:
    """pair_index[a, b] = index in P of the element acting as a on the first
    block and b on the second."""
    deg = S.degree
    out = np.empty((S.order, S.order), dtype=np.int32)
    for a in range(S.order):
        left = S.images[a]
        for b in range(S.order):
            out[a, b] = P.index_of(np.concatenate([left, S.images[b] + deg]))
    return out


def _greedy_gens(table: np.ndarray, elems: np.ndarray) -> list[int]:
    gens: list[int] = []
    covered = {0}
    for e in elems.tolist():
        if e not in covered:
            gens.append(int(e))
            covered = set(_kernels.dimino_join(
                table, np.array([0], dtype=np.int32),
                np.asarray(gens, dtype=np.int32)).tolist())
            if len(covered) == len(elems):
                break
    return gens


def goursat_maximals(S: FiniteGroup, t: int, materialize: bool | None = None,
                     caps: Caps | None = None,
                     factor_lattice=None) -> GoursatReport:
    """Maximal subgroups of S^t for nonabelian simple S.

    They come in exactly two kinds: preimages of maximal subgroups of one
    coordinate, and graphs {(x, x^α)} of automorphisms spanning a coordinate
    pair.  Counts are always produced; with materialization each subgroup is
    listed element-wise and verified maximal by adjoining every outside
    element.
    """
    from .lattice import enumerate_subgroups

    caps = caps or caps_from_env()
    if t < 2:
        raise ValidationError("need t >= 2 copies")
    if S.is_abelian() or not S.is_simple():
        raise ValidationError("the factor must be nonabelian simple")
    L = factor_lattice if factor_lattice is not None else enumerate_subgroups(S, caps=caps)
    max_ids = [int(i) for i in L.maximal_indices]
    kind1: dict[int, int] = {}
    for m in max_ids:
        n = S.order // L.subgroups[m].order
        kind1[n] = kind1.get(n, 0) + t
    auts = automorphisms(S, caps)
    pairs = t * (t - 1) // 2
    kind2_count = pairs * len(auts)
    total = dict(kind1)
    total[S.order] = total.get(S.order, 0) + kind2_count
    can_materialize = S.order**t <= caps.group_order_cap and t == 2
    if materialize is None:
        materialize = can_materialize
    if materialize and not can_materialize:
        raise CapExceeded(f"cannot materialize order {S.order}**{t}")
    report = GoursatReport(
        factor_order=S.order, t=t, aut_count=len(auts),
        kind1_by_index=kind1, kind2_count=kind2_count, kind2_index=S.order,
        total_by_index=dict(sorted(total.items())),
        materialized=materialize, maximality_verified=False,
        factor_lattice=L)
    if not materialize:
        return report

    P = direct_power(S, t, caps=caps)
    pair_idx = _tuple_index_matrix(P, S)
    report.product = P
    report.pair_index = pair_idx
    every = np.arange(S.order)
    for m in max_ids:
        h = L.subgroups[m].elems
        for c in range(t):
            if c == 0:
                elems = pair_idx[np.ix_(h, every)].ravel()
            else:
                elems = pair_idx[np.ix_(every, h)].ravel()
            elems = np.sort(elems).astype(np.int32)
            report.maximals.append(GoursatMaximal(
                kind=1, index=S.order // L.subgroups[m].order,
                coords=(c,), source=m, elems=elems))
    for ai, phi in enumerate(auts):
        elems = np.sort(pair_idx[every, phi.images]).astype(np.int32)
        report.maximals.append(GoursatMaximal(
            kind=2, index=S.order, coords=(0, 1), source=ai, elems=elems))
    keys = {m.elems.tobytes() for m in report.maximals}
    if len(keys) != len(report.maximals):
        raise CheckFailed("classified maximal subgroups are not pairwise distinct")

    table = P.table
    full = P.order
    for m in report.maximals:
        member = np.zeros(full, dtype=bool)
        member[m.elems] = True
        gens = _greedy_gens(table, m.elems)
        for x in np.flatnonzero(~member).tolist():
            joined = _kernels.dimino_join(
                table, m.elems, np.asarray(gens + [int(x)], dtype=np.int32))
            if len(joined) != full:
                raise CheckFailed(
                    f"kind-{m.kind} subgroup of index {m.index} is not maximal")
    report.maximality_verified = True
    return report


@dataclass
class DiagonalCountReport:
    factor_name: str | None
    factor_order: int
    t: int
    sigma_index: int
    sigma_cycles: str
    type1: dict     # index -> count over coordinate-preimage maximals
    type2: tuple    # (coordinate pairs, stabilizing automorphisms, index |S|)
    total: dict
    verified: bool


def diagonal_count(S: FiniteGroup, t: int, sigma, goursat: GoursatReport | None = None,
                   caps: Caps | None = None) -> DiagonalCountReport:
    """Count the maximal subgroups of S^t containing (σ,…,σ).

    Coordinate preimages contribute t times the per-index counts of maximals
    of S containing σ; graphs contribute one subgroup per coordinate pair and
    per automorphism fixing σ.  With a materialized classification the counts
    are replayed by direct membership and a completeness scan checks that
    every proper ⟨(σ,σ), x⟩ lies inside a classified maximal.
    """
    from .lattice import enumerate_subgroups

    caps = caps or caps_from_env()
    if goursat is None:
        goursat = goursat_maximals(S, t, caps=caps)
    L = goursat.factor_lattice
    sigma_idx = S.index_of(sigma) if isinstance(sigma, Permutation) else int(sigma)
    type1: dict[int, int] = {}
    for m in L.maximals_containing([sigma_idx]):
        n = S.order // L.subgroups[int(m)].order
        type1[n] = type1.get(n, 0) + t
    auts = automorphisms(S, caps)
    stab = sum(1 for phi in auts if int(phi.images[sigma_idx]) == sigma_idx)
    pairs = t * (t - 1) // 2
    total = dict(type1)
    if pairs * stab:
        total[S.order] = total.get(S.order, 0) + pairs * stab
    report = DiagonalCountReport(
        factor_name=S.name, factor_order=S.order, t=t, sigma_index=sigma_idx,
        sigma_cycles=cycle_string(S.element(sigma_idx)),
        type1=dict(sorted(type1.items())), type2=(pairs, stab, S.order),
        total=dict(sorted(total.items())), verified=False)
    if not goursat.materialized:
        return report

    P = goursat.product
    g_idx = int(goursat.pair_index[sigma_idx, sigma_idx])
    containing = []
    direct: dict[int, int] = {}
    for m in goursat.maximals:
        member = np.zeros(P.order, dtype=bool)
        member[m.elems] = True
        if member[g_idx]:
            containing.append(member)
            direct[m.index] = direct.get(m.index, 0) + 1
    if direct != report.total:
        raise CheckFailed(
            f"containment scan {direct} disagrees with predicted counts {report.total}")
    table = P.table
    g_cyc = P.cyclic_subgroup_indices(g_idx)
    for x in range(P.order):
        joined = _kernels.dimino_join(
            table, g_cyc, np.asarray([g_idx, x], dtype=np.int32))
        if len(joined) == P.order:
            continue
        if not any(bool(member[joined].all()) for member in containing):
            raise CheckFailed(
                f"proper subgroup <g, {x}> escapes every classified maximal")
    report.verified = True
    return report


# -- the special prime set ----------------------------------------------------


def is_P_prime(p: int) -> bool:
    """True when p >= 7, p is not 11 or 23, and p is not of the form
    (q^d - 1)/(q - 1) for a prime power q and d >= 2."""
    if not _is_prime(p):
        raise ValidationError(f"{p} is not prime")
    if p < 7 or p in (11, 23):
        return False
    for q in range(2, p):
        if _prime_power_base(q) is None:
            continue
        s = 1 + q
        power = q
        while s <= p:
            if s == p:
                return False
            power *= q
            s += power
    return True


# -- builder specs -------------------------------------------------------------


@dataclass(frozen=True)
class BuilderSpec:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"

    def to_json(self):
        return {"name": self.name,
                "args": [a.to_json() if isinstance(a, BuilderSpec) else a
                         for a in self.args]}

    @staticmethod
    def from_json(data) -> "BuilderSpec":
        if not isinstance(data, dict) or "name" not in data:
            raise ParseError("builder JSON needs a name")
        args = []
        for a in data.get("args", ()):
            if isinstance(a, dict):
                args.append(BuilderSpec.from_json(a))
            elif isinstance(a, (int, str)):
                args.append(a)
            else:
                raise ParseError(f"bad builder argument {a!r}")
        return BuilderSpec(name=str(data["name"]), args=tuple(args))


def parse_builder(text: str) -> BuilderSpec:
    """Parse the mini-language: name, name(arg,...) with integer, identifier,
    or nested-spec arguments.  Example: direct_power(alt(5),2)."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def ident():
        nonlocal pos
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] == "_"):
            pos += 1
        if start == pos:
            raise ParseError(f"expected a name at position {start} in {text!r}")
        return text[start:pos]

    def spec():
        nonlocal pos
        skip_ws()
        if pos < len(text) and (text[pos].isdigit() or text[pos] == "-"):
            start = pos
            pos += 1
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            return int(text[start:pos])
        name = ident()
        skip_ws()
        if pos < len(text) and text[pos] == "(":
            pos += 1
            args = []
            skip_ws()
            if pos < len(text) and text[pos] == ")":
                pos += 1
            else:
                while True:
                    args.append(spec())
                    skip_ws()
                    if pos < len(text) and text[pos] == ",":
                        pos += 1
                        continue
                    if pos < len(text) and text[pos] == ")":
                        pos += 1
                        break
                    raise ParseError(f"expected , or ) at position {pos} in {text!r}")
            return BuilderSpec(name=name, args=tuple(args))
        return BuilderSpec(name=name)

    out = spec()
    skip_ws()
    if pos != len(text):
        raise ParseError(f"trailing input at position {pos} in {text!r}")
    if isinstance(out, int):
        raise ParseError("a builder spec cannot be a bare integer")
    return out


def _want(spec: BuilderSpec, kinds) -> list:
    if len(spec.args) != len(kinds):
        raise ParseError(f"{spec.name} takes {len(kinds)} argument(s)")
    out = []
    for a, kind in zip(spec.args, kinds):
        if kind == "int":
            if not isinstance(a, int):
                raise ParseError(f"{spec.name}: expected an integer, got {a!r}")
            out.append(a)
        elif kind == "spec":
            if not isinstance(a, BuilderSpec):
                raise ParseError(f"{spec.name}: expected a nested builder, got {a!r}")
            out.append(a)
        else:  # bare word
            if isinstance(a, BuilderSpec) and not a.args:
                out.append(a.name)
            elif isinstance(a, str):
                out.append(a)
            else:
                raise ParseError(f"{spec.name}: expected a name, got {a!r}")
    return out


def build(spec: BuilderSpec | str, caps: Caps | None = None) -> FiniteGroup:
    """Materialize a catalog entry; crown_power variants return the group
    (use crown_power_preset for the strong element)."""
    caps = caps or caps_from_env()
    if isinstance(spec, str):
        spec = parse_builder(spec)
    name = spec.name
    if name == "cyclic":
        return cyclic(*_want(spec, ["int"]), caps=caps)
    if name == "dihedral":
        return dihedral(*_want(spec, ["int"]), caps=caps)
    if name == "elementary_abelian":
        return elementary_abelian(*_want(spec, ["int", "int"]), caps=caps)
    if name == "sym":
        return sym(*_want(spec, ["int"]), caps=caps)
    if name == "alt":
        return alt(*_want(spec, ["int"]), caps=caps)
    if name == "semidihedral16":
        _want(spec, [])
        return semidihedral16(caps=caps)
    if name == "quaternion8":
        _want(spec, [])
        return quaternion8(caps=caps)
    if name == "direct_power":
        base_spec, t = _want(spec, ["spec", "int"])
        return direct_power(build(base_spec, caps=caps), t, caps=caps)
    if name == "inversion":
        return inversion(*_want(spec, ["int", "int"]), caps=caps)
    if name == "crown_power":
        (variant,) = _want(spec, ["word"])
        return crown_power_preset(variant, caps=caps).group
    raise ParseError(f"unknown builder {name!r}")
