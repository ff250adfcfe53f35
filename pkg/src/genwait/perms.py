"""Permutations, finite permutation groups, and structural maps between them.

Conventions used throughout the package:

  * points are 0-based internally; cycle notation in text and JSON is 1-based;
  * products compose left to right: (p * q)(x) = q(p(x));
  * an enumerated group's elements are sorted lexicographically by image
    array, which puts the identity at index 0;
  * table[i, j] is the element index of "apply i, then j".
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction  # noqa: F401  (re-exported convenience for callers)
from math import gcd

import numpy as np

from . import _kernels
from .config import Caps, caps_from_env
from .errors import CapExceeded, ParseError, ValidationError

SCHEMA = "genwait/1"


class Permutation:
    """Immutable permutation of {0, ..., degree-1} stored as an image tuple."""

    __slots__ = ("images",)

    def __init__(self, images):
        imgs = tuple(int(x) for x in images)
        n = len(imgs)
        seen = [False] * n
        for x in imgs:
            if x < 0 or x >= n or seen[x]:
                raise ValidationError(f"image list {imgs} is not a permutation")
            seen[x] = True
        object.__setattr__(self, "images", imgs)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise ValidationError("degree mismatch in product")
        oi = other.images
        return Permutation(oi[x] for x in self.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(inv)

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        result = identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point, sorted."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        n = 1
        for cyc in self.cycles():
            n = n * len(cyc) // gcd(n, len(cyc))
        return n

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __lt__(self, other: "Permutation"):
        return self.images < other.images

    def __repr__(self):
        return f"Permutation({cycle_string(self)!r}, degree={self.degree})"


def identity(degree: int) -> Permutation:
    return Permutation(range(degree))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse 1-based cycle notation, e.g. "(1,2,3)(4,5)"; "()" is the identity.

    Cycles are composed left to right; points may not repeat within a cycle.
    """
    if degree < 1:
        raise ParseError("degree must be at least 1")
    stripped = text.strip()
    if stripped in ("", "()"):
        return identity(degree)
    consumed = _CYCLE_RE.sub("", stripped)
    if consumed.strip():
        raise ParseError(f"unbalanced or stray characters in {text!r}")
    result = identity(degree)
    for body in _CYCLE_RE.findall(stripped):
        body = body.strip()
        if not body:
            continue
        points = []
        for tok in body.replace(",", " ").split():
            try:
                p = int(tok)
            except ValueError:
                raise ParseError(f"bad point {tok!r} in {text!r}") from None
            if p < 1 or p > degree:
                raise ParseError(f"point {p} out of range 1..{degree} in {text!r}")
            points.append(p - 1)
        if len(set(points)) != len(points):
            raise ParseError(f"repeated point inside a cycle in {text!r}")
        images = list(range(degree))
        for a, b in zip(points, points[1:] + points[:1]):
            images[a] = b
        result = result * Permutation(images)
    return result


def cycle_string(perm: Permutation) -> str:
    cycs = perm.cycles()
    if not cycs:
        return "()"
    return "".join("(" + ",".join(str(x + 1) for x in cyc) + ")" for cyc in cycs)


@dataclass(frozen=True)
class VectorSpaceStructure:
    """Marks a group as Π_f translations of F_prime^dims[f] acting on the
    disjoint union of the affine point sets; factor f occupies the block of
    prime**dims[f] points starting at offsets[f], point = offset + Σ v_i p^i."""

    prime: int
    dims: tuple[int, ...]
    offsets: tuple[int, ...]

    def encode(self, factor: int, vector) -> int:
        pt = 0
        for i, v in enumerate(vector):
            pt += (int(v) % self.prime) * self.prime**i
        return self.offsets[factor] + pt

    def decode(self, factor: int, point: int) -> tuple[int, ...]:
        rel = point - self.offsets[factor]
        out = []
        for _ in range(self.dims[factor]):
            out.append(rel % self.prime)
            rel //= self.prime
        return tuple(out)

    def block(self, factor: int) -> range:
        return range(self.offsets[factor], self.offsets[factor] + self.prime ** self.dims[factor])


class FiniteGroup:
    """A finite permutation group with a fixed canonical element order.

    Build with generate_group / group_product / the constructions catalog;
    the constructor itself trusts that `elements` is closed.
    """

    def __init__(self, elements, generators, name=None, vector_structure=None):
        if isinstance(elements, np.ndarray):
            mat = np.asarray(elements, dtype=np.int32)
        else:
            mat = np.array([p.images for p in elements], dtype=np.int32)
        if mat.ndim != 2 or mat.shape[0] < 1:
            raise ValidationError("element list must be a nonempty image matrix")
        order = np.lexsort(mat.T[::-1])
        self.images = np.ascontiguousarray(mat[order])
        self.degree = int(self.images.shape[1])
        self.generators = [Permutation(g.images) if isinstance(g, Permutation) else Permutation(g)
                           for g in generators]
        self.name = name
        self.vector_structure = vector_structure
        if list(self.images[0]) != list(range(self.degree)):
            raise ValidationError("identity missing; element list is not a group")
        self._index = None
        self._table = None
        self._inverses = None
        self._orders = None
        self._classes = None
        self._dag = None
        self._rmul_cache = {}

    # -- basics ------------------------------------------------------------

    @property
    def order(self) -> int:
        return int(self.images.shape[0])

    def __len__(self):
        return self.order

    def __repr__(self):
        label = self.name or "group"
        return f"<FiniteGroup {label}: order {self.order}, degree {self.degree}>"

    def element(self, idx: int) -> Permutation:
        return Permutation(self.images[idx])

    def index_of(self, perm) -> int:
        if self._index is None:
            self._index = {self.images[i].tobytes(): i for i in range(self.order)}
        if isinstance(perm, Permutation):
            key = np.asarray(perm.images, dtype=np.int32).tobytes()
        else:
            key = np.asarray(perm, dtype=np.int32).tobytes()
        try:
            return self._index[key]
        except KeyError:
            raise ValidationError("permutation is not an element of this group") from None

    def __contains__(self, perm):
        if self._index is None:
            self.index_of(identity(self.degree))
        key = np.asarray(perm.images if isinstance(perm, Permutation) else perm,
                         dtype=np.int32).tobytes()
        return key in self._index

    @property
    def generator_indices(self) -> list[int]:
        return [self.index_of(g) for g in self.generators]

    # -- multiplication ----------------------------------------------------

    @property
    def table(self) -> np.ndarray:
        """Full multiplication table; cached, refused above the table cap."""
        if self._table is None:
            cap = caps_from_env().table_order_cap
            if self.order > cap:
                raise CapExceeded(
                    f"multiplication table for order {self.order} exceeds cap {cap}")
            self._table = _kernels.build_table(self.images)
        return self._table

    def has_table(self) -> bool:
        return self.order <= caps_from_env().table_order_cap

    def rmul_column(self, g: int) -> np.ndarray:
        """Index of x*g for every element x, as a vector (table column)."""
        if self._table is not None or self.has_table():
            return self.table[:, g]
        col = self._rmul_cache.get(g)
        if col is None:
            composed = self.images[g][self.images]
            col = np.fromiter(
                (self.index_of(row) for row in composed), dtype=np.int32, count=self.order)
            self._rmul_cache[g] = col
        return col

    def product_index(self, i: int, j: int) -> int:
        if self._table is not None or self.has_table():
            return int(self.table[i, j])
        return self.index_of(self.images[j][self.images[i]])

    @property
    def inverses(self) -> np.ndarray:
        if self._inverses is None:
            inv_rows = np.argsort(self.images, axis=1).astype(np.int32)
            self._inverses = np.fromiter(
                (self.index_of(r) for r in inv_rows), dtype=np.int32, count=self.order)
        return self._inverses

    @property
    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            self._orders = np.fromiter(
                (Permutation(row).order() for row in self.images),
                dtype=np.int64, count=self.order)
        return self._orders

    # -- conjugacy ----------------------------------------------------------

    def conjugate_index(self, x: int, g: int) -> int:
        """Index of g^-1 * x * g."""
        ginv = int(self.inverses[g])
        row = self.images[g][self.images[x][self.images[ginv]]]
        return self.index_of(row)

    @property
    def conjugacy_classes(self) -> list[np.ndarray]:
        """Classes as sorted index arrays, ordered by smallest member."""
        if self._classes is None:
            n = self.order
            assigned = np.zeros(n, dtype=bool)
            gens = self.generator_indices
            classes = []
            for start in range(n):
                if assigned[start]:
                    continue
                stack = [start]
                assigned[start] = True
                members = [start]
                while stack:
                    x = stack.pop()
                    for g in gens:
                        y = self.conjugate_index(x, g)
                        if not assigned[y]:
                            assigned[y] = True
                            members.append(y)
                            stack.append(y)
                classes.append(np.array(sorted(members), dtype=np.int32))
            self._classes = classes
        return self._classes

    @property
    def class_representatives(self) -> list[int]:
        return [int(c[0]) for c in self.conjugacy_classes]

    # -- closures and distinguished subgroups -------------------------------

    def closure_indices(self, gen_idxs) -> np.ndarray:
        """Sorted element indices of the subgroup generated by gen_idxs."""
        gens = np.asarray(sorted({int(g) for g in gen_idxs}), dtype=np.int32)
        base = np.array([0], dtype=np.int32)
        if gens.size == 0:
            return base
        return _kernels.dimino_join(self.table, base, gens)

    def cyclic_subgroup_indices(self, g: int) -> np.ndarray:
        elems = [0]
        x = int(g)
        while x != 0:
            elems.append(x)
            x = self.product_index(x, g)
        return np.array(sorted(elems), dtype=np.int32)

    def is_subgroup_indices(self, elems) -> bool:
        elems = np.asarray(elems, dtype=np.intp)
        if 0 not in elems:
            return False
        member = np.zeros(self.order, dtype=bool)
        member[elems] = True
        prods = self.table[np.ix_(elems, elems)]
        return bool(member[prods].all())

    def conjugate_set(self, elems, g: int) -> np.ndarray:
        """Sorted indices of g^-1 * {elems} * g."""
        elems = np.asarray(elems, dtype=np.intp)
        ginv = int(self.inverses[g])
        out = self.table[self.table[ginv][elems], g]
        return np.sort(out).astype(np.int32)

    def is_normal_indices(self, elems) -> bool:
        elems = np.asarray(sorted(int(x) for x in elems), dtype=np.int32)
        for g in self.generator_indices:
            if not np.array_equal(self.conjugate_set(elems, g), elems):
                return False
        return True

    def normal_closure_indices(self, seed) -> np.ndarray:
        gens = sorted({int(x) for x in seed})
        current = self.closure_indices(gens)
        while True:
            members = set(current.tolist())
            new = []
            for g in self.generator_indices:
                conj = self.conjugate_set(gens, g)
                new.extend(int(x) for x in conj if int(x) not in members)
            if not new:
                return current
            gens = sorted(set(gens) | set(new))
            current = self.closure_indices(gens)

    def center_indices(self) -> np.ndarray:
        mask = np.ones(self.order, dtype=bool)
        for g in self.generator_indices:
            mask &= self.table[:, g] == self.table[g, :]
        return np.flatnonzero(mask).astype(np.int32)

    def derived_subgroup_indices(self) -> np.ndarray:
        gens = self.generator_indices
        inv = self.inverses
        comms = set()
        for a in gens:
            for b in gens:
                ab = self.table[a, b]
                ba = self.table[b, a]
                comms.add(int(self.table[int(inv[ba]), ab]))
        return self.normal_closure_indices(comms)

    def is_abelian(self) -> bool:
        gens = self.generators
        return all((a * b).images == (b * a).images for a in gens for b in gens)

    def is_simple(self) -> bool:
        if self.order == 1:
            return False
        for rep in self.class_representatives:
            if rep == 0:
                continue
            if len(self.normal_closure_indices([rep])) != self.order:
                return False
        return True

    def is_nilpotent(self) -> bool:
        """Lower central series reaches 1 (computed via generator commutators)."""
        gens = self.generator_indices
        inv = self.inverses
        layer = list(gens)
        current = self.closure_indices(gens)  # = whole group
        while True:
            comms = set()
            for a in gens:
                for b in layer:
                    ab = self.table[a, b]
                    ba = self.table[b, a]
                    comms.add(int(self.table[int(inv[ba]), ab]))
            comms.discard(0)
            if not comms:
                return True
            nxt = self.normal_closure_indices(comms)
            if len(nxt) == len(current) and np.array_equal(nxt, current):
                return False
            if len(nxt) == 1:
                return True
            # generators of the next layer: the commutators themselves suffice
            layer = sorted(comms)
            current = nxt


def subgroup_as_group(G: FiniteGroup, elems, gens_hint=None, name=None) -> FiniteGroup:
    """Materialize a subgroup (given by element indices) as its own group."""
    elems = np.asarray(sorted(int(x) for x in elems), dtype=np.int32)
    if gens_hint is None:
        present = set(elems.tolist())
        gens: list[int] = []
        covered = {0}
        for e in elems.tolist():
            if e not in covered:
                gens.append(e)
                covered = set(G.closure_indices(gens).tolist())
                if not covered <= present:
                    raise ValidationError("element set is not closed")
        gens_hint = gens
    gen_perms = [G.element(int(g)) for g in gens_hint] or [identity(G.degree)]
    return FiniteGroup(G.images[elems], gen_perms, name=name)


def generate_group(generators, name=None, caps: Caps | None = None,
                   vector_structure: VectorSpaceStructure | None = None) -> FiniteGroup:
    """Enumerate the group generated by the given permutations (breadth-first
    over right-multiplication), respecting the group order cap."""
    caps = caps or caps_from_env()
    gens = [g if isinstance(g, Permutation) else Permutation(g) for g in generators]
    if not gens:
        raise ValidationError("need at least one permutation (identity is fine)")
    degree = gens[0].degree
    if any(g.degree != degree for g in gens):
        raise ValidationError("generators must share a degree")
    gen_rows = [np.asarray(g.images, dtype=np.int32) for g in gens]
    id_row = np.arange(degree, dtype=np.int32)
    rows = [id_row]
    seen = {id_row.tobytes()}
    frontier = [id_row]
    while frontier:
        fm = np.stack(frontier)
        frontier = []
        for grow in gen_rows:
            prods = grow[fm]  # right-multiply each frontier row by the generator
            for row in prods:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    rows.append(row)
                    frontier.append(row)
        if len(rows) > caps.group_order_cap:
            raise CapExceeded(
                f"group order exceeds cap {caps.group_order_cap}", partial=len(rows))
    return FiniteGroup(np.stack(rows), gens, name=name,
                       vector_structure=vector_structure)


# -- products -------------------------------------------------------------


@dataclass(frozen=True)
class SemidirectAction:
    """Action of the right factor on a vector-space left factor, given as one
    invertible matrix mod `prime` per (right generator, vector factor)."""

    prime: int
    matrices: tuple  # matrices[gen][factor] = tuple-of-row-tuples


def _mat_mul(A, B, p):
    n, m, k = len(A), len(B), len(B[0])
    assert len(A[0]) == m
    return tuple(
        tuple(sum(A[i][j] * B[j][l] for j in range(m)) % p for l in range(k))
        for i in range(n)
    )


def _mat_identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _vec_mat(v, A, p):
    n = len(A)
    return tuple(sum(v[i] * A[i][j] for i in range(n)) % p for j in range(len(A[0])))


def _action_element_matrices(right: FiniteGroup, action: SemidirectAction):
    """Per-element matrices of the action, built by following a BFS word
    decomposition of `right`; raises if the generator matrices do not define
    a homomorphism."""
    nf = len(action.matrices[0])
    dims = [len(action.matrices[0][f]) for f in range(nf)]
    p = action.prime
    if len(action.matrices) != len(right.generators):
        raise ValidationError("one matrix tuple per right generator required")
    mats = [None] * right.order
    mats[0] = tuple(_mat_identity(d) for d in dims)
    order_bfs = [0]
    pos = 0
    while pos < len(order_bfs):
        x = order_bfs[pos]
        pos += 1
        for gi, g in enumerate(right.generator_indices):
            y = right.product_index(x, g)
            prod = tuple(
                _mat_mul(mats[x][f], action.matrices[gi][f], p) for f in range(nf))
            if mats[y] is None:
                mats[y] = prod
                order_bfs.append(y)
            elif mats[y] != prod:
                raise ValidationError("action matrices do not define a homomorphism")
    return mats


def group_product(left: FiniteGroup, right: FiniteGroup, action: SemidirectAction | None = None,
                  name=None, caps: Caps | None = None) -> FiniteGroup:
    """Direct product (no action) on disjoint supports, or semidirect product
    left ⋊ right for a vector-space left factor.

    The semidirect product acts on the disjoint union of the affine factor
    point sets when the action is faithful, and falls back to the regular
    action on |left|·|right| points otherwise.
    """
    caps = caps or caps_from_env()
    if action is None:
        dl, dr = left.degree, right.degree
        gens = [Permutation(list(g.images) + list(range(dl, dl + dr)))
                for g in left.generators]
        gens += [Permutation(list(range(dl)) + [dl + x for x in g.images])
                 for g in right.generators]
        target = left.order * right.order
        if target > caps.group_order_cap:
            raise CapExceeded(f"product order {target} exceeds cap")
        G = generate_group(gens, name=name, caps=caps)
        if G.order != target:
            raise ValidationError("direct product closure has unexpected order")
        return G

    vs = left.vector_structure
    if vs is None:
        raise ValidationError(
            "semidirect products need the left factor presented as a vector space")
    p = vs.prime
    if action.prime != p:
        raise ValidationError("action prime does not match the left factor")
    nf = len(vs.dims)
    for gm in action.matrices:
        if len(gm) != nf:
            raise ValidationError("one matrix per vector factor required")
        for f, A in enumerate(gm):
            if len(A) != vs.dims[f] or any(len(r) != vs.dims[f] for r in A):
                raise ValidationError("matrix shape does not match factor dimension")
    mats = _action_element_matrices(right, action)
    kernel = [x for x in range(right.order)
              if all(mats[x][f] == _mat_identity(vs.dims[f]) for f in range(nf))]
    faithful = len(kernel) == 1
    if faithful:
        gens = [Permutation(g.images) for g in left.generators]
        for gm in action.matrices:
            images = list(range(left.degree))
            for f in range(nf):
                for pt in vs.block(f):
                    v = vs.decode(f, pt)
                    try:
                        w = _vec_mat(v, gm[f], p)
                    except IndexError:
                        raise ValidationError("malformed action matrix") from None
                    images[pt] = vs.encode(f, w)
            if len(set(images)) != left.degree:
                raise ValidationError("action matrix is not invertible")
            gens.append(Permutation(images))
        target = left.order * right.order
        if target > caps.group_order_cap:
            raise CapExceeded(f"product order {target} exceeds cap")
        # the product acts on the same affine points, so the left factor's
        # coordinate structure stays valid
        G = generate_group(gens, name=name, caps=caps, vector_structure=vs)
        if G.order != target:
            raise ValidationError("semidirect closure has unexpected order "
                                  f"({G.order} != {target})")
        return G

    # regular action fallback: points are (left element, right element) pairs
    target = left.order * right.order
    if target > caps.group_order_cap:
        raise CapExceeded(f"product order {target} exceeds cap")
    nl = left.order

    def left_vector(idx):
        perm = left.images[idx]
        # translation by v maps the origin of each factor block to v
        return tuple(vs.decode(f, int(perm[vs.offsets[f]])) for f in range(nf))

    vec_to_left = {left_vector(i): i for i in range(nl)}
    inv_r = right.inverses

    def pair_point(l_idx, r_idx):
        return l_idx * right.order + r_idx

    def act(l_idx, r_idx, a_idx, x_idx):
        # (b, y) * (a, x) = (b + a·M[y^-1], y x)
        avec = left_vector(a_idx)
        m = mats[int(inv_r[r_idx])]
        shifted = tuple(
            tuple((bi + wi) % p for bi, wi in zip(bvec, _vec_mat(avec[f], m[f], p)))
            for f, bvec in enumerate(left_vector(l_idx))
        )
        return pair_point(vec_to_left[shifted], right.product_index(r_idx, x_idx))

    gens = []
    for a in left.generator_indices:
        gens.append(Permutation(
            act(b, y, a, 0) for b in range(nl) for y in range(right.order)))
    for x in right.generator_indices:
        gens.append(Permutation(
            act(b, y, 0, x) for b in range(nl) for y in range(right.order)))
    G = generate_group(gens, name=name, caps=caps)
    if G.order != target:
        raise ValidationError("regular semidirect closure has unexpected order")
    return G


# -- quotients and homomorphisms -------------------------------------------


class GroupHomomorphism:
    """A map between enumerated groups, stored as codomain indices per
    domain element index."""

    def __init__(self, domain: FiniteGroup, codomain: FiniteGroup, images):
        self.domain = domain
        self.codomain = codomain
        self.images = np.asarray(images, dtype=np.int32)
        if self.images.shape != (domain.order,):
            raise ValidationError("need one image per domain element")
        if self.images[0] != 0:
            raise ValidationError("identity must map to identity")

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def image_of_perm(self, perm: Permutation) -> Permutation:
        return self.codomain.element(self(self.domain.index_of(perm)))

    def kernel_indices(self) -> np.ndarray:
        return np.flatnonzero(self.images == 0).astype(np.int32)

    def image_indices(self) -> np.ndarray:
        return np.unique(self.images).astype(np.int32)

    def is_surjective(self) -> bool:
        return len(self.image_indices()) == self.codomain.order

    def is_injective(self) -> bool:
        return len(self.kernel_indices()) == 1

    def is_bijective(self) -> bool:
        return self.is_injective() and self.domain.order == self.codomain.order

    def validate(self, caps: Caps | None = None, seed: int = 0) -> None:
        """Check images(a*b) == images(a)*images(b), exhaustively for small
        domains and on seeded random pairs above the exhaustive cap."""
        caps = caps or caps_from_env()
        n = self.domain.order
        if n <= caps.hom_exhaustive_cap:
            pairs = ((a, b) for a in range(n) for b in range(n))
        else:
            rng = np.random.default_rng(seed)
            draws = rng.integers(0, n, size=(caps.hom_sample_count, 2))
            pairs = map(tuple, draws)
        for a, b in pairs:
            ab = self.domain.product_index(int(a), int(b))
            im = self.codomain.product_index(self(int(a)), self(int(b)))
            if self(ab) != im:
                raise ValidationError("map is not a homomorphism")

    @staticmethod
    def from_generator_images(domain: FiniteGroup, codomain: FiniteGroup,
                              gen_images) -> "GroupHomomorphism":
        """Extend generator images along a BFS word decomposition of the
        domain; the fill doubles as a complete homomorphism check."""
        imgs = []
        for gi in gen_images:
            if isinstance(gi, Permutation):
                imgs.append(codomain.index_of(gi))
            else:
                imgs.append(int(gi))
        if len(imgs) != len(domain.generators):
            raise ValidationError("one image per domain generator required")
        images = np.full(domain.order, -1, dtype=np.int64)
        images[0] = 0
        queue = [0]
        pos = 0
        gen_idx = domain.generator_indices
        while pos < len(queue):
            x = queue[pos]
            pos += 1
            for g, cg in zip(gen_idx, imgs):
                y = domain.product_index(x, g)
                im = codomain.product_index(int(images[x]), cg)
                if images[y] == -1:
                    images[y] = im
                    queue.append(y)
                elif images[y] != im:
                    raise ValidationError("generator images do not define a homomorphism")
        if (images == -1).any():
            raise ValidationError("generators do not generate the domain")
        return GroupHomomorphism(domain, codomain, images)


def quotient_group(G: FiniteGroup, normal_elems, name=None):
    """Quotient by a normal subgroup, returned with the projection map.

    The quotient acts on the right cosets, labeled in order of their smallest
    member, so the result is canonical.
    """
    N = np.asarray(sorted(int(x) for x in normal_elems), dtype=np.int32)
    if not G.is_subgroup_indices(N):
        raise ValidationError("kernel candidate is not a subgroup")
    if not G.is_normal_indices(N):
        raise ValidationError("kernel candidate is not normal")
    n = G.order
    coset_of = np.full(n, -1, dtype=np.int32)
    reps = []
    for x in range(n):
        if coset_of[x] == -1:
            coset_of[G.table[N, x]] = len(reps)
            reps.append(x)
    reps = np.array(reps, dtype=np.int32)
    k = len(reps)
    gen_perms = []
    for g in G.generator_indices:
        gen_perms.append(Permutation(coset_of[G.table[reps, g]]))
    Q = generate_group(gen_perms, name=name)
    if Q.order != n // len(N):
        raise ValidationError("coset action has unexpected order")
    images = np.empty(n, dtype=np.int32)
    for x in range(n):
        images[x] = Q.index_of(coset_of[G.table[reps, x]])
    hom = GroupHomomorphism(G, Q, images)
    if not np.array_equal(hom.kernel_indices(), N):
        raise ValidationError("projection kernel mismatch")
    return Q, hom


# -- automorphisms and epimorphism counting ---------------------------------


def _reduced_generators(G: FiniteGroup) -> list[int]:
    gens = sorted(set(G.generator_indices) - {0})
    if not gens:
        return []
    changed = True
    while changed:
        changed = False
        for g in list(gens):
            rest = [x for x in gens if x != g]
            if rest and len(G.closure_indices(rest)) == G.order:
                gens = rest
                changed = True
                break
    return gens


def automorphisms(G: FiniteGroup, caps: Caps | None = None) -> list[GroupHomomorphism]:
    """All automorphisms, by backtracking over generator images filtered by
    element order and conjugacy class size."""
    caps = caps or caps_from_env()
    if G.order > caps.aut_order_cap:
        raise CapExceeded(f"automorphism search refused above order {caps.aut_order_cap}")
    gens = _reduced_generators(G)
    if not gens:  # trivial group
        return [GroupHomomorphism(G, G, [0])]
    class_size = np.empty(G.order, dtype=np.int64)
    for cls in G.conjugacy_classes:
        class_size[cls] = len(cls)
    orders = G.element_orders
    candidates = []
    for g in gens:
        match = np.flatnonzero((orders == orders[g]) & (class_size == class_size[g]))
        candidates.append([int(x) for x in match])
    found = []

    def backtrack(i, chosen):
        if i == len(gens):
            try:
                phi = GroupHomomorphism.from_generator_images(
                    _sub_for_gens, G, list(chosen))
            except ValidationError:
                return
            if phi.is_bijective():
                found.append(phi)
            return
        for c in candidates[i]:
            backtrack(i + 1, chosen + [c])

    # domain presented on the reduced generators so the word fill covers G
    _sub_for_gens = subgroup_as_group(G, np.arange(G.order), gens_hint=gens, name=G.name)
    backtrack(0, [])
    return found


@dataclass
class EpimorphismCensus:
    """Exhaustive count of generating d-tuples of X, with kernel classes
    given as Aut(X)-orbits of the tuples."""

    d: int
    group_order: int
    count: int
    aut_count: int
    kernel_classes: list  # list of sorted tuple lists
    generating_tuples: list

    @property
    def rho(self) -> int:
        return len(self.kernel_classes)


def epimorphisms_onto(d: int, X: FiniteGroup, caps: Caps | None = None) -> EpimorphismCensus:
    """Count surjections from a rank-d free group onto X by enumerating all
    |X|**d tuples with memoized subgroup joins."""
    caps = caps or caps_from_env()
    if d < 1:
        raise ValidationError("d must be positive")
    total = X.order**d
    if total > caps.epi_tuple_cap:
        raise CapExceeded(f"{total} tuples exceed the enumeration cap")
    table = X.table
    sub_ids: dict[bytes, int] = {}
    sub_elems: list[np.ndarray] = []
    sub_gens: list[tuple[int, ...]] = []

    def intern(elems, gens):
        key = elems.tobytes()
        sid = sub_ids.get(key)
        if sid is None:
            sid = len(sub_elems)
            sub_ids[key] = sid
            sub_elems.append(elems)
            sub_gens.append(tuple(gens))
        return sid

    trivial = intern(np.array([0], dtype=np.int32), ())
    join_memo: dict[tuple[int, int], int] = {}

    def join(sid, x):
        key = (sid, x)
        out = join_memo.get(key)
        if out is None:
            gens = list(sub_gens[sid]) + [x]
            elems = _kernels.dimino_join(table, sub_elems[sid],
                                         np.asarray(gens, dtype=np.int32))
            out = intern(elems, gens)
            join_memo[key] = out
        return out

    full_size = X.order
    tuples = []

    def recurse(depth, sid, prefix):
        if depth == d:
            if len(sub_elems[sid]) == full_size:
                tuples.append(tuple(prefix))
            return
        for x in range(X.order):
            recurse(depth + 1, join(sid, x), prefix + [x])

    recurse(0, trivial, [])
    auts = automorphisms(X, caps)
    tuple_set = set(tuples)
    classes = []
    unassigned = set(tuples)
    for t in sorted(tuples):
        if t not in unassigned:
            continue
        orbit = {tuple(int(phi.images[x]) for x in t) for phi in auts}
        if not orbit <= tuple_set:
            raise ValidationError("automorphism image of a generating tuple escaped")
        unassigned -= orbit
        classes.append(sorted(orbit))
    count = len(tuples)
    if count % len(auts) != 0 or count // len(auts) != len(classes):
        raise ValidationError("Aut-orbit bookkeeping failed")
    return EpimorphismCensus(d=d, group_order=X.order, count=count,
                             aut_count=len(auts), kernel_classes=classes,
                             generating_tuples=tuples)


# -- serialization ----------------------------------------------------------


def group_to_json(G: FiniteGroup) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "group",
        "name": G.name,
        "degree": G.degree,
        "order": G.order,
        "generators": [cycle_string(g) for g in G.generators],
    }


def group_from_json(data, caps: Caps | None = None) -> FiniteGroup:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad group JSON: {exc}") from None
    for field in ("degree", "generators"):
        if field not in data:
            raise ParseError(f"group JSON missing {field!r}")
    degree = int(data["degree"])
    gens = [parse_cycles(s, degree) for s in data["generators"]]
    if not gens:
        gens = [identity(degree)]
    G = generate_group(gens, name=data.get("name"), caps=caps)
    if "order" in data and G.order != int(data["order"]):
        raise ValidationError(
            f"declared order {data['order']} but closure has {G.order}")
    return G
