"""Finite groups acting on index sets and complex vectors.

Groups are stored as explicit ordered element lists: permutations as index
maps (applied to vectors in O(M)), dense unitaries only for conjugated
groups. The permutation ordering strategies (Random, SJT, Lehmer, Heap)
live here as lazy iterators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence, Union

import numpy as np

UNITARITY_TOL = 1e-10
CLOSURE_CHECK_LIMIT = 10_000
SYMMETRIC_MAX_M = 8
DEFAULT_CLOSURE_CAP = 100_000


class GroupKind(str, Enum):
    TRIVIAL = "trivial"
    CYCLIC = "cyclic"
    DIHEDRAL = "dihedral"
    DIRECT_PRODUCT = "direct_product"
    SYMMETRIC = "symmetric"
    CONJUGATED = "conjugated"
    CUSTOM = "custom"


class OrderingVariant(str, Enum):
    RANDOM = "random"
    SJT = "sjt"
    LEHMER = "lehmer"
    HEAP = "heap"


class GroupError(ValueError):
    """Invalid group construction or use."""


@dataclass(frozen=True)
class Permutation:
    """A permutation of {0..M-1} stored as an index map.

    ``map[i]`` is the image of index i; the vector action is
    ``(g . x)[i] = x[map[i]]``.
    """

    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.intp)
        object.__setattr__(self, "map", m)
        if sorted(m.tolist()) != list(range(len(m))):
            raise GroupError("permutation map is not a bijection")

    @property
    def dim(self) -> int:
        return len(self.map)

    @staticmethod
    def identity(m: int) -> "Permutation":
        return Permutation(np.arange(m))

    @staticmethod
    def shift(m: int, k: int) -> "Permutation":
        """Cyclic shift: i -> (i + k) mod m."""
        return Permutation((np.arange(m) + k) % m)

    @staticmethod
    def swap(m: int, i: int, j: int) -> "Permutation":
        a = np.arange(m)
        a[i], a[j] = a[j], a[i]
        return Permutation(a)

    def compose(self, other: "Permutation") -> "Permutation":
        """(self o other)(i) = self(other(i))."""
        return Permutation(self.map[other.map])

    def inverse(self) -> "Permutation":
        return Permutation(np.argsort(self.map))

    def apply(self, x: np.ndarray) -> np.ndarray:
        return x[self.map]

    def matrix(self) -> np.ndarray:
        p = np.zeros((self.dim, self.dim))
        p[np.arange(self.dim), self.map] = 1.0
        return p

    def key(self) -> tuple:
        return tuple(self.map.tolist())

    def is_identity(self) -> bool:
        return bool(np.all(self.map == np.arange(self.dim)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.map, other.map)

    def __hash__(self) -> int:
        return hash(self.key())


Element = Union[Permutation, np.ndarray]


def _is_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    m = u.shape[0]
    return u.shape == (m, m) and np.linalg.norm(u @ u.conj().T - np.eye(m)) <= tol * m


@dataclass
class GroupRep:
    """A finite group realized as an ordered list of unitary actions."""

    kind: GroupKind
    dim: int
    elements: list  # Permutation or dense (dim x dim) unitaries
    order: int = 0
    generators: Optional[list] = None
    params: Optional[tuple] = None  # factor sizes for direct products
    closure_checked: bool = True

    def __post_init__(self):
        if not self.elements:
            raise GroupError("group needs at least one element")
        self.order = len(self.elements)
        first = self.elements[0]
        if isinstance(first, Permutation):
            if not first.is_identity():
                raise GroupError("elements[0] must be the identity action")
        elif np.linalg.norm(first - np.eye(self.dim)) > UNITARITY_TOL * self.dim:
            raise GroupError("elements[0] must be the identity action")
        for e in self.elements:
            if isinstance(e, Permutation):
                if e.dim != self.dim:
                    raise GroupError("element dimension mismatch")
            elif not _is_unitary(e):
                raise GroupError("dense element is not unitary")
        if self.is_permutation_group():
            budget = self.order * self.order * self.dim
            if self.order <= CLOSURE_CHECK_LIMIT and budget <= 2e8:
                self._check_closure()
                self.closure_checked = True
            else:
                self.closure_checked = False
        else:
            # conjugated groups inherit closure from their (checked) base
            self.closure_checked = self.kind == GroupKind.CONJUGATED

    def _encode(self, maps: np.ndarray) -> np.ndarray:
        """Collision-free integer keys for permutation maps (dim <= 15)."""
        powers = self.dim ** np.arange(self.dim, dtype=np.int64)
        return maps.astype(np.int64) @ powers

    def _check_closure(self):
        maps = np.stack([e.map for e in self.elements])
        if self.dim <= 15:
            base = np.sort(self._encode(maps))
            if len(np.unique(base)) != self.order:
                raise GroupError("duplicate group elements")
            for e in self.elements:
                keys = np.sort(self._encode(e.map[maps]))
                # left multiplication by a group element permutes the group
                if not np.array_equal(keys, base):
                    raise GroupError("element set is not closed under composition")
        else:
            index = {e.key() for e in self.elements}
            if len(index) != self.order:
                raise GroupError("duplicate group elements")
            for e in self.elements:
                prods = e.map[maps]
                for row in prods:
                    if tuple(row.tolist()) not in index:
                        raise GroupError("element set is not closed under composition")

    def is_permutation_group(self) -> bool:
        return all(isinstance(e, Permutation) for e in self.elements)

    def apply_all(self, x: np.ndarray) -> np.ndarray:
        """Orbit matrix: row g is elements[g] applied to x."""
        if self.is_permutation_group():
            maps = np.stack([e.map for e in self.elements])
            return x[maps]
        return np.stack([self.apply(g, x) for g in range(self.order)])

    def apply(self, g: int, x: np.ndarray) -> np.ndarray:
        e = self.elements[g]
        if isinstance(e, Permutation):
            return e.apply(x)
        return e @ x

    def element_matrix(self, g: int) -> np.ndarray:
        e = self.elements[g]
        return e.matrix() if isinstance(e, Permutation) else e

    def orbit_sizes(self) -> tuple:
        """Sorted sizes of the index-set orbits (permutation groups only)."""
        if not self.is_permutation_group():
            return (self.dim,)
        parent = list(range(self.dim))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for e in self.elements:
            for i, j in enumerate(e.map):
                ri, rj = find(i), find(int(j))
                if ri != rj:
                    parent[ri] = rj
        sizes = {}
        for i in range(self.dim):
            r = find(i)
            sizes[r] = sizes.get(r, 0) + 1
        return tuple(sorted(sizes.values()))


def build_group(kind: Union[str, GroupKind], m: int, params: Optional[Sequence[int]] = None) -> GroupRep:
    """Construct a catalog group of the given kind acting on m indices.

    Element ordering is deterministic: cyclic by ascending shift, dihedral
    rotations before reflections, direct products lexicographic in the
    factor shifts, symmetric lexicographic.
    """
    kind = GroupKind(kind)
    if m < 1:
        raise GroupError("dimension must be >= 1")
    if kind == GroupKind.TRIVIAL:
        return GroupRep(kind, m, [Permutation.identity(m)])
    if kind == GroupKind.CYCLIC:
        return GroupRep(kind, m, [Permutation.shift(m, k) for k in range(m)])
    if kind == GroupKind.DIHEDRAL:
        rot = [Permutation.shift(m, k) for k in range(m)]
        refl = [Permutation((k - np.arange(m)) % m) for k in range(m)]
        return GroupRep(kind, m, rot + refl)
    if kind == GroupKind.DIRECT_PRODUCT:
        if not params:
            raise GroupError("direct product needs factor sizes")
        factors = [int(f) for f in params]
        if math.prod(factors) != m:
            raise GroupError(f"product of factors {factors} != dimension {m}")
        elements = []
        for shifts in itertools.product(*[range(f) for f in factors]):
            idx = np.arange(m)
            digits = []
            rest = idx.copy()
            for f in reversed(factors):
                digits.append(rest % f)
                rest //= f
            digits.reverse()  # digits[a] = coordinate of each index in factor a
            shifted = [(d + s) % f for d, s, f in zip(digits, shifts, factors)]
            out = np.zeros(m, dtype=np.intp)
            for d, f in zip(shifted, factors):
                out = out * f + d
            elements.append(Permutation(out))
        return GroupRep(kind, m, elements, params=tuple(factors))
    if kind == GroupKind.SYMMETRIC:
        if m > SYMMETRIC_MAX_M:
            raise GroupError(f"symmetric group enumeration capped at M = {SYMMETRIC_MAX_M}")
        elements = [Permutation(np.array(p)) for p in itertools.permutations(range(m))]
        return GroupRep(kind, m, elements)
    raise GroupError(f"build_group does not construct kind {kind}; use conjugate_group or GroupRep directly")


def conjugate_group(base: GroupRep, u: np.ndarray) -> GroupRep:
    """The group {U^H g U : g in base}, e.g. the chirp-adapted group."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (base.dim, base.dim) or not _is_unitary(u):
        raise GroupError("conjugation matrix must be unitary")
    uh = u.conj().T
    elements = [uh @ base.element_matrix(g) @ u for g in range(base.order)]
    out = GroupRep(GroupKind.CONJUGATED, base.dim, elements)
    out.generators = [u]
    return out


def closure(generators: Sequence[Permutation], cap: int = DEFAULT_CLOSURE_CAP) -> GroupRep:
    """Subgroup generated by the given permutations, identity included."""
    if not generators:
        raise GroupError("need at least one generator")
    m = generators[0].dim
    if any(g.dim != m for g in generators):
        raise GroupError("generators act on different dimensions")
    seen = {Permutation.identity(m).key(): Permutation.identity(m)}
    frontier = [Permutation.identity(m)]
    gens = list(generators)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = g.compose(h)
                k = p.key()
                if k not in seen:
                    if len(seen) >= cap:
                        raise GroupError(f"closure cap exceeded (reached {len(seen)} elements)")
                    seen[k] = p
                    nxt.append(p)
        frontier = nxt
    ident = Permutation.identity(m)
    elements = [ident] + [p for k, p in sorted(seen.items()) if p != ident]
    return GroupRep(GroupKind.CUSTOM, m, elements, generators=gens)


@dataclass(frozen=True)
class OrderingStrategy:
    """Permutation selection strategy with its seed.

    The seed drives the i.i.d. draws for Random and the random starting
    permutation for the structured variants.
    """

    variant: Union[str, OrderingVariant]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variant", OrderingVariant(self.variant))


def _sjt_sequence(m: int) -> Iterator[np.ndarray]:
    """Steinhaus-Johnson-Trotter from the identity; adjacent swaps only."""
    perm = list(range(m))
    direction = [-1] * m  # all looking left
    yield np.array(perm)
    while True:
        mobile, mpos = -1, -1
        for i, v in enumerate(perm):
            j = i + direction[v]
            if 0 <= j < m and perm[j] < v and v > mobile:
                mobile, mpos = v, i
        if mobile < 0:
            return
        j = mpos + direction[mobile]
        perm[mpos], perm[j] = perm[j], perm[mpos]
        for v in perm:
            if v > mobile:
                direction[v] = -direction[v]
        yield np.array(perm)


def sjt_unrank(m: int, rank: int) -> np.ndarray:
    """The rank-th permutation of the SJT (plain changes) order.

    The largest element zigzags fastest: it sweeps right-to-left across the
    level-(m-1) permutation on even blocks and back on odd ones.
    """
    def rec(n: int, r: int) -> list:
        if n == 1:
            return [0]
        q, s = divmod(r, n)
        inner = rec(n - 1, q)
        pos = (n - 1 - s) if q % 2 == 0 else s
        inner.insert(pos, n - 1)
        return inner

    return np.array(rec(m, rank % math.factorial(m)), dtype=np.intp)


def _heap_sequence(m: int) -> Iterator[np.ndarray]:
    """Heap's algorithm from the identity; one swap per step."""
    perm = list(range(m))
    c = [0] * m
    yield np.array(perm)
    i = 0
    while i < m:
        if c[i] < i:
            if i % 2 == 0:
                perm[0], perm[i] = perm[i], perm[0]
            else:
                perm[c[i]], perm[i] = perm[i], perm[c[i]]
            yield np.array(perm)
            c[i] += 1
            i = 0
        else:
            c[i] = 0
            i += 1


def _lex_successor(a: np.ndarray) -> np.ndarray:
    """Next permutation in lexicographic order, wrapping at the last."""
    a = a.copy()
    m = len(a)
    i = m - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return np.sort(a)  # wrap around to the first permutation
    j = m - 1
    while a[j] <= a[i]:
        j -= 1
    a[i], a[j] = a[j], a[i]
    a[i + 1:] = a[i + 1:][::-1]
    return a


def ordering_iterator(strategy: OrderingStrategy, m: int) -> Iterator[Permutation]:
    """Lazily yield permutations of {0..m-1} under the given strategy.

    Structured variants start from a seeded random permutation: SJT/Heap
    compose the classical identity-based sequences with the start (which
    preserves the one-transposition/one-swap deltas between consecutive
    outputs), Lehmer walks lexicographic successors of the start itself.
    """
    if m < 2:
        raise GroupError("orderings need M >= 2")
    rng = np.random.default_rng(np.random.SeedSequence([int(strategy.seed) & ((1 << 64) - 1), 0x0D]))
    if strategy.variant == OrderingVariant.RANDOM:
        def gen():
            while True:
                yield Permutation(rng.permutation(m))
        return gen()
    if strategy.variant == OrderingVariant.LEHMER:
        start = rng.permutation(m)
        def gen_lehmer():
            a = start.copy()
            while True:
                yield Permutation(a.copy())
                a = _lex_successor(a)
        return gen_lehmer()
    if strategy.variant == OrderingVariant.SJT:
        # random start realized as a random offset into the plain-changes
        # cycle, the SJT analog of Lehmer's successor walk from its start
        offset = int(rng.integers(0, math.factorial(m))) if m <= 20 else int(rng.integers(0, 1 << 62))
        def gen_sjt():
            r = offset
            period = math.factorial(m)
            while True:
                yield Permutation(sjt_unrank(m, r % period))
                r += 1
        return gen_sjt()
    start = rng.permutation(m)
    def gen_heap():
        while True:  # restart the base sequence after a full period
            for tau in _heap_sequence(m):
                yield Permutation(start[tau])
    return gen_heap()


def take_permutations(strategy: OrderingStrategy, m: int, n: int) -> list:
    """First n permutations of the ordering."""
    it = ordering_iterator(strategy, m)
    return [next(it) for _ in range(n)]
