"""Permutation groups and matrix groups over Z/m."""

from __future__ import annotations

from collections import deque
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence, TypeVar

import numpy as np

from . import perm as P
from .perm import Perm
from .schreier_sims import StabChain

DEFAULT_ELEMENT_CAP = 2**24

T = TypeVar("T", bound=Hashable)


class CapExceeded(RuntimeError):
    pass


def enumerate_closure(gens: Sequence[T], identity: T, mul: Callable[[T, T], T], cap: int = DEFAULT_ELEMENT_CAP) -> set[T]:
    """Breadth-first closure of ``gens`` under right multiplication."""
    seen = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise CapExceeded(f"more than {cap} elements")
                queue.append(y)
    return seen


class PermGroup:
    """A permutation group on ``{0..degree-1}`` with a lazily built stabilizer chain."""

    def __init__(self, gens: Iterable[Sequence[int]], degree: int | None = None, name: str | None = None):
        gens = [tuple(g) for g in gens]
        if degree is None:
            degree = max((len(g) for g in gens), default=1)
        self.degree = degree
        for g in gens:
            P.check_perm(g)
        self.gens: list[Perm] = [P.extend(g, degree) for g in gens]
        self.name = name

    @classmethod
    def from_cycles(cls, cycles: Iterable[str], degree: int = 0, name: str | None = None) -> PermGroup:
        perms = [P.parse_cycles(c, degree) for c in cycles]
        n = max([degree] + [len(p) for p in perms] + [1])
        return cls(perms, n, name)

    @cached_property
    def chain(self) -> StabChain:
        return StabChain(self.degree, self.gens)

    def order(self) -> int:
        return self.chain.order()

    def __len__(self) -> int:
        return self.order()

    def identity(self) -> Perm:
        return P.identity(self.degree)

    def contains(self, g: Perm) -> bool:
        return self.chain.contains(tuple(g))

    __contains__ = contains

    def elements(self) -> list[Perm]:
        return list(self.chain.elements())

    def is_subgroup_of(self, other: PermGroup) -> bool:
        return all(other.contains(g) for g in self.gens)

    def equals(self, other: PermGroup) -> bool:
        return self.order() == other.order() and self.is_subgroup_of(other)

    def is_trivial(self) -> bool:
        return all(P.is_identity(g) for g in self.gens)

    def is_abelian(self) -> bool:
        return all(P.mul(a, b) == P.mul(b, a) for a in self.gens for b in self.gens)

    def is_normal_in(self, g: PermGroup) -> bool:
        return all(self.contains(P.conj(n, x)) for n in self.gens for x in g.gens)

    def subgroup(self, gens: Iterable[Perm], name: str | None = None) -> PermGroup:
        return PermGroup(list(gens), self.degree, name)

    def __repr__(self) -> str:
        label = self.name or "PermGroup"
        return f"<{label} degree {self.degree} with {len(self.gens)} generators>"


def normal_closure(g: PermGroup, seeds: Iterable[Perm]) -> PermGroup:
    """Smallest normal subgroup of ``g`` containing ``seeds``."""
    seeds = [tuple(s) for s in seeds]
    for s in seeds:
        if not g.contains(s):
            raise ValueError("seed does not lie in the group")
    chain = StabChain(g.degree)
    gens: list[Perm] = []
    queue = []
    for s in seeds:
        if chain.add(s):
            gens.append(s)
            queue.append(s)
    while queue:
        n = queue.pop()
        for x in g.gens:
            c = P.conj(n, x)
            if chain.add(c):
                gens.append(c)
                queue.append(c)
    out = PermGroup(gens, g.degree)
    out.__dict__["chain"] = chain
    return out


def commutator_subgroup(g: PermGroup, h: PermGroup | None = None) -> PermGroup:
    """``[g, h]`` for ``h`` normal in ``g`` (default ``h = g``)."""
    h = g if h is None else h
    seeds = {P.comm(a, b) for a in h.gens for b in g.gens}
    return normal_closure(g, sorted(s for s in seeds if not P.is_identity(s)))


def derived_subgroup(g: PermGroup) -> PermGroup:
    return commutator_subgroup(g, g)


def direct_product(*groups: PermGroup) -> PermGroup:
    """Intransitive direct product acting on the disjoint union of points."""
    n = sum(G.degree for G in groups)
    gens = []
    offset = 0
    for G in groups:
        for g in G.gens:
            p = list(range(n))
            for i, x in enumerate(g):
                p[offset + i] = offset + x
            gens.append(tuple(p))
        offset += G.degree
    return PermGroup(gens, n)


def symmetric_group(n: int) -> PermGroup:
    if n < 2:
        return PermGroup([], max(n, 1), f"Sym({n})")
    return PermGroup([P.from_cycles([[0, 1]], n), P.from_cycles([list(range(n))], n)], n, f"Sym({n})")


def alternating_group(n: int) -> PermGroup:
    if n < 3:
        return PermGroup([], max(n, 1), f"Alt({n})")
    return PermGroup([P.from_cycles([[i, i + 1, i + 2]], n) for i in range(n - 2)], n, f"Alt({n})")


def cyclic_group(n: int) -> PermGroup:
    return PermGroup([P.from_cycles([list(range(n))], n)] if n > 1 else [], max(n, 1), f"C{n}")


def dihedral_group(n: int) -> PermGroup:
    """Symmetries of an n-gon, order 2n."""
    rot = P.from_cycles([list(range(n))], n)
    refl = tuple((-i) % n for i in range(n))
    return PermGroup([rot, refl], n, f"D{2 * n}")


# --- matrices over Z/m ----------------------------------------------------

Mat = tuple[tuple[int, ...], ...]


def mat_mul(a: Mat, b: Mat, m: int) -> Mat:
    n = len(a)
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(a[i], col)) % m for col in cols) for i in range(n))


def mat_identity(d: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def mat_det(a: Sequence[Sequence[int]]) -> int:
    """Integer determinant by cofactor expansion (small d)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = 0
    for j in range(n):
        if a[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in a[1:]]
            total += (-1) ** j * a[0][j] * mat_det(minor)
    return total


def mat_inv(a: Mat, m: int) -> Mat:
    """Inverse over Z/m via the adjugate."""
    d = len(a)
    det = mat_det([list(r) for r in a]) % m
    dinv = pow(det, -1, m)
    adj = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            minor = [list(r[:j] + r[j + 1 :]) for k, r in enumerate(a) if k != i]
            adj[j][i] = (-1) ** (i + j) * (mat_det(minor) if minor else 1)
    return tuple(tuple(adj[i][j] * dinv % m for j in range(d)) for i in range(d))


def as_mat(rows: Sequence[Sequence[int]], m: int) -> Mat:
    return tuple(tuple(int(x) % m for x in r) for r in rows)


class MatrixGroup:
    """A group generated by invertible d x d matrices over Z/m."""

    def __init__(self, gens: Iterable[Sequence[Sequence[int]]], modulus: int, d: int | None = None,
                 name: str | None = None, cap: int = DEFAULT_ELEMENT_CAP):
        self.modulus = modulus
        self.gens: list[Mat] = [as_mat(g, modulus) for g in gens]
        self.d = d if d is not None else (len(self.gens[0]) if self.gens else 1)
        self.name = name
        self.cap = cap
        from math import gcd

        for g in self.gens:
            if len(g) != self.d or any(len(r) != self.d for r in g):
                raise ValueError("generator has the wrong shape")
            if gcd(mat_det([list(r) for r in g]), modulus) != 1:
                raise ValueError("generator is not invertible")

    def identity(self) -> Mat:
        return mat_identity(self.d)

    def mul(self, a: Mat, b: Mat) -> Mat:
        return mat_mul(a, b, self.modulus)

    @cached_property
    def _elements(self) -> frozenset:
        if self.modulus ** (self.d * self.d) < 2**62:
            return frozenset(self._closure_numpy())
        return frozenset(enumerate_closure(self.gens, self.identity(), self.mul, self.cap))

    def _closure_numpy(self) -> set[Mat]:
        # batched breadth-first closure; matrices keyed by their base-m digits
        d, m = self.d, self.modulus
        weights = np.array([m**i for i in range(d * d)], dtype=np.int64)
        gens = [np.array(g, dtype=np.int64) for g in self.gens]
        frontier = np.eye(d, dtype=np.int64)[None]
        seen = {int(frontier[0].ravel() @ weights)}
        found = [frontier]
        total = 1
        while len(frontier):
            cand = np.concatenate([(frontier @ g) % m for g in gens]) if gens else frontier[:0]
            keys = cand.reshape(len(cand), -1) @ weights
            keys, first = np.unique(keys, return_index=True)
            new = np.fromiter((k not in seen for k in keys.tolist()), dtype=bool, count=len(keys))
            seen.update(keys[new].tolist())
            frontier = cand[first[new]]
            total += len(frontier)
            if total > self.cap:
                raise CapExceeded(f"more than {self.cap} elements")
            found.append(frontier)
        allm = np.concatenate(found)
        return {tuple(tuple(int(x) for x in row) for row in mat) for mat in allm}

    def elements(self) -> frozenset:
        return self._elements

    def order(self) -> int:
        return len(self._elements)

    def contains(self, x: Sequence[Sequence[int]]) -> bool:
        return as_mat(x, self.modulus) in self._elements

    @cached_property
    def _points(self) -> list[tuple[int, ...]]:
        # orbit of the standard basis row vectors under v -> v g; faithful
        pts = []
        seen = set()
        for i in range(self.d):
            e = tuple(int(i == j) for j in range(self.d))
            if e in seen:
                continue
            seen.add(e)
            queue = [e]
            for v in queue:
                pts.append(v)
                for g in self.gens:
                    w = self._act(v, g)
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
        return pts

    def _act(self, v: tuple[int, ...], g: Mat) -> tuple[int, ...]:
        m = self.modulus
        return tuple(sum(v[i] * g[i][j] for i in range(self.d)) % m for j in range(self.d))

    def to_perm(self, g: Mat) -> Perm:
        index = {v: i for i, v in enumerate(self._points)}
        return tuple(index[self._act(v, g)] for v in self._points)

    def as_perm_group(self) -> PermGroup:
        pts = self._points
        index = {v: i for i, v in enumerate(pts)}
        gens = [tuple(index[self._act(v, g)] for v in pts) for g in self.gens]
        return PermGroup(gens, len(pts), self.name)

    def __repr__(self) -> str:
        return f"<{self.name or 'MatrixGroup'} {self.d}x{self.d} over Z/{self.modulus}>"


FiniteGroup = PermGroup | MatrixGroup


def as_perm_group(g) -> PermGroup:
    if isinstance(g, PermGroup):
        return g
    if isinstance(g, MatrixGroup):
        return g.as_perm_group()
    raise TypeError(f"not a finite group: {g!r}")


def order(g) -> int:
    return g.order()
