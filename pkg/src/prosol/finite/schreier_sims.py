"""Deterministic incremental Schreier-Sims.

The chain is extended one generator at a time: a new generator is sifted, its
residue is added at every level it fixes, and Schreier generators are
re-checked from that level downward.  Levels below the insertion point are
already complete and are never revisited.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .perm import Perm, identity, inv, is_identity, mul


class _Level:
    __slots__ = ("point", "gens", "trans")

    def __init__(self, point: int):
        self.point = point
        self.gens: list[Perm] = []
        # point -> (u, u^-1) with self.point^u == point
        self.trans: dict[int, tuple[Perm, Perm]] = {}

    def rebuild(self, n: int) -> None:
        e = identity(n)
        trans = {self.point: (e, e)}
        queue = [self.point]
        for beta in queue:
            u = trans[beta][0]
            for s in self.gens:
                gamma = s[beta]
                if gamma not in trans:
                    v = mul(u, s)
                    trans[gamma] = (v, inv(v))
                    queue.append(gamma)
        self.trans = trans


class StabChain:
    """Base and strong generating set for a permutation group of degree ``n``."""

    def __init__(self, n: int, gens: Iterable[Perm] = (), base: Iterable[int] = ()):
        self.n = n
        self.levels: list[_Level] = [_Level(b) for b in base]
        for lv in self.levels:
            lv.rebuild(n)
        for g in gens:
            self.add(g)

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self.levels]

    @property
    def strong_generators(self) -> list[Perm]:
        seen, out = set(), []
        for lv in self.levels:
            for g in lv.gens:
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        return out

    def order(self) -> int:
        out = 1
        for lv in self.levels:
            out *= len(lv.trans)
        return out

    def sift(self, h: Perm, start: int = 0) -> tuple[Perm, int]:
        """Strip ``h`` from level ``start`` on; returns (residue, level reached)."""
        levels = self.levels
        for j in range(start, len(levels)):
            lv = levels[j]
            t = lv.trans.get(h[lv.point])
            if t is None:
                return h, j
            h = mul(h, t[1])
        return h, len(levels)

    def contains(self, h: Perm) -> bool:
        if len(h) != self.n:
            return False
        r, j = self.sift(h)
        return j == len(self.levels) and is_identity(r)

    def _insert(self, r: Perm, start: int, j: int) -> int:
        """Add residue ``r`` to levels start..j, opening a new level if needed."""
        if j == len(self.levels):
            point = next(i for i, x in enumerate(r) if i != x)
            self.levels.append(_Level(point))
        for lv in self.levels[start : j + 1]:
            lv.gens.append(r)
            lv.rebuild(self.n)
        return j

    def add(self, g: Perm) -> bool:
        """Extend the group by ``g``; returns whether the group grew."""
        if len(g) != self.n:
            raise ValueError("degree mismatch")
        r, j = self.sift(g)
        if j == len(self.levels) and is_identity(r):
            return False
        i = self._insert(r, 0, j)
        self._complete(i)
        return True

    def _complete(self, i: int) -> None:
        levels = self.levels
        while i >= 0:
            lv = levels[i]
            found = None
            for beta, (u, _) in list(lv.trans.items()):
                for s in lv.gens:
                    gamma = s[beta]
                    us = mul(u, s)
                    t = lv.trans[gamma]
                    if us == t[0]:
                        continue
                    h = mul(us, t[1])
                    r, j = self.sift(h, i + 1)
                    if j < len(levels) or not is_identity(r):
                        found = (r, j)
                        break
                if found:
                    break
            if found:
                i = self._insert(found[0], i + 1, found[1])
            else:
                i -= 1

    def elements(self) -> Iterator[Perm]:
        """All group elements as products u_(k-1) ... u_1 u_0 of transversal elements."""

        def rec(level: int, acc: Perm):
            if level < 0:
                yield acc
                return
            for u, _ in self.levels[level].trans.values():
                yield from rec(level - 1, mul(acc, u))

        yield from rec(len(self.levels) - 1, identity(self.n))

    def coset_canonical(self, x: Perm) -> Perm:
        """Canonical element of the right coset ``H x`` (H = this group).

        Minimizes the images of the base points lexicographically.
        """
        for lv in self.levels:
            best = min(lv.trans, key=x.__getitem__)
            x = mul(lv.trans[best][0], x)
        return x
