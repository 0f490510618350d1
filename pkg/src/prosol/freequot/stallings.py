"""Stallings folding for finitely generated subgroups of free groups."""

from __future__ import annotations

from typing import Iterable

from ..words import Word


class SubgroupGraph:
    """Folded core graph of a subgroup, based at vertex 0.

    ``out[v]`` maps a letter (signed generator) to the target vertex; a
    positive edge v -g-> u is stored as ``out[v][g] = u`` and
    ``out[u][-g] = v``.
    """

    def __init__(self, gens: Iterable[Word]):
        self.gens = [g for g in gens]
        self.out: dict[int, dict[int, int]] = {0: {}}
        self._next = 1
        self._parent: dict[int, int] = {}
        self._edges: list[tuple[int, int, int]] = []
        for g in self.gens:
            self._add_loop(g)
        self._fold()
        self._trim()

    # -- construction ------------------------------------------------------

    def _new_vertex(self) -> int:
        v = self._next
        self._next += 1
        self.out[v] = {}
        return v

    def _add_loop(self, w: Word) -> None:
        if not w:
            return
        v = 0
        letters = w.letters
        for n, x in enumerate(letters):
            u = 0 if n == len(letters) - 1 else self._new_vertex()
            self._edges.append((v, x, u))
            v = u

    def _find(self, v: int) -> int:
        root = v
        while root in self._parent:
            root = self._parent[root]
        while v != root:
            nxt = self._parent[v]
            self._parent[v] = root
            v = nxt
        return root

    def _fold(self) -> None:
        # insert edges one at a time; a clash at a vertex identifies targets
        stack = self._edges[::-1]
        self._edges = []
        while stack:
            v, x, u = stack.pop()
            v, u = self._find(v), self._find(u)
            t = self.out[v].get(x)
            if t is not None:
                t = self._find(t)
                if t != u:
                    stack.extend(self._merge(t, u))
                continue
            t = self.out[u].get(-x)
            if t is not None:
                t = self._find(t)
                if t != v:
                    stack.extend(self._merge(t, v))
                continue
            self.out[v][x] = u
            self.out[u][-x] = v

    def _merge(self, a: int, b: int) -> list[tuple[int, int, int]]:
        """Identify vertices; returns the edges of the absorbed vertex to reinsert."""
        if b == 0:
            a, b = b, a
        # keep the base point as representative
        if a != 0 and len(self.out[a]) < len(self.out[b]):
            a, b = b, a
        moved = []
        for x, t in self.out.pop(b).items():
            back = self.out.get(t)
            if back is not None and back.get(-x) == b:
                del back[-x]
            if t == b:
                t = a
            moved.append((a, x, t) if x > 0 else (t, -x, a))
        self._parent[b] = a
        return moved

    def _trim(self) -> None:
        # repeatedly remove non-base vertices of degree <= 1
        changed = True
        while changed:
            changed = False
            for v in list(self.out):
                if v != 0 and len(self.out[v]) <= 1:
                    for x, t in self.out.pop(v).items():
                        self.out[t].pop(-x, None)
                    changed = True

    # -- queries -----------------------------------------------------------

    @property
    def vertices(self) -> list[int]:
        return sorted(self.out)

    def edges(self) -> list[tuple[int, int, int]]:
        """Positive edges as (source, generator index, target)."""
        return sorted((v, x - 1, u) for v, nb in self.out.items() for x, u in nb.items() if x > 0)

    def rank(self) -> int:
        return len(self.edges()) - len(self.out) + 1

    def contains(self, w: Word) -> bool:
        v = 0
        for x in w.letters:
            v = self.out[v].get(x)
            if v is None:
                return False
        return v == 0

    def is_folded(self) -> bool:
        # one target per (vertex, letter) is built into the map; check symmetry
        return all(self.out.get(u, {}).get(-x) == v for v, nb in self.out.items() for x, u in nb.items())


def subgroup_membership(gens: Iterable[Word], w: Word) -> bool:
    return SubgroupGraph(gens).contains(w)


def subgroup_rank(gens: Iterable[Word]) -> int:
    return SubgroupGraph(gens).rank()
