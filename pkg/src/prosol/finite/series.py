"""Derived and lower central series, soluble residual, and finite completions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from . import perm as P
from .groups import (
    CapExceeded,
    PermGroup,
    as_perm_group,
    commutator_subgroup,
    derived_subgroup,
    enumerate_closure,
)

DEFAULT_LATTICE_CAP = 2000


@dataclass
class NormalSeries:
    groups: list[PermGroup]
    kind: Literal["derived", "lower-central"]
    stabilized: bool = True

    @property
    def orders(self) -> list[int]:
        return [g.order() for g in self.groups]

    @property
    def terminal(self) -> PermGroup:
        return self.groups[-1]

    @property
    def reaches_trivial(self) -> bool:
        return self.terminal.order() == 1

    @property
    def length(self) -> int | None:
        """Derived length or nilpotency class; None if the series stalls above 1."""
        if not self.reaches_trivial:
            return None
        return len(self.groups) - 1


def _series(g, step, kind, max_terms: int | None) -> NormalSeries:
    g = as_perm_group(g)
    groups = [g]
    while True:
        nxt = step(g, groups[-1])
        if nxt.order() == groups[-1].order():
            return NormalSeries(groups, kind, True)
        groups.append(nxt)
        if nxt.order() == 1:
            return NormalSeries(groups, kind, True)
        if max_terms is not None and len(groups) > max_terms:
            return NormalSeries(groups, kind, False)


def derived_series(g, max_terms: int | None = None) -> NormalSeries:
    """D^0 = g, D^(n+1) = [D^n, D^n], listed until the order stops dropping."""
    return _series(g, lambda G, H: derived_subgroup(H), "derived", max_terms)


def lower_central_series(g, max_terms: int | None = None) -> NormalSeries:
    """C^1 = g, C^(j+1) = [g, C^j], listed until the order stops dropping."""
    return _series(g, lambda G, H: commutator_subgroup(G, H), "lower-central", max_terms)


def is_soluble(g) -> bool:
    return derived_series(g).reaches_trivial


def is_nilpotent(g) -> bool:
    return lower_central_series(g).reaches_trivial


def soluble_residual(g) -> PermGroup:
    return derived_series(g).terminal


def perfect_core(g, cap: int = DEFAULT_LATTICE_CAP, cross_check: bool = False) -> PermGroup:
    """Largest perfect subgroup.

    For finite groups it coincides with the soluble residual: a perfect H
    satisfies H = D^n(H) <= D^n(g) for every n.  ``cross_check`` compares
    against the subgroup-lattice oracle and needs ``order(g) <= cap``.
    """
    g = as_perm_group(g)
    residual = soluble_residual(g)
    if cross_check:
        oracle = perfect_core_by_lattice(g, cap)
        if oracle != frozenset(residual.elements()):
            raise AssertionError("perfect core disagrees with the subgroup-lattice oracle")
    return residual


def perfect_core_by_lattice(g, cap: int = DEFAULT_LATTICE_CAP) -> frozenset:
    """Join of all perfect subgroups, found by enumerating the subgroup lattice.

    Every subgroup is a join of cyclic subgroups of prime-power order, so the
    lattice is grown by joining those onto known subgroups.  Subgroups are
    bitmasks over the indexed elements and products come from a table.
    """
    g = as_perm_group(g)
    if g.order() > cap:
        raise CapExceeded(f"group order {g.order()} exceeds the lattice cap {cap}")
    elements = sorted(g.elements())
    index = {x: i for i, x in enumerate(elements)}
    table = [[index[P.mul(x, y)] for y in elements] for x in elements]
    e = index[g.identity()]
    inv = [row.index(e) for row in table]

    def grow(mask, members, gens):
        members = list(members)
        for x in members:
            row = table[x]
            for s in gens:
                y = row[s]
                if not mask >> y & 1:
                    mask |= 1 << y
                    members.append(y)
        return mask, members

    def cyclic(x):
        out = [e]
        y = x
        while y != e:
            out.append(y)
            y = table[y][x]
        return out

    # one generator per cyclic subgroup of prime-power order
    prime_power = {}
    for x in range(len(elements)):
        c = cyclic(x)
        k = len(c)
        if k > 1 and len({q for q in range(2, k + 1) if k % q == 0 and all(q % r for r in range(2, q))}) == 1:
            prime_power.setdefault(sum(1 << y for y in c), x)
    cyc_gens = list(prime_power.values())

    trivial = 1 << e
    subgroups = {trivial: ([], [e])}
    frontier = [trivial]
    while frontier:
        new = []
        for h in frontier:
            hgens, members = subgroups[h]
            for x in cyc_gens:
                if h >> x & 1:
                    continue
                gens = hgens + [x]
                j, jm = grow(h, members, gens)
                if j not in subgroups:
                    subgroups[j] = (gens, jm)
                    new.append(j)
        frontier = new
    core, core_members = trivial, [e]
    for h, (hgens, members) in subgroups.items():
        comms = {table[table[inv[a]][inv[b]]][table[a][b]] for a in members for b in hgens}
        if grow(trivial, [e], list(comms))[0] == h:
            core, core_members = grow(core, core_members, hgens)
    return frozenset(elements[i] for i in core_members)


def quotient_action(g, n: PermGroup, cap: int = 2**20) -> PermGroup:
    """``g/n`` for ``n`` normal in ``g``, acting regularly on the right cosets of ``n``."""
    g = as_perm_group(g)
    chain = n.chain
    start = chain.coset_canonical(g.identity())
    index = {start: 0}
    reps = [start]
    images: list[list[int]] = [[] for _ in g.gens]
    for rep in reps:
        for k, x in enumerate(g.gens):
            c = chain.coset_canonical(P.mul(rep, x))
            if c not in index:
                if len(reps) >= cap:
                    raise CapExceeded(f"quotient has more than {cap} cosets")
                index[c] = len(reps)
                reps.append(c)
            images[k].append(index[c])
    return PermGroup([tuple(im) for im in images], len(reps))


def prosoluble_completion_finite(g) -> PermGroup:
    """``g / D^infinity(g)``: the soluble quotient through which every soluble quotient factors."""
    g = as_perm_group(g)
    r = soluble_residual(g)
    if r.order() == 1:
        return g
    return quotient_action(g, r)


def derived_quotient_consistency(g) -> bool:
    """``|g / D^n(g)| == |q / D^n(q)|`` for q the prosoluble completion, all n."""
    g = as_perm_group(g)
    q = prosoluble_completion_finite(g)
    sg, sq = derived_series(g), derived_series(q)
    n_max = max(len(sg.groups), len(sq.groups))
    og, oq = g.order(), q.order()
    for n in range(n_max):
        dg = sg.groups[min(n, len(sg.groups) - 1)].order()
        dq = sq.groups[min(n, len(sq.groups) - 1)].order()
        if og // dg != oq // dq:
            return False
    return True


def wreath_product(s, t, cap: int = 2**60) -> PermGroup:
    """``s wr t``, imprimitive on (degree of s) * (degree of t) points.

    Point ``b * n + i`` is point ``i`` of block ``b``.
    """
    s, t = as_perm_group(s), as_perm_group(t)
    n, m = s.degree, t.degree
    size = s.order() ** m * t.order()
    if size > cap:
        raise CapExceeded(f"wreath product order {size} exceeds cap {cap}")
    gens = []
    # one copy of the base generators per orbit of the top group
    seen = set()
    for b in range(m):
        if b in seen:
            continue
        orbit = {b}
        queue = [b]
        for x in queue:
            for h in t.gens:
                if h[x] not in orbit:
                    orbit.add(h[x])
                    queue.append(h[x])
        seen |= orbit
        for g in s.gens:
            p = list(range(n * m))
            for i in range(n):
                p[b * n + i] = b * n + g[i]
            gens.append(tuple(p))
    for h in t.gens:
        gens.append(tuple(h[b] * n + i for b in range(m) for i in range(n)))
    out = PermGroup(gens, n * m)
    return out
