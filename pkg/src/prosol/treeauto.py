"""Automorphisms of the rooted binary tree given by wreath recursion.

A level-n vertex x_1 x_2 ... x_n (x_1 nearest the root) is numbered
``x_1 * 2^(n-1) + ... + x_n``.  Restricting to level n-1 therefore maps
vertex v to ``v >> 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import yaml

from .finite import PermGroup, derived_series, lower_central_series
from .finite import perm as P
from .finite.perm import Perm

DEFAULT_MAX_LEVEL = 7


@dataclass(frozen=True)
class State:
    swap: bool
    children: tuple[str, str]


@dataclass(frozen=True)
class AutomatonSystem:
    """Finite automaton: each state is a root permutation plus two child states."""

    states: Mapping[str, State]
    generators: tuple[str, ...]
    name: str = ""
    max_level: int = DEFAULT_MAX_LEVEL
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for s, st in self.states.items():
            for c in st.children:
                if c not in self.states:
                    raise ValueError(f"state {s!r} refers to unknown state {c!r}")
        for g in self.generators:
            if g not in self.states:
                raise ValueError(f"unknown generator state {g!r}")

    def restriction(self, state: str, n: int) -> Perm:
        if n < 1 or n > self.max_level:
            raise ValueError(f"level {n} outside 1..{self.max_level}")
        return _restrict(self, state, n)

    def __hash__(self):
        return id(self)


@lru_cache(maxsize=None)
def _restrict(sys: AutomatonSystem, state: str, n: int) -> Perm:
    st = sys.states[state]
    if n == 0:
        return (0,)
    half = 2 ** (n - 1)
    kids = [_restrict(sys, c, n - 1) for c in st.children]
    out = [0] * (2 * half)
    for x in (0, 1):
        y = 1 - x if st.swap else x
        sub = kids[x]
        for r in range(half):
            out[x * half + r] = y * half + sub[r]
    return tuple(out)


def level_restriction(sys: AutomatonSystem, state: str | Sequence[str], n: int) -> Perm:
    """Permutation of the level-n vertices induced by a state or a product of states."""
    if isinstance(state, str):
        return sys.restriction(state, n)
    out = P.identity(2**n)
    for s in state:
        out = P.mul(out, sys.restriction(s, n))
    return out


def project(p: Perm) -> Perm:
    """Induced action one level up (vertex v -> v >> 1)."""
    half = len(p) // 2
    return tuple(p[2 * v] >> 1 for v in range(half))


def grigorchuk_group(swap_children: bool = False) -> AutomatonSystem:
    """First Grigorchuk group: a = root swap, b = (a, c), c = (a, d), d = (1, b).

    ``swap_children`` uses the mirrored convention b = (c, a), etc.
    """

    def kids(l, r):
        return (r, l) if swap_children else (l, r)

    states = {
        "e": State(False, ("e", "e")),
        "a": State(True, ("e", "e")),
        "b": State(False, kids("a", "c")),
        "c": State(False, kids("a", "d")),
        "d": State(False, kids("e", "b")),
    }
    return AutomatonSystem(states, ("a", "b", "c", "d"), "grigorchuk")


def basilica_group() -> AutomatonSystem:
    """Basilica group: a = (b, 1) with root swap, b = (a, 1)."""
    states = {
        "e": State(False, ("e", "e")),
        "a": State(True, ("b", "e")),
        "b": State(False, ("a", "e")),
    }
    return AutomatonSystem(states, ("a", "b"), "basilica", flags=("draft-notes",))


def load_automaton(text: str, max_level: int = DEFAULT_MAX_LEVEL) -> AutomatonSystem:
    """Parse the YAML automaton format.

    ::

        name: grigorchuk
        generators: [a, b, c, d]
        states:
          e: {perm: "()", children: [e, e]}
          a: {perm: "(0 1)", children: [e, e]}
    """
    data = yaml.safe_load(text)
    states = {}
    for name, spec in data["states"].items():
        perm = str(spec.get("perm", "()")).strip()
        if perm not in ("()", "(0 1)", "(1 0)", "(0,1)"):
            raise ValueError(f"state {name!r}: root permutation must be () or (0 1)")
        children = tuple(str(c) for c in spec["children"])
        if len(children) != 2:
            raise ValueError(f"state {name!r}: need exactly two children")
        states[str(name)] = State(perm != "()", children)
    gens = tuple(str(g) for g in data.get("generators", [s for s in states if s not in ("e", "1")]))
    return AutomatonSystem(states, gens, str(data.get("name", "")), max_level, tuple(data.get("flags", ())))


def level_quotient_group(sys: AutomatonSystem, n: int) -> PermGroup:
    gens = [sys.restriction(g, n) for g in sys.generators]
    return PermGroup(gens, 2**n, f"{sys.name or 'G'}/St({n})")


@dataclass
class LevelQuotient:
    level: int
    group: PermGroup
    images: dict[str, Perm]


@dataclass
class TwoGroupTowerReport:
    levels: list[int]
    orders: list[int]
    nilpotency_classes: list[int | None]
    derived_lengths: list[int | None]
    powers_of_two: bool
    all_nilpotent: bool
    restrictions_compatible: bool
    restrictions_onto: bool
    derived_lengths_monotone: bool

    @property
    def ok(self) -> bool:
        return (
            self.powers_of_two
            and self.all_nilpotent
            and self.restrictions_compatible
            and self.restrictions_onto
            and self.derived_lengths_monotone
        )

    def to_json(self) -> dict:
        return {
            "level_orders": self.orders,
            "nilpotency_classes": self.nilpotency_classes,
            "derived_lengths": self.derived_lengths,
            "powers_of_two": self.powers_of_two,
            "all_nilpotent": self.all_nilpotent,
            "restrictions_compatible": self.restrictions_compatible,
            "restrictions_onto": self.restrictions_onto,
            "derived_lengths_monotone": self.derived_lengths_monotone,
        }


def verify_two_group_tower(sys: AutomatonSystem, max_n: int) -> TwoGroupTowerReport:
    orders, classes, dlens = [], [], []
    compatible = True
    onto = True
    prev = None
    for n in range(1, max_n + 1):
        G = level_quotient_group(sys, n)
        orders.append(G.order())
        classes.append(lower_central_series(G).length)
        dlens.append(derived_series(G).length)
        if prev is not None:
            projected = [project(g) for g in G.gens]
            compatible &= projected == prev.gens
            # the projection is a homomorphism; generators map to generators, so
            # the image is the whole previous level
            onto &= PermGroup(projected, prev.degree).order() == prev.order()
        prev = G
    pow2 = all(o & (o - 1) == 0 for o in orders)
    known = [d for d in dlens if d is not None]
    return TwoGroupTowerReport(
        list(range(1, max_n + 1)),
        orders,
        classes,
        dlens,
        pow2,
        all(c is not None for c in classes),
        compatible,
        onto,
        all(a <= b for a, b in zip(known, known[1:])),
    )
