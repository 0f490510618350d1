"""Permutations as tuples of images, composed left to right.

``mul(p, q)`` applies ``p`` first: ``mul(p, q)[i] == q[p[i]]``.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def mul(p: Perm, q: Perm) -> Perm:
    return tuple(map(q.__getitem__, p))


def inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def power(p: Perm, n: int) -> Perm:
    if n < 0:
        p, n = inv(p), -n
    out = identity(len(p))
    while n:
        if n & 1:
            out = mul(out, p)
        p = mul(p, p)
        n >>= 1
    return out


def conj(p: Perm, g: Perm) -> Perm:
    """``g^-1 p g``."""
    return mul(mul(inv(g), p), g)


def comm(p: Perm, q: Perm) -> Perm:
    """``p^-1 q^-1 p q``."""
    return mul(mul(inv(p), inv(q)), mul(p, q))


def check_perm(p: Sequence[int]) -> None:
    if sorted(p) != list(range(len(p))):
        raise ValueError("not a permutation")


def extend(p: Perm, n: int) -> Perm:
    if len(p) > n:
        raise ValueError("permutation larger than the requested degree")
    return tuple(p) + tuple(range(len(p), n))


def from_cycles(cycles: Iterable[Sequence[int]], n: int) -> Perm:
    out = list(range(n))
    for cyc in cycles:
        if len(set(cyc)) != len(cyc):
            raise ValueError("repeated point in cycle")
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            out[a] = b
    return tuple(out)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int = 0) -> Perm:
    """Parse cycle notation such as ``"(0 1 2)(3 4)"``; ``"()"`` is the identity.

    Cycles compose left to right.
    """
    s = text.strip()
    if _CYCLE_RE.sub("", s).strip():
        raise ValueError(f"could not parse permutation {text!r}")
    cycles = []
    for m in _CYCLE_RE.finditer(s):
        body = m.group(1).replace(",", " ").split()
        if body:
            cycles.append([int(x) for x in body])
    n = max([n] + [max(c) + 1 for c in cycles])
    out = identity(n)
    for c in cycles:
        out = mul(out, from_cycles([c], n))
    return out


def format_cycles(p: Perm) -> str:
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def order_of(p: Perm) -> int:
    from math import lcm

    seen = set()
    out = 1
    for i in range(len(p)):
        if i in seen:
            continue
        n = 0
        j = i
        while j not in seen:
            seen.add(j)
            j = p[j]
            n += 1
        out = lcm(out, n)
    return out
