"""Truncated Magnus expansion of free-group words.

``x_i -> 1 + X_i`` embeds F_k in the units of Z<<X_1..X_k>>; a word lies in
the j-th lower central term iff its image is 1 modulo terms of degree >= j.
That identification is classical (Magnus) and is trusted here, not derived.

Degree-d coefficients live in a dense array of length k^d indexed by the
base-k digit string of the monomial (first symbol most significant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..words import Word, commutator

_INT64_SAFE = 2**62


def _zeros(k: int, c: int, dtype) -> list[np.ndarray]:
    return [np.zeros(k**d, dtype=dtype) for d in range(c + 1)]


class TruncatedSeries:
    """Noncommutative integer power series truncated above degree ``c``."""

    __slots__ = ("k", "c", "layers")

    def __init__(self, k: int, c: int, layers: list[np.ndarray]):
        if c < 1:
            raise ValueError("cutoff must be >= 1")
        if len(layers) != c + 1:
            raise ValueError("need one layer per degree 0..c")
        self.k = k
        self.c = c
        self.layers = layers

    @classmethod
    def one(cls, k: int, c: int) -> TruncatedSeries:
        layers = _zeros(k, c, np.int64)
        layers[0][0] = 1
        return cls(k, c, layers)

    def coefficient(self, monomial: Sequence[int]) -> int:
        d = len(monomial)
        if d > self.c:
            raise ValueError("monomial above the cutoff")
        idx = 0
        for s in monomial:
            idx = idx * self.k + s
        return int(self.layers[d][idx])

    def terms(self) -> dict[tuple[int, ...], int]:
        out = {}
        for d, layer in enumerate(self.layers):
            for idx in np.flatnonzero(layer):
                mono = []
                r = int(idx)
                for _ in range(d):
                    r, s = divmod(r, self.k)
                    mono.append(s)
                out[tuple(reversed(mono))] = int(layer[idx])
        return out

    def is_one(self) -> bool:
        return self.layers[0][0] == 1 and all(not layer.any() for layer in self.layers[1:])

    def lowest_degree(self) -> int | None:
        """Least positive degree carrying a nonzero coefficient."""
        for d in range(1, self.c + 1):
            if self.layers[d].any():
                return d
        return None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruncatedSeries)
            and (self.k, self.c) == (other.k, other.c)
            and all(np.array_equal(a, b) for a, b in zip(self.layers, other.layers))
        )

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        if (self.k, self.c) != (other.k, other.c):
            raise ValueError("series over different contexts")
        bound = _l1(self) * _l1(other)
        dtype = np.int64 if bound < _INT64_SAFE else object
        out = _zeros(self.k, self.c, dtype)
        for i, a in enumerate(self.layers):
            a = a.astype(dtype)
            for j in range(self.c - i + 1):
                b = other.layers[j]
                if a.any() and b.any():
                    out[i + j] += np.outer(a, b.astype(dtype)).ravel()
        return TruncatedSeries(self.k, self.c, out)

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [chr(ord("X") + i) if i < 3 else f"X{i}" for i in range(self.k)]
        parts = []
        for mono, coef in sorted(self.terms().items(), key=lambda t: (len(t[0]), t[0])):
            m = "".join(names[s] for s in mono)
            if not m:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(m)
            elif coef == -1:
                parts.append(f"-{m}")
            else:
                parts.append(f"{coef}{m}")
        s = " + ".join(parts) if parts else "0"
        return s.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.format()}, c={self.c})"


def _l1(s: TruncatedSeries) -> int:
    return sum(int(np.abs(layer).sum()) for layer in s.layers)


def magnus_image(w: Word, c: int, k: int | None = None) -> TruncatedSeries:
    """Magnus image of ``w`` truncated above degree ``c``."""
    if k is None:
        k = max(1, w.max_generator() + 1)
    if w.max_generator() >= k:
        raise ValueError("word outside the alphabet")
    if c < 1:
        raise ValueError("cutoff must be >= 1")
    # each letter's series has |coefficient| <= 1 in every degree, so the
    # degree-d l1 norm of an L-letter product is at most C(L+d-1, d)
    bound = math.comb(len(w) + c, c)
    dtype = np.int64 if bound < _INT64_SAFE else object
    layers = _zeros(k, c, dtype)
    layers[0][0] = 1
    for x in w.letters:
        i = abs(x) - 1
        if x > 0:
            for d in range(c, 0, -1):
                layers[d].reshape(-1, k)[:, i] += layers[d - 1]
        else:
            for d in range(1, c + 1):
                layers[d].reshape(-1, k)[:, i] -= layers[d - 1]
    return TruncatedSeries(k, c, layers)


@dataclass(frozen=True)
class LCSDepth:
    """Certified lower-central depth.

    ``exact`` depth j means w is in C^j but not C^(j+1).  Otherwise ``lower``
    is a lower bound (c+1 from a cutoff-c computation), or infinity for the
    trivial word.
    """

    lower: float
    exact: bool

    def __str__(self) -> str:
        if self.exact:
            return str(int(self.lower))
        if math.isinf(self.lower):
            return "infinite"
        return f">={int(self.lower)}"

    def to_json(self):
        if self.exact:
            return int(self.lower)
        return str(self)


def lcs_depth(w: Word, c: int, k: int | None = None) -> LCSDepth:
    if not w:
        return LCSDepth(math.inf, False)
    d = magnus_image(w, c, k).lowest_degree()
    if d is None:
        return LCSDepth(c + 1, False)
    return LCSDepth(d, True)


# --- basic commutators and layer ranks --------------------------------------

@dataclass(frozen=True)
class BasicCommutator:
    weight: int
    word: Word
    left: int | None = None  # indices into the generated list
    right: int | None = None


def basic_commutators(k: int, c: int) -> list[BasicCommutator]:
    """Hall basic commutators of weight <= c, ordered by weight."""
    out = [BasicCommutator(1, Word.gen(i)) for i in range(k)]
    by_weight = {1: list(range(k))}
    for n in range(2, c + 1):
        by_weight[n] = []
        for wi in range(n - 1, 0, -1):
            wj = n - wi
            for i in by_weight[wi]:
                ci = out[i]
                for j in by_weight[wj]:
                    if not i > j:
                        continue
                    if ci.right is not None and j < ci.right:
                        continue
                    out.append(BasicCommutator(n, commutator(ci.word, out[j].word), i, j))
                    by_weight[n].append(len(out) - 1)
        # keep the within-weight order equal to creation order
        by_weight[n].sort()
    return out


def integer_rank(rows: list[list[int]]) -> int:
    """Rank over Q by fraction-free elimination."""
    rows = [r[:] for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col]
            if f:
                row = rows[r]
                g = math.gcd(p[col], f)
                a, b = p[col] // g, f // g
                new = [a * row[t] - b * p[t] for t in range(ncols)]
                g2 = math.gcd(*new) if any(new) else 1
                rows[r] = [x // g2 for x in new] if g2 > 1 else new
        rank += 1
        if rank == len(rows):
            break
    return rank


def lcs_layer_ranks(k: int, c: int, max_class: int = 8, memory_budget: int = 5 * 10**7) -> list[int]:
    """Ranks of C^j(F_k)/C^(j+1)(F_k), j = 1..c, from basic-commutator leading terms."""
    if c > max_class:
        raise ValueError(f"class {c} exceeds the configured bound {max_class}")
    basics = basic_commutators(k, c)
    ranks = []
    for j in range(1, c + 1):
        group = [b for b in basics if b.weight == j]
        if len(group) * k**j > memory_budget:
            raise MemoryError(f"layer {j} for rank {k} exceeds the memory budget")
        vectors = [[int(x) for x in magnus_image(b.word, j, k).layers[j]] for b in group]
        ranks.append(integer_rank(vectors))
    return ranks


def necklace_count(k: int, j: int) -> int:
    """``(1/j) * sum_{d | j} mu(d) k^(j/d)``."""
    total = 0
    for d in range(1, j + 1):
        if j % d == 0:
            total += _mobius(d) * k ** (j // d)
    return total // j


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def nilpotent_surjectivity(gens: Iterable[Word], k: int, c: int = 1) -> bool:
    """Whether ``gens`` map onto F_k / C^j for every j.

    It suffices that their images generate the abelianization Z^k.
    """
    from ..words import exponent_sums
    from ..zlattice import abelian_invariants

    if c < 1:
        raise ValueError("class must be >= 1")
    rows = [exponent_sums(g, k) for g in gens]
    return abelian_invariants(rows, k).is_trivial
