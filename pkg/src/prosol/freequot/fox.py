"""Fox derivatives abelianized: the Magnus embedding of F/D^2(F).

A word is trivial in the free metabelian group iff its exponent vector and
all abelianized Fox derivatives vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..words import Word

Monomial = tuple[int, ...]


class Laurent:
    """Laurent polynomial over Z in k commuting variables."""

    __slots__ = ("k", "terms")

    def __init__(self, k: int, terms: dict[Monomial, int] | None = None):
        self.k = k
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def monomial(cls, exps: Sequence[int], coef: int = 1) -> Laurent:
        return cls(len(exps), {tuple(exps): coef})

    def __add__(self, other: Laurent) -> Laurent:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Laurent(self.k, out)

    def __neg__(self) -> Laurent:
        return Laurent(self.k, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Laurent) -> Laurent:
        return self + (-other)

    def __mul__(self, other: Laurent) -> Laurent:
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Laurent(self.k, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Laurent) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"t{i}" for i in range(self.k)]
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda t: (sum(map(abs, t[0])), t[0])):
            var = "".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e)
            if not var:
                parts.append(str(c))
            else:
                parts.append(var if c == 1 else f"-{var}" if c == -1 else f"{c}{var}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Laurent({self.format()})"


@dataclass(frozen=True)
class MetabelianImage:
    exponents: tuple[int, ...]
    fox: tuple[Laurent, ...]

    @property
    def k(self) -> int:
        return len(self.exponents)

    def is_trivial(self) -> bool:
        return not any(self.exponents) and not any(self.fox)

    def fundamental_identity_holds(self) -> bool:
        """``sum_i d_i(w) (t_i - 1) == t^exponents - 1``."""
        k = self.k
        lhs = Laurent(k)
        one = Laurent.monomial((0,) * k)
        for i, f in enumerate(self.fox):
            e = [0] * k
            e[i] = 1
            lhs = lhs + f * (Laurent.monomial(e) - one)
        return lhs == Laurent.monomial(self.exponents) - one


def metabelian_image(w: Word, k: int | None = None) -> MetabelianImage:
    if k is None:
        k = max(1, w.max_generator() + 1)
    if w.max_generator() >= k:
        raise ValueError("word outside the alphabet")
    prefix = [0] * k
    fox: list[dict[Monomial, int]] = [dict() for _ in range(k)]
    for x in w.letters:
        i = abs(x) - 1
        if x > 0:
            # d(u x_i) = d(u) + u * d(x_i), with d_i(x_i) = 1
            m = tuple(prefix)
            fox[i][m] = fox[i].get(m, 0) + 1
            prefix[i] += 1
        else:
            # d_i(x_i^-1) = -x_i^-1
            prefix[i] -= 1
            m = tuple(prefix)
            fox[i][m] = fox[i].get(m, 0) - 1
    return MetabelianImage(tuple(prefix), tuple(Laurent(k, f) for f in fox))
