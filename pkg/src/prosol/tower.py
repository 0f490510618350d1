"""Finite truncations of pro-N completions.

A ``QuotientTower`` models a nested chain N_1 > N_2 > ... of normal subgroups
of a finitely generated group through its quotient stages Q_i = G/N_i,
the images of the group's generators in each stage, and the connecting
surjections Q_(i+1) -> Q_i.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .finite import MatrixGroup, PermGroup, StabChain
from .finite import perm as P
from .finite.groups import Mat, mat_identity, mat_inv, mat_mul
from .words import Word, parse_word
from .zlattice import AbelianInvariants, left_kernel, solve_left


class TowerError(ValueError):
    pass


# --- stages ---------------------------------------------------------------

class Stage:
    """A group with explicit elements: identity, product, inverse."""

    name: str = ""

    def identity(self) -> Any:
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_identity(self, a) -> bool:
        return a == self.identity()

    def order(self) -> int | None:
        raise NotImplementedError

    @property
    def finite(self) -> bool:
        return self.order() is not None

    def normalize(self, a):
        return a

    def contains(self, a) -> bool:
        return True

    def format(self, a) -> str:
        return str(a)

    # regular or natural permutation model, finite stages only
    def perm_degree(self) -> int:
        raise NotImplementedError

    def to_perm(self, a) -> P.Perm:
        raise NotImplementedError

    def from_perm(self, p: P.Perm):
        raise NotImplementedError

    def power(self, a, n: int):
        if n < 0:
            a, n = self.inv(a), -n
        out = self.identity()
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out


class AbelianStage(Stage):
    """Z^r + Z/d_1 + ... written additively; elements are coordinate tuples."""

    def __init__(self, invariants: AbelianInvariants, name: str = ""):
        self.invariants = invariants
        self.name = name or str(invariants)
        self.moduli = (0,) * invariants.free_rank + invariants.torsion

    @classmethod
    def cyclic(cls, n: int, name: str = "") -> AbelianStage:
        if n == 0:
            return cls(AbelianInvariants((), 1), name or "Z")
        return cls(AbelianInvariants((n,) if n > 1 else (), 0), name or f"Z/{n}")

    def normalize(self, a):
        if isinstance(a, int):
            a = (a,)
        if len(a) != len(self.moduli):
            raise TowerError(f"element {a!r} has the wrong number of coordinates for {self.name}")
        return tuple(x % m if m else x for x, m in zip(a, self.moduli))

    def identity(self):
        return (0,) * len(self.moduli)

    def mul(self, a, b):
        return self.normalize(tuple(x + y for x, y in zip(a, b)))

    def inv(self, a):
        return self.normalize(tuple(-x for x in a))

    def power(self, a, n):
        return self.normalize(tuple(n * x for x in a))

    def order(self):
        return self.invariants.order()

    def format(self, a):
        return str(a[0]) if len(a) == 1 else str(a)

    def _elements(self):
        import itertools

        return list(itertools.product(*(range(m) for m in self.moduli)))

    def perm_degree(self):
        return self.order()

    def _index(self, a):
        idx = 0
        for x, m in zip(a, self.moduli):
            idx = idx * m + x
        return idx

    def to_perm(self, a):
        # regular representation
        return tuple(self._index(self.mul(x, a)) for x in self._elements())

    def from_perm(self, p):
        return self._elements()[p[0]]


class PermStage(Stage):
    def __init__(self, group: PermGroup, name: str = ""):
        self.group = group
        self.name = name or group.name or f"PermGroup({group.degree})"

    def identity(self):
        return self.group.identity()

    def mul(self, a, b):
        return P.mul(a, b)

    def inv(self, a):
        return P.inv(a)

    def normalize(self, a):
        if isinstance(a, str):
            return P.parse_cycles(a, self.group.degree)
        return P.extend(tuple(a), self.group.degree)

    def contains(self, a):
        return self.group.contains(a)

    def order(self):
        return self.group.order()

    def format(self, a):
        return P.format_cycles(a)

    def perm_degree(self):
        return self.group.degree

    def to_perm(self, a):
        return a

    def from_perm(self, p):
        return p


class MatrixStage(Stage):
    def __init__(self, d: int, modulus: int, group: MatrixGroup | None = None, name: str = ""):
        self.d = d
        self.modulus = modulus
        self.group = group
        self.name = name or f"GL_{d}(Z/{modulus})"

    def identity(self):
        return mat_identity(self.d)

    def mul(self, a, b):
        return mat_mul(a, b, self.modulus)

    def inv(self, a):
        return mat_inv(a, self.modulus)

    def normalize(self, a):
        return tuple(tuple(int(x) % self.modulus for x in r) for r in a)

    def contains(self, a):
        return self.group is None or self.group.contains(a)

    def order(self):
        if self.group is None:
            raise TowerError("matrix stage without a group has no known order")
        return self.group.order()

    def perm_degree(self):
        return len(self.group._points)

    def to_perm(self, a):
        return self.group.to_perm(a)

    def from_perm(self, p):
        table = self.__dict__.get("_table")
        if table is None:
            table = {self.group.to_perm(x): x for x in self.group.elements()}
            self.__dict__["_table"] = table
        return table[p]


# --- homomorphisms between finite stages ----------------------------------

class GraphHomomorphism:
    """Homomorphism Q -> R determined by generator images.

    The graph subgroup <(q_s, r_s)> of Q x R (acting on disjoint points) is
    built with a stabilizer chain whose base lies in Q's points; the map is
    well defined iff the graph projects isomorphically onto <q_s>.
    """

    def __init__(self, src: Stage, dst: Stage, src_images: Sequence, dst_images: Sequence):
        self.src, self.dst = src, dst
        self.n = src.perm_degree()
        self.m = dst.perm_degree()
        gens = [self._pair(src.to_perm(a), dst.to_perm(b)) for a, b in zip(src_images, dst_images)]
        self.chain = StabChain(self.n + self.m, gens)
        src_order = PermGroup([src.to_perm(a) for a in src_images], self.n).order()
        self.well_defined = self.chain.order() == src_order

    def _pair(self, a: P.Perm, b: P.Perm) -> P.Perm:
        return tuple(a) + tuple(self.n + x for x in b)

    def __call__(self, q):
        if not self.well_defined:
            raise TowerError("map is not well defined")
        x = self._pair(self.src.to_perm(q), P.identity(self.m))
        r, j = self.chain.sift(x)
        if any(r[i] != i for i in range(self.n)):
            raise TowerError("element outside the generated subgroup")
        back = tuple(v - self.n for v in r[self.n :])
        return self.dst.from_perm(P.inv(back))


def _abelian_kernel(stage: AbelianStage, images: Sequence) -> list[list[int]]:
    """Basis of the relation lattice of Z^k -> stage, e_s -> images[s]."""
    k = len(images)
    ncoord = len(stage.moduli)
    rows = [list(img) for img in images]
    for i, m in enumerate(stage.moduli):
        if m:
            rows.append([m if j == i else 0 for j in range(ncoord)])
    if ncoord == 0:
        return [[int(i == j) for j in range(k)] for i in range(k)]
    ker = left_kernel(rows, ncoord)
    return [row[:k] for row in ker]


def hom_well_defined(src: Stage, dst: Stage, src_images: Sequence, dst_images: Sequence) -> bool:
    """Whether q_s -> r_s extends to a homomorphism <q_s> -> R."""
    if isinstance(src, AbelianStage):
        for a in dst_images:
            for b in dst_images:
                if dst.mul(a, b) != dst.mul(b, a):
                    return False
        for rel in _abelian_kernel(src, src_images):
            acc = dst.identity()
            for c, img in zip(rel, dst_images):
                acc = dst.mul(acc, dst.power(img, c))
            if not dst.is_identity(acc):
                return False
        return True
    if not src.finite:
        raise TowerError(f"cannot decide homomorphisms out of {src.name}")
    if isinstance(dst, AbelianStage) and not dst.finite:
        r = dst.invariants.free_rank
        if any(any(img[:r]) for img in dst_images):
            return False
        torsion = AbelianStage(AbelianInvariants(dst.invariants.torsion, 0))
        dst_images = [img[r:] for img in dst_images]
        dst = torsion
    return GraphHomomorphism(src, dst, src_images, dst_images).well_defined


def abelian_projection(src: AbelianStage, dst: Stage, src_images: Sequence, dst_images: Sequence) -> Callable:
    """Element-level map for an abelian source, via integer linear algebra."""
    rows = [list(img) for img in src_images]
    ncoord = len(src.moduli)
    for i, m in enumerate(src.moduli):
        if m:
            rows.append([m if j == i else 0 for j in range(ncoord)])
    k = len(src_images)

    def f(q):
        y = solve_left(rows, list(src.normalize(q)), ncoord)
        if y is None:
            raise TowerError("element outside the generated subgroup")
        acc = dst.identity()
        for c, img in zip(y[:k], dst_images):
            acc = dst.mul(acc, dst.power(img, c))
        return acc

    return f


# --- towers ---------------------------------------------------------------

@dataclass
class QuotientTower:
    """Stages Q_1 <- Q_2 <- ... <- Q_k with generator images and projections.

    ``projections[i]`` maps stage i+1 onto stage i (0-based lists).
    """

    generators: tuple[str, ...]
    stages: list[Stage]
    images: list[dict[str, Any]]
    projections: list[Callable] = field(default_factory=list)
    name: str = ""
    validate: bool = True

    def __post_init__(self):
        self.generators = tuple(self.generators)
        if len(self.images) != len(self.stages):
            raise TowerError("one image table per stage is required")
        self.images = [
            {g: st.normalize(table[g]) for g in self.generators} for st, table in zip(self.stages, self.images)
        ]
        if not self.projections:
            self.projections = [self._derive_projection(i) for i in range(len(self.stages) - 1)]
        if len(self.projections) != len(self.stages) - 1:
            raise TowerError("need one projection between consecutive stages")
        if self.validate:
            self.check()

    def _derive_projection(self, i: int) -> Callable:
        src, dst = self.stages[i + 1], self.stages[i]
        si = [self.images[i + 1][g] for g in self.generators]
        di = [self.images[i][g] for g in self.generators]
        if not hom_well_defined(src, dst, si, di):
            raise TowerError(f"{self.name}: stage {i + 2} -> stage {i + 1} is not well defined on generators")
        if isinstance(src, AbelianStage):
            return abelian_projection(src, dst, si, di)
        return GraphHomomorphism(src, dst, si, di)

    def check(self) -> None:
        """Verify images lie in their stages and projections are compatible."""
        for st, table in zip(self.stages, self.images):
            for g, x in table.items():
                if not st.contains(x):
                    raise TowerError(f"{self.name}: image of {g} is not in stage {st.name}")
        for i, pi in enumerate(self.projections):
            src, dst = self.stages[i + 1], self.stages[i]
            gens = [self.images[i + 1][g] for g in self.generators]
            for g in self.generators:
                if pi(self.images[i + 1][g]) != self.images[i][g]:
                    raise TowerError(f"{self.name}: projection {i + 2}->{i + 1} disagrees on {g}")
            for a in gens:
                for b in gens:
                    if pi(src.mul(a, b)) != dst.mul(pi(a), pi(b)):
                        raise TowerError(f"{self.name}: projection {i + 2}->{i + 1} is not multiplicative")

    @property
    def depth(self) -> int:
        return len(self.stages)

    def word(self, text: str | int) -> Word:
        if isinstance(text, int) or (len(self.generators) == 1 and text.strip().lstrip("-").isdigit()):
            if len(self.generators) != 1:
                raise TowerError("integer shorthand needs a one-generator tower")
            return Word.gen(0) ** int(text)
        return parse_word(text, self.generators)

    def evaluate(self, i: int, w: Word):
        """Image of ``w`` in stage ``i`` (1-based)."""
        st = self.stages[i - 1]
        table = self.images[i - 1]
        out = st.identity()
        inverses = {}
        for gi, s in w.pairs():
            g = self.generators[gi]
            x = table[g]
            if s < 0:
                if g not in inverses:
                    inverses[g] = st.inv(x)
                x = inverses[g]
            out = st.mul(out, x)
        return out

    def separation(self, w: Word) -> list[int]:
        """v_i(w) for i = 1..depth: 0 iff w is trivial in stage i."""
        return [0 if self.stages[i - 1].is_identity(self.evaluate(i, w)) else 1 for i in range(1, self.depth + 1)]


@dataclass(frozen=True)
class DyadicDistance:
    """``2^(1 - first)`` if stage ``first`` separates, else a zero-up-to-``stages`` flag."""

    first: int | None
    stages: int

    @property
    def value(self) -> Fraction | None:
        if self.first is None:
            return None
        return Fraction(2, 2**self.first)

    @property
    def is_zero_flag(self) -> bool:
        return self.first is None

    def key(self) -> Fraction:
        """Comparison value; the flag compares as 0 (truncated pseudo-metric)."""
        return self.value if self.value is not None else Fraction(0)

    def __str__(self) -> str:
        if self.first is None:
            return f"0 (no separation up to stage {self.stages})"
        e = self.first - 1
        return "1" if e == 0 else f"1/2^{e}"

    def to_json(self):
        if self.first is None:
            return {"zero_up_to_stage": self.stages}
        return {"value": str(self.value), "dyadic": str(self), "first_separating_stage": self.first}


def metric(t: QuotientTower, x: Word | str | int, y: Word | str | int) -> DyadicDistance:
    """d(x, y) = w(x^-1 y) with w = sum_i 2^-i v_i; nested stages make it 2^(1-i0)."""
    x = x if isinstance(x, Word) else t.word(x)
    y = y if isinstance(y, Word) else t.word(y)
    v = t.separation(x.inverse() * y)
    for a, b in zip(v, v[1:]):
        if a > b:
            raise TowerError(f"{t.name}: separation is not monotone; stages are not nested")
    first = next((i + 1 for i, vi in enumerate(v) if vi), None)
    return DyadicDistance(first, t.depth)


def series_distance(t: QuotientTower, x: Word, y: Word) -> Fraction:
    """Brute-force truncated sum plus the geometric tail when the last stage separates."""
    v = t.separation(x.inverse() * y)
    total = sum(Fraction(vi, 2 ** (i + 1)) for i, vi in enumerate(v))
    if v and v[-1]:
        total += Fraction(1, 2 ** len(v))
    return total


@dataclass
class UltrametricReport:
    triples: int
    pairs: int
    strong_triangle: bool
    symmetric: bool
    left_invariant: bool
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.strong_triangle and self.symmetric and self.left_invariant


def ultrametric_check(t: QuotientTower, sample: Sequence[Word | str | int], max_triples: int | None = None,
                      seed: int = 0) -> UltrametricReport:
    """Strong triangle inequality, symmetry and left invariance on ``sample``."""
    words = [w if isinstance(w, Word) else t.word(w) for w in sample]
    cache: dict[tuple[Word, Word], DyadicDistance] = {}

    def d(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = metric(t, a, b)
        return cache[key]

    triples = [(a, b, c) for a in words for b in words for c in words]
    if max_triples is not None and len(triples) > max_triples:
        rng = random.Random(seed)
        triples = rng.sample(triples, max_triples)
    rep = UltrametricReport(len(triples), 0, True, True, True)
    for a, b, c in triples:
        if d(a, c).key() > max(d(a, b).key(), d(b, c).key()):
            rep.strong_triangle = False
            rep.failures.append(f"triangle {a} {b} {c}")
        if d(a, b) != d(b, a):
            rep.symmetric = False
            rep.failures.append(f"symmetry {a} {b}")
        # left translation by the third point
        if d(c * a, c * b) != d(a, b):
            rep.left_invariant = False
            rep.failures.append(f"left-invariance {c}: {a} {b}")
        rep.pairs += 1
    return rep


# --- coherent sequences -----------------------------------------------------

@dataclass(frozen=True)
class CoherentSequence:
    tower: QuotientTower
    elements: tuple

    def __post_init__(self):
        t = self.tower
        if len(self.elements) != t.depth:
            raise TowerError("one element per stage is required")
        els = tuple(st.normalize(x) for st, x in zip(t.stages, self.elements))
        object.__setattr__(self, "elements", els)
        for i, pi in enumerate(t.projections):
            if pi(els[i + 1]) != els[i]:
                raise TowerError(f"not coherent at stage {i + 1}")

    def __mul__(self, other: CoherentSequence) -> CoherentSequence:
        return coherent_product(self, other)

    def inverse(self) -> CoherentSequence:
        return CoherentSequence(self.tower, tuple(st.inv(x) for st, x in zip(self.tower.stages, self.elements)))

    def is_identity(self) -> bool:
        return all(st.is_identity(x) for st, x in zip(self.tower.stages, self.elements))

    def format(self) -> list[str]:
        return [st.format(x) for st, x in zip(self.tower.stages, self.elements)]


def coherent_product(a: CoherentSequence, b: CoherentSequence) -> CoherentSequence:
    if a.tower is not b.tower:
        raise TowerError("sequences belong to different towers")
    st = a.tower.stages
    return CoherentSequence(a.tower, tuple(s.mul(x, y) for s, x, y in zip(st, a.elements, b.elements)))


def canonical_map(t: QuotientTower, w: Word | str | int) -> CoherentSequence:
    w = w if isinstance(w, Word) else t.word(w)
    return CoherentSequence(t, tuple(t.evaluate(i, w) for i in range(1, t.depth + 1)))


# --- refinement -------------------------------------------------------------

@dataclass
class RefinementResult:
    refines: bool
    factorizations: dict[int, int]  # coarse stage -> fine stage it factors through
    same_topology: bool | None = None


def _factors_through(coarse: QuotientTower, i: int, fine: QuotientTower, j: int) -> bool:
    cs, fs = coarse.stages[i], fine.stages[j]
    ci = [coarse.images[i][g] for g in coarse.generators]
    fi = [fine.images[j][g] for g in fine.generators]
    return hom_well_defined(fs, cs, fi, ci)


def refinement_check(coarse: QuotientTower, fine: QuotientTower, both: bool = True) -> RefinementResult:
    """Whether every coarse stage factors through some fine stage."""
    if coarse.generators != fine.generators:
        raise TowerError("towers over different generating sets")
    fac = {}
    ok = True
    for i in range(coarse.depth):
        j = next((j for j in range(fine.depth) if _factors_through(coarse, i, fine, j)), None)
        if j is None:
            ok = False
            break
        fac[i + 1] = j + 1
    res = RefinementResult(ok, fac)
    if both:
        back = refinement_check(fine, coarse, both=False)
        res.same_topology = ok and back.refines
    return res


# --- standard towers --------------------------------------------------------

def padic_tower(p: int, depth: int, generator: str = "t") -> QuotientTower:
    """Z/p <- Z/p^2 <- ... <- Z/p^depth for the integers, N_i = p^i Z."""
    stages = [AbelianStage.cyclic(p**i, f"Z/{p**i}") for i in range(1, depth + 1)]
    images = [{generator: (1,)} for _ in stages]
    projections = [lambda x, m=p**i: (x[0] % m,) for i in range(1, depth)]
    return QuotientTower((generator,), stages, images, projections, name=f"{p}-adic")


def cyclic_tower(moduli: Sequence[int], generator: str = "t", name: str = "") -> QuotientTower:
    """Z/m_1 <- Z/m_2 <- ... (each m_i dividing m_(i+1))."""
    for a, b in zip(moduli, moduli[1:]):
        if b % a:
            raise TowerError("moduli must form a divisibility chain")
    stages = [AbelianStage.cyclic(m) for m in moduli]
    images = [{generator: st.normalize((1,)) if st.moduli else ()} for st in stages]
    return QuotientTower((generator,), stages, images, name=name or "cyclic")


def tower_from_levels(groups: Sequence[PermGroup], generators: Sequence[str], projection: Callable,
                      name: str = "") -> QuotientTower:
    """Tower whose stage i is ``groups[i]`` with generator j mapping to its j-th generator."""
    stages = [PermStage(G) for G in groups]
    images = [dict(zip(generators, G.gens)) for G in groups]
    return QuotientTower(tuple(generators), stages, images, [projection] * (len(groups) - 1), name=name)


def stagewise_center_check(t: QuotientTower, max_order: int = 2**16) -> bool:
    """Projections send the center of each finite stage into the center of the previous one.

    Centers are found by enumeration, so stages above ``max_order`` are skipped.
    """
    for i, pi in enumerate(t.projections):
        src, dst = t.stages[i + 1], t.stages[i]
        if not (isinstance(src, PermStage) and isinstance(dst, PermStage)):
            continue
        if src.order() > max_order:
            continue
        center = [z for z in src.group.elements() if all(P.mul(z, g) == P.mul(g, z) for g in src.group.gens)]
        for z in center:
            pz = pi(z)
            if any(P.mul(pz, g) != P.mul(g, pz) for g in dst.group.gens):
                return False
    return True


# --- p-adic demonstrations --------------------------------------------------

@dataclass
class GrothendieckDemo:
    p: int
    n: int
    inverses: list[int]
    bijective: list[bool]
    coherent: bool

    @property
    def ok(self) -> bool:
        return all(self.bijective) and self.coherent

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "stage_inverses": self.inverses,
            "bijective": self.bijective,
            "inverses_coherent": self.coherent,
        }


def padic_grothendieck_demo(p: int, n: int, max_a: int, enumerate_limit: int = 2**16) -> GrothendieckDemo:
    """Multiplication by n is a bijection of every Z/p^a, with coherent inverses (= 1/n in Z_p)."""
    if math.gcd(n, p) != 1:
        raise ValueError(f"gcd({n}, {p}) != 1")
    inverses, bij = [], []
    for a in range(1, max_a + 1):
        m = p**a
        inv = pow(n, -1, m)
        ok = (n * inv) % m == 1
        if m <= enumerate_limit:
            ok &= len({(n * x) % m for x in range(m)}) == m
        inverses.append(inv)
        bij.append(ok)
    coherent = all(inverses[a + 1] % p ** (a + 1) == inverses[a] for a in range(len(inverses) - 1))
    return GrothendieckDemo(p, n, inverses, bij, coherent)


def default_irrational_digits(p: int, count: int) -> int:
    """Integer x mod p^count from the aperiodic digit pattern 1 at positions k(k+1)/2."""
    x = 0
    k = 0
    while k * (k + 1) // 2 < count:
        x += p ** (k * (k + 1) // 2)
        k += 1
    return x


@dataclass
class RankTwoDemo:
    p: int
    stages: list[int]
    x_images: list[int]
    kernel_sizes: list[int]
    enumerated: list[bool]

    @property
    def ok(self) -> bool:
        return all(k == self.p**a for k, a in zip(self.kernel_sizes, self.stages))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "stages": self.stages,
            "x_images": self.x_images,
            "kernel_sizes": self.kernel_sizes,
            "enumerated": self.enumerated,
        }


def padic_rank2_demo(p: int, x: int | Sequence[int] | None, max_a: int, min_a: int = 0,
                     enumerate_limit: int = 2**16) -> RankTwoDemo:
    """Kernel of (u, v) -> u + x_a v on (Z/p^a)^2 at each stage a.

    ``x`` is an integer (stage images are its residues) or a list of stage
    images x_a for a = min_a..max_a.
    """
    if x is None:
        x = default_irrational_digits(p, max_a + 1)
    stages = list(range(min_a, max_a + 1))
    if isinstance(x, int):
        xs = [x % p**a for a in stages]
    else:
        xs = [int(v) % p**a for v, a in zip(x, stages)]
        if len(xs) != len(stages):
            raise ValueError("one stage image per stage is required")
    sizes, enum = [], []
    for a, xa in zip(stages, xs):
        m = p**a
        # |ker| = |domain| / |image|; the image is generated by 1 and x_a
        image = m // math.gcd(1, xa, m)
        size = m * m // image
        if m * m <= enumerate_limit:
            count = sum(1 for u in range(m) for v in range(m) if (u + xa * v) % m == 0)
            if count != size:
                raise AssertionError("kernel count disagrees with the index formula")
            enum.append(True)
        else:
            enum.append(False)
        sizes.append(size)
    return RankTwoDemo(p, stages, xs, sizes, enum)


# --- comparing completions --------------------------------------------------

def abelian_ptower(invariants: AbelianInvariants, images: Mapping[str, Sequence[int]], p: int,
                   depth: int, name: str = "") -> QuotientTower:
    """Stages A / p^a A (a = 1..depth) of an abelian quotient A with generator images."""
    base = (0,) * invariants.free_rank + invariants.torsion
    stages, tables = [], []
    for a in range(1, depth + 1):
        q = p**a
        mods = [math.gcd(m, q) if m else q for m in base]
        # sort coordinates so the moduli form a divisibility chain, drop trivial ones
        order_ = sorted((i for i, m in enumerate(mods) if m > 1), key=lambda i: mods[i])
        inv = AbelianInvariants(tuple(mods[i] for i in order_), 0)
        stages.append(AbelianStage(inv, str(inv)))
        tables.append({g: tuple(img[i] for i in order_) for g, img in images.items()})
    return QuotientTower(tuple(images), stages, tables, name=name or f"{p}-tower")


@dataclass
class CompletionReport:
    group: str
    kind: str
    prosoluble_stabilizes: bool | None
    prosoluble_stage: str | None
    derived_orders: list[int] | None = None
    ptower_orders: dict[int, list[int]] = field(default_factory=dict)
    ptowers_grow: bool | None = None
    distinguishes: bool | None = None
    verdict: str = ""

    def to_json(self) -> dict:
        out = {
            "group": self.group,
            "kind": self.kind,
            "prosoluble_stabilizes": self.prosoluble_stabilizes,
            "prosoluble_stage": self.prosoluble_stage,
            "ptower_orders": {str(p): v for p, v in sorted(self.ptower_orders.items())},
            "ptowers_grow": self.ptowers_grow,
            "distinguishes_PS_from_PFS": self.distinguishes,
            "verdict": self.verdict,
        }
        if self.derived_orders is not None:
            out["derived_orders"] = self.derived_orders
        return out


def completion_comparison(group, name: str = "", primes: Sequence[int] = (2, 3), max_stage: int = 6,
                          certificate=None) -> CompletionReport:
    """Stage data for P S against the pro-p (hence P F S) towers.

    ``group`` is a finite permutation or matrix group, or a presentation
    (optionally with a derived-series certificate).
    """
    from .finite import derived_series
    from .words import Presentation

    if isinstance(group, (PermGroup, MatrixGroup)):
        ds = derived_series(group)
        orders = ds.orders
        top = orders[0] // orders[-1]
        rep = CompletionReport(name or str(group.name), "finite", True, f"G/D^inf of order {top}", orders)
        rep.ptowers_grow = False
        rep.distinguishes = False
        rep.verdict = (f"finite group: every tower stabilizes; P S = P F S = G/D^inf of order {top}")
        return rep
    if not isinstance(group, Presentation):
        raise TypeError(f"no tower providers for {group!r}")
    from .certify import prosoluble_kernel_report
    from .zlattice import abelianize

    v = prosoluble_kernel_report(group, certificate, name)
    ab = abelianize(group)
    rep = CompletionReport(name or "G", "presentation", None, v.prosoluble)
    if v.prosoluble is not None:
        rep.prosoluble_stabilizes = True
    elif group.rank == 1 or v.status == "soluble":
        rep.prosoluble_stabilizes = True
        rep.prosoluble_stage = str(ab.invariants)
    for p in primes:
        t = abelian_ptower(ab.invariants, ab.images, p, max_stage)
        rep.ptower_orders[p] = [st.order() for st in t.stages]
    rep.ptowers_grow = all(all(a < b for a, b in zip(o, o[1:])) for o in rep.ptower_orders.values())
    rep.distinguishes = bool(rep.prosoluble_stabilizes and rep.ptowers_grow)
    if rep.distinguishes:
        rep.verdict = (f"P S(G) = {rep.prosoluble_stage} at every stage, while the pro-p towers grow "
                       f"through stage {max_stage}: P S(G) is not P F S(G)")
    elif rep.prosoluble_stabilizes:
        rep.verdict = f"P S(G) = {rep.prosoluble_stage}; pro-p towers stabilize"
    else:
        rep.verdict = "prosoluble tower not determined from the available data"
    return rep


# --- tower files ---------------------------------------------------------------

def _stage_from_spec(spec: Mapping) -> Stage:
    from .finite.groups import as_mat

    if "cyclic" in spec:
        return AbelianStage.cyclic(int(spec["cyclic"]))
    if "abelian" in spec:
        a = spec["abelian"]
        return AbelianStage(AbelianInvariants(tuple(a.get("torsion", ())), int(a.get("free_rank", 0))))
    if "permutations" in spec:
        deg = int(spec.get("degree", 0))
        return PermStage(PermGroup.from_cycles(spec["permutations"], deg, spec.get("name")))
    if "matrices" in spec:
        m = int(spec["modulus"])
        gens = [as_mat(g, m) for g in spec["matrices"]]
        G = MatrixGroup(gens, m, name=spec.get("name"))
        return MatrixStage(G.d, m, G, name=spec.get("name", ""))
    raise TowerError(f"unknown stage description {sorted(spec)}")


def load_tower(text: str | Mapping) -> QuotientTower:
    """Read a tower file (YAML).

    ::

        name: two-adic
        generators: [t]
        stages:
          - {cyclic: 2, images: {t: 1}}
          - {cyclic: 4, images: {t: 1}}

    Stages are groups (``cyclic``, ``abelian``, ``permutations`` or
    ``matrices``) with a generator-image table.  Connecting maps are derived
    from the images and must be well defined; otherwise loading fails.
    """
    import yaml

    data = yaml.safe_load(text) if isinstance(text, str) else text
    gens = tuple(str(g) for g in data["generators"])
    stages, images = [], []
    for spec in data["stages"]:
        st = _stage_from_spec(spec)
        table = spec.get("images") or {}
        if set(map(str, table)) != set(gens):
            raise TowerError("every stage needs an image for each generator")
        stages.append(st)
        images.append({str(g): v for g, v in table.items()})
    return QuotientTower(gens, stages, images, name=str(data.get("name", "")))
