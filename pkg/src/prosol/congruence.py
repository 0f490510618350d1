"""Congruence filtration of SL_d(Z) and GL_d(Z) at finite level.

The layer L_a = {x in GL_d(Z/p^a) : x = I mod p^(a-1)} is materialized as
{I + p^(a-1) A : A in M_d(Z/p)}, filtered by the determinant condition.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .finite import MatrixGroup, PermGroup, derived_series, enumerate_closure
from .finite.groups import CapExceeded, Mat, mat_det, mat_identity, mat_mul

Variant = Literal["SL", "GL"]
DEFAULT_LAYER_CAP = 2**20


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, math.isqrt(p) + 1))


def _check(d: int, p: int, a: int) -> None:
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if a < 2:
        raise ValueError("a >= 2 required")
    if d < 1:
        raise ValueError("d >= 1 required")


def _variant(v: str) -> Variant:
    v = v.upper()
    if v not in ("SL", "GL"):
        raise ValueError(f"unknown variant {v!r}")
    return v  # type: ignore[return-value]


def layer_elements(d: int, p: int, a: int, variant: str = "GL", cap: int = DEFAULT_LAYER_CAP) -> list[Mat]:
    """All I + p^(a-1) A with A in M_d(Z/p); SL keeps det = 1 mod p^a."""
    _check(d, p, a)
    variant = _variant(variant)
    if p ** (d * d) > cap:
        raise CapExceeded(f"p^(d^2) = {p ** (d * d)} exceeds the layer cap {cap}")
    m = p**a
    q = p ** (a - 1)
    out = []
    for entries in itertools.product(range(p), repeat=d * d):
        x = tuple(
            tuple((int(i == j) + q * entries[i * d + j]) % m for j in range(d)) for i in range(d)
        )
        if variant == "SL" and mat_det([list(r) for r in x]) % m != 1:
            continue
        out.append(x)
    return out


def layer_generators(d: int, p: int, a: int, variant: str = "GL") -> list[Mat]:
    """I + p^(a-1) E_ij (off-diagonal), plus diagonal directions (all E_ii for GL,
    E_ii - E_dd for SL)."""
    _check(d, p, a)
    variant = _variant(variant)
    m, q = p**a, p ** (a - 1)
    gens = []

    def elem(pairs):
        x = [list(r) for r in mat_identity(d)]
        for (i, j), c in pairs:
            x[i][j] = (x[i][j] + c * q) % m
        return tuple(tuple(r) for r in x)

    for i in range(d):
        for j in range(d):
            if i != j:
                gens.append(elem([((i, j), 1)]))
    for i in range(d):
        if variant == "GL":
            gens.append(elem([((i, i), 1)]))
        elif i < d - 1:
            gens.append(elem([((i, i), 1), ((d - 1, d - 1), -1)]))
    return gens


def reduction_kernel(d: int, p: int, a: int, variant: str = "GL", cap: int = DEFAULT_LAYER_CAP) -> MatrixGroup:
    """The layer K_(a-1)/K_a realized inside GL_d or SL_d over Z/p^a."""
    variant = _variant(variant)
    elements = layer_elements(d, p, a, variant, cap)
    g = MatrixGroup(layer_generators(d, p, a, variant), p**a, d, f"{variant}_{d} layer p={p} a={a}", cap)
    g.__dict__["_elements"] = frozenset(elements)
    return g


@dataclass
class LayerReport:
    d: int
    p: int
    a: int
    variant: str
    order: int
    expected_order: int
    abelian: bool
    exponent: int
    additive: bool
    closure_order: int
    exhaustive: bool

    @property
    def elementary_abelian(self) -> bool:
        return self.abelian and self.exponent in (1, self.p)

    @property
    def ok(self) -> bool:
        return (
            self.order == self.expected_order == self.closure_order
            and self.elementary_abelian
            and self.additive
        )

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "p": self.p,
            "a": self.a,
            "variant": self.variant,
            "order": self.order,
            "expected_order": self.expected_order,
            "closure_order": self.closure_order,
            "abelian": self.abelian,
            "exponent": self.exponent,
            "elementary_abelian": self.elementary_abelian,
            "additive": self.additive,
            "exhaustive": self.exhaustive,
        }


def _elem_order(x: Mat, m: int) -> int:
    e = mat_identity(len(x))
    y, k = x, 1
    while y != e:
        y = mat_mul(y, x, m)
        k += 1
    return k


def layer_structure(d: int, p: int, a: int, variant: str = "GL", cap: int = DEFAULT_LAYER_CAP,
                    exhaustive_limit: int = 4096, seed: int = 0) -> LayerReport:
    """Check that the layer is elementary abelian and that x -> x - I is additive.

    Pairs are checked exhaustively up to ``exhaustive_limit`` elements, else
    on generators plus a seeded random sample.
    """
    variant = _variant(variant)
    elements = layer_elements(d, p, a, variant, cap)
    m, q = p**a, p ** (a - 1)
    gens = layer_generators(d, p, a, variant)
    closure = enumerate_closure(gens, mat_identity(d), lambda x, y: mat_mul(x, y, m), cap)

    def coords(x):
        # (x - I) / p^(a-1), entries in Z/p
        return tuple(((x[i][j] - int(i == j)) % m) // q for i in range(d) for j in range(d))

    exhaustive = len(elements) <= exhaustive_limit
    if exhaustive:
        abelian, additive = _pairs_exhaustive(elements, p, a)
    else:
        rng = random.Random(seed)
        pairs = itertools.chain(
            itertools.product(gens, repeat=2),
            ((rng.choice(elements), rng.choice(elements)) for _ in range(20000)),
        )
        abelian = True
        additive = True
        for x, y in pairs:
            xy = mat_mul(x, y, m)
            if xy != mat_mul(y, x, m):
                abelian = False
            cx, cy, cxy = coords(x), coords(y), coords(xy)
            if any((u + v - w) % p for u, v, w in zip(cx, cy, cxy)):
                additive = False
            if not (abelian and additive):
                break
    exponent = 1
    for x in elements:
        exponent = math.lcm(exponent, _elem_order(x, m))
    expected = p ** (d * d) if variant == "GL" else p ** (d * d - 1)
    return LayerReport(d, p, a, variant, len(elements), expected, abelian, exponent, additive, len(closure), exhaustive)


def _pairs_exhaustive(elements: list[Mat], p: int, a: int, chunk: int = 256) -> tuple[bool, bool]:
    """All pairs at once: commutativity and additivity of x -> (x - I) / p^(a-1)."""
    m, q = p**a, p ** (a - 1)
    X = np.array(elements, dtype=np.int64)
    d = X.shape[1]
    C = ((X - np.eye(d, dtype=np.int64)) % m) // q
    abelian = additive = True
    for i in range(0, len(X), chunk):
        A = X[i : i + chunk]
        XY = np.einsum("aij,bjk->abik", A, X) % m
        YX = np.einsum("bij,ajk->abik", X, A) % m
        abelian &= bool(np.array_equal(XY, YX))
        CXY = ((XY - np.eye(d, dtype=np.int64)) % m) // q
        additive &= bool(np.all((C[i : i + chunk, None] + C[None, :] - CXY) % p == 0))
        if not (abelian and additive):
            break
    return abelian, additive


def determinant_unit_scan(d: int, p: int, a: int) -> bool:
    """Every x = I mod p over Z/p^a has unit determinant (full scan)."""
    m = p**a
    for entries in itertools.product(range(p ** (a - 1)), repeat=d * d):
        x = [[int(i == j) + p * entries[i * d + j] for j in range(d)] for i in range(d)]
        if mat_det(x) % p == 0:
            return False
    return True


# --- the residual-p tower -------------------------------------------------

def gamma_generators(d: int, p: int) -> list[list[list[int]]]:
    """Integer matrices in the principal congruence subgroup of level p.

    Elementary I + p E_ij, 2x2 diagonal blocks [[1+p, p], [-p, 1-p]] along
    the diagonal, and -I when p = 2.
    """
    gens = []
    for i in range(d):
        for j in range(d):
            if i != j:
                x = [[int(r == c) for c in range(d)] for r in range(d)]
                x[i][j] = p
                gens.append(x)
    for i in range(d - 1):
        x = [[int(r == c) for c in range(d)] for r in range(d)]
        x[i][i], x[i][i + 1] = 1 + p, p
        x[i + 1][i], x[i + 1][i + 1] = -p, 1 - p
        gens.append(x)
    if p == 2 and d % 2 == 0:
        gens.append([[-int(r == c) for c in range(d)] for r in range(d)])
    for g in gens:
        assert mat_det(g) == 1
    return gens


@dataclass
class ResidualPTower:
    d: int
    p: int
    levels: list[int]
    groups: list[MatrixGroup]
    orders: list[int]
    layer_orders: list[int]
    elementary_abelian: list[bool]
    p_groups: bool
    onto: bool
    generator_names: list[str] = field(default_factory=list)
    generators: list[list[list[int]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        expected = [self.p ** ((self.d**2 - 1) * (a - 1)) for a in self.levels]
        return self.p_groups and self.onto and all(self.elementary_abelian) and self.orders == expected

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "p": self.p,
            "levels": self.levels,
            "orders": self.orders,
            "layer_orders": self.layer_orders,
            "elementary_abelian": self.elementary_abelian,
            "p_groups": self.p_groups,
            "connecting_maps_onto": self.onto,
        }

    def to_tower(self):
        """The tower K_1/K_a, a = 2..max, as a QuotientTower over the lifted generators."""
        from .tower import MatrixStage, QuotientTower

        stages = []
        images = []
        for a, G in zip(self.levels, self.groups):
            m = self.p**a
            stages.append(MatrixStage(self.d, m, G, name=f"K_1/K_{a}"))
            images.append({n: tuple(tuple(x % m for x in r) for r in g)
                           for n, g in zip(self.generator_names, self.generators)})
        maps = []
        for a in self.levels[:-1]:
            m = self.p**a
            maps.append(lambda x, m=m: tuple(tuple(v % m for v in r) for r in x))
        return QuotientTower(tuple(self.generator_names), stages, images, maps, name=f"Gamma_{self.d}({self.p})")


def residual_p_tower(d: int, p: int, max_a: int, cap: int = DEFAULT_LAYER_CAP) -> ResidualPTower:
    """Images K_1/K_a of the level-p congruence subgroup in SL_d(Z/p^a), a = 2..max_a."""
    _check(d, p, max(max_a, 2))
    gens = gamma_generators(d, p)
    names = [f"g{i}" for i in range(len(gens))]
    levels = list(range(2, max_a + 1))
    groups, orders, layers, elab = [], [], [], []
    onto = True
    prev = None
    for a in levels:
        m = p**a
        if p ** ((d * d - 1) * (a - 1)) > cap:
            raise CapExceeded(f"K_1/K_{a} exceeds the cap {cap}")
        G = MatrixGroup(gens, m, d, f"K_1/K_{a}", cap)
        groups.append(G)
        orders.append(G.order())
        ok = all(mat_det([list(r) for r in x]) % m == 1 for x in G.elements())
        ok &= all(all(((x[i][j] - int(i == j)) % p) == 0 for i in range(d) for j in range(d)) for x in G.elements())
        if not ok:
            raise AssertionError("generator images left the congruence kernel")
        if prev is not None:
            pm = p ** (a - 1)
            image = {tuple(tuple(v % pm for v in r) for r in x) for x in G.elements()}
            onto &= image == set(prev.elements())
            layers.append(G.order() // prev.order())
        else:
            layers.append(G.order())
        # kernel of reduction to the previous level: elements = I mod p^(a-1)
        q = p ** (a - 1)
        kernel = [x for x in G.elements() if all((x[i][j] - int(i == j)) % q == 0 for i in range(d) for j in range(d))]
        comm = all(mat_mul(x, y, m) == mat_mul(y, x, m) for x in kernel[:64] for y in kernel)
        expo = all(_elem_order(x, m) in (1, p) for x in kernel)
        elab.append(comm and expo)
        prev = G
    pgroups = all(o == p ** round(math.log(o, p)) for o in orders)
    return ResidualPTower(d, p, levels, groups, orders, layers, elab, pgroups, onto, names, gens)


def as_perm(g: MatrixGroup) -> PermGroup:
    return g.as_perm_group()


def layer_derived_length(g: MatrixGroup) -> int | None:
    return derived_series(g).length
