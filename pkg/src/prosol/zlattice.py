"""Exact integer linear algebra: Smith normal form and abelian invariants.

Matrices are lists of rows of Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .words import Presentation, exponent_sums

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(inner)) for j in range(cols)] for i in range(len(a))]


def det(m: Matrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass
class SmithForm:
    """``U @ m @ V == D``; ``U`` and ``V`` are None unless requested."""

    D: Matrix
    U: Matrix | None = None
    V: Matrix | None = None
    rows: int = 0
    cols: int = 0

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(self.rows, self.cols))]


def smith_normal_form(m: Sequence[Sequence[int]], cols: int | None = None, transforms: bool = False) -> SmithForm:
    """Smith normal form with smallest-absolute-value pivoting.

    ``cols`` is needed only for matrices with no rows.
    """
    a = [list(map(int, row)) for row in m]
    nr = len(a)
    nc = len(a[0]) if a else (cols or 0)
    U = identity(nr) if transforms else None
    V = identity(nc) if transforms else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        if q:
            ra, rs = a[dst], a[src]
            for j in range(nc):
                ra[j] -= q * rs[j]
            if U is not None:
                ua, us = U[dst], U[src]
                for j in range(nr):
                    ua[j] -= q * us[j]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        if q:
            for row in a:
                row[dst] -= q * row[src]
            if V is not None:
                for row in V:
                    row[dst] -= q * row[src]

    t = 0
    while t < min(nr, nc):
        # pivot: smallest nonzero |entry| in the trailing block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
                    if a[t][j]:
                        dirty = True
            if dirty:
                # a remainder smaller than the pivot exists: move it to the pivot
                best = None
                for i in range(t, nr):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), i, "r")
                for j in range(t, nc):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), j, "c")
                if best[2] == "r":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                continue
            # pivot must divide the trailing block
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    return SmithForm(a, U, V, nr, nc)


@dataclass(frozen=True)
class AbelianInvariants:
    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        tor = tuple(int(d) for d in self.torsion)
        if any(d < 2 for d in tor):
            raise ValueError("torsion invariants must be >= 2")
        if any(tor[i + 1] % tor[i] for i in range(len(tor) - 1)):
            raise ValueError("torsion invariants must form a divisibility chain")
        object.__setattr__(self, "torsion", tor)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def abelian_invariants(m: Sequence[Sequence[int]], k: int) -> AbelianInvariants:
    """Invariants of ``Z^k / rowspace(m)``."""
    if any(len(row) != k for row in m):
        raise ValueError(f"expected {k} columns")
    diag = smith_normal_form(m, cols=k).diagonal
    rank = sum(1 for d in diag if d)
    return AbelianInvariants(tuple(d for d in diag if d > 1), k - rank)


@dataclass
class Abelianization:
    """``invariants`` plus each generator's coordinates in ``Z^r + Z/d_1 + ...``.

    Coordinates list the free part first, then one entry per torsion factor
    (reduced into ``[0, d_i)``).
    """

    invariants: AbelianInvariants
    images: dict[str, tuple[int, ...]] = field(default_factory=dict)


def relation_matrix(p: Presentation) -> Matrix:
    return [exponent_sums(r, p.rank) for r in p.relators]


def abelianize(p: Presentation) -> Abelianization:
    k = p.rank
    snf = smith_normal_form(relation_matrix(p), cols=k, transforms=True)
    diag = snf.diagonal + [0] * max(0, k - len(snf.diagonal))
    # generator e_i maps to row i of V in the diagonal basis
    V = snf.V
    torsion_cols = [j for j in range(k) if diag[j] > 1]
    free_cols = [j for j in range(k) if diag[j] == 0]
    images = {}
    for i, name in enumerate(p.names):
        row = V[i]
        coords = [row[j] for j in free_cols] + [row[j] % diag[j] for j in torsion_cols]
        images[name] = tuple(coords)
    inv = AbelianInvariants(tuple(diag[j] for j in torsion_cols), len(free_cols))
    return Abelianization(inv, images)


def left_kernel(m: Sequence[Sequence[int]], cols: int) -> Matrix:
    """Integer basis of ``{y : y @ m == 0}``."""
    snf = smith_normal_form(m, cols=cols, transforms=True)
    r = sum(1 for d in snf.diagonal if d)
    return [row[:] for row in snf.U[r:]]


def solve_left(m: Sequence[Sequence[int]], x: Sequence[int], cols: int) -> list[int] | None:
    """Integer row ``y`` with ``y @ m == x``, or None when no solution exists."""
    snf = smith_normal_form(m, cols=cols, transforms=True)
    # y m = x  <=>  (y U^-1) D = x V
    xv = [sum(x[i] * snf.V[i][j] for i in range(cols)) for j in range(cols)]
    diag = snf.diagonal
    z = [0] * len(m)
    for j in range(cols):
        dj = diag[j] if j < len(diag) else 0
        if dj == 0:
            if xv[j]:
                return None
        elif xv[j] % dj:
            return None
        else:
            z[j] = xv[j] // dj
    # y = z U
    return [sum(z[i] * snf.U[i][j] for i in range(len(m))) for j in range(len(m))]
