"""Independent reference implementations used to cross-check the package."""

from __future__ import annotations

import itertools
import math
from collections import deque


def naive_reduce(letters):
    """Delete adjacent inverse pairs by repeated scanning until none remain."""
    w = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == -w[i + 1]:
                del w[i : i + 2]
                changed = True
                break
    return tuple(w)


def snf_diagonal_elementary(m, cols):
    """Smith diagonal by Euclid-style elementary operations, then gcd/lcm fix-up."""
    a = [list(r) for r in m]
    nr, nc = len(a), cols
    t = 0
    while t < min(nr, nc):
        # find any nonzero entry in the trailing block
        nz = [(i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nz:
            break
        i, j = nz[0]
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            # column t: Euclid between row t and each lower row
            for i in range(t + 1, nr):
                while a[i][t]:
                    if a[t][t]:
                        q = a[i][t] // a[t][t]
                        a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
            # row t: Euclid between column t and each later column
            for j in range(t + 1, nc):
                while a[t][j]:
                    if a[t][t]:
                        q = a[t][j] // a[t][t]
                        for r in a:
                            r[j] -= q * r[t]
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
            if all(a[i][t] == 0 for i in range(t + 1, nr)):
                break
        t += 1
    diag = [abs(a[i][i]) for i in range(min(nr, nc))]
    # gcd/lcm pass gives the divisibility chain
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            x, y = diag[i], diag[j]
            g = math.gcd(x, y)
            diag[i], diag[j] = g, (x * y // g if g else 0)
    nonzero = sorted(d for d in diag if d)
    return nonzero + [0] * (len(diag) - len(nonzero))


def det(m):
    n = len(m)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = 1
        for i in range(n):
            prod *= m[i][perm[i]]
        total += sign * prod
    return total


def determinantal_divisors(m, cols):
    """Invariant factors d_k / d_(k-1) from gcds of k x k minors."""
    rows = len(m)
    ds = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = math.gcd(g, det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        ds.append(g)
    return [ds[i] // ds[i - 1] for i in range(1, len(ds))]


def naive_magnus(letters, k, c):
    """Magnus image as a dict monomial -> coefficient, truncated at degree c."""
    series = {(): 1}
    for x in letters:
        i = abs(x) - 1
        if x > 0:
            factor = {(): 1, (i,): 1}
        else:
            factor = {(i,) * n: (-1) ** n for n in range(c + 1)}
        out = {}
        for m1, c1 in series.items():
            for m2, c2 in factor.items():
                m = m1 + m2
                if len(m) <= c:
                    out[m] = out.get(m, 0) + c1 * c2
        series = {m: v for m, v in out.items() if v}
    return series


def closure_size(gens, identity, mul):
    seen = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen)


def compose(p, q):
    """p first, then q."""
    return tuple(q[i] for i in p)
