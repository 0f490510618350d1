import random

from hypothesis import given, settings
from hypothesis import strategies as st

from prosol.corpus import load_corpus, shipped_corpus_text
from prosol.words import parse_presentation
from prosol.zlattice import (
    abelian_invariants,
    abelianize,
    det,
    left_kernel,
    matmul,
    smith_normal_form,
    solve_left,
)

from oracles import determinantal_divisors, snf_diagonal_elementary


def random_matrix(rng, max_dim=6, bound=20):
    r, c = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return [[rng.randint(-bound, bound) for _ in range(c)] for _ in range(r)], c


def check_snf(m, cols):
    f = smith_normal_form(m, cols=cols, transforms=True)
    assert matmul(matmul(f.U, m), f.V) == f.D if m else True
    assert abs(det(f.U)) == 1 and abs(det(f.V)) == 1
    D = f.D
    for i in range(len(D)):
        for j in range(cols):
            if i != j:
                assert D[i][j] == 0
    diag = f.diagonal
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[: len(nz)] == nz
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    return diag


def test_snf_examples():
    assert smith_normal_form([[1, 0], [0, 1]]).diagonal == [1, 1]
    assert smith_normal_form([[2, 4], [6, 8]]).diagonal == [2, 4]
    assert smith_normal_form([[-1, 0]]).D == [[1, 0]]


def test_oracles_agree_on_examples():
    assert snf_diagonal_elementary([[2, 4], [6, 8]], 2) == [2, 4]
    assert determinantal_divisors([[2, 4], [6, 8]], 2) == [2, 4]


def test_snf_against_elementary_oracle_randomized():
    rng = random.Random(2024)
    for _ in range(1000):
        m, c = random_matrix(rng)
        diag = check_snf(m, c)
        assert diag == snf_diagonal_elementary(m, c)


def test_snf_against_determinantal_divisors():
    rng = random.Random(5)
    for _ in range(200):
        m, c = random_matrix(rng, max_dim=4, bound=9)
        nz = [d for d in smith_normal_form(m, cols=c).diagonal if d]
        assert nz == determinantal_divisors(m, c)


def test_abelian_invariant_examples():
    f2 = abelian_invariants([], 2)
    assert (f2.free_rank, f2.torsion) == (2, ())
    b = abelian_invariants([[-1, 0]], 2)
    assert (b.free_rank, b.torsion) == (1, ())
    t = abelian_invariants([[2, 0], [0, 3]], 2)
    assert (t.free_rank, t.torsion) == (0, (6,))
    assert str(abelian_invariants([[2, 0, 0, 0], [0, 3, 0, 0]], 4)) == "Z^2 + Z/6"


def test_abelianize_baumslag():
    ab = abelianize(parse_presentation("<a,b | a = [a, a^b]>"))
    assert str(ab.invariants) == "Z"
    assert ab.images["a"] == (0,)
    assert ab.images["b"] in ((1,), (-1,))


def test_abelianize_shipped_sl3z_is_trivial():
    entry = next(e for e in load_corpus(shipped_corpus_text()) if e.name == "sl3z")
    ab = abelianize(parse_presentation(entry.payload["presentation"]))
    assert ab.invariants.is_trivial


def test_abelianize_baumslag_solitar():
    ab = abelianize(parse_presentation("<a, t | t a^2 t^-1 a^-3>"))
    assert (ab.invariants.free_rank, ab.invariants.torsion) == (1, ())


def test_left_kernel_and_solve_left():
    rng = random.Random(11)
    for _ in range(200):
        m, c = random_matrix(rng, max_dim=5, bound=6)
        for y in left_kernel(m, c):
            assert all(sum(y[i] * m[i][j] for i in range(len(m))) == 0 for j in range(c))
        coeffs = [rng.randint(-3, 3) for _ in m]
        x = [sum(coeffs[i] * m[i][j] for i in range(len(m))) for j in range(c)]
        sol = solve_left(m, x, c)
        assert sol is not None
        assert [sum(sol[i] * m[i][j] for i in range(len(m))) for j in range(c)] == x


small = st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4)


@settings(max_examples=200, deadline=None)
@given(small, st.data())
def test_invariants_stable_under_row_operations(m, data):
    base = abelian_invariants(m, 3)
    perm = data.draw(st.permutations(range(len(m))))
    assert abelian_invariants([m[i] for i in perm], 3) == base
    i = data.draw(st.integers(0, len(m) - 1))
    neg = [row[:] for row in m]
    neg[i] = [-x for x in neg[i]]
    assert abelian_invariants(neg, 3) == base
    j = data.draw(st.integers(0, len(m) - 1))
    if i != j:
        added = [row[:] for row in m]
        added[i] = [x + y for x, y in zip(added[i], added[j])]
        assert abelian_invariants(added, 3) == base
