import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosol.freequot import (
    basic_commutators,
    lcs_depth,
    lcs_layer_ranks,
    magnus_image,
    metabelian_image,
    necklace_count,
    nilpotent_surjectivity,
    subgroup_membership,
    subgroup_rank,
)
from prosol.freequot.fox import Laurent
from prosol.freequot.stallings import SubgroupGraph
from prosol.words import Word, commutator, conjugate, exponent_sums, parse_word

from oracles import naive_magnus

XY = ["x", "y"]


def w(text):
    return parse_word(text, XY)


def lyndon_count(k, j):
    """Brute force: aperiodic words that are strictly least among their rotations."""
    total = 0
    for word in itertools.product(range(k), repeat=j):
        rots = [word[i:] + word[:i] for i in range(1, j)]
        if all(word < r for r in rots):
            total += 1
    return total


def random_word(rng, k=2, n=12):
    return Word(rng.choice([1, -1, 2, -2, 3, -3][: 2 * k]) for _ in range(rng.randrange(n + 1)))


# --- Magnus ----------------------------------------------------------------

def test_magnus_examples():
    assert magnus_image(Word(), 3, 2).is_one()
    assert magnus_image(w("[x, y]"), 2).terms() == {(): 1, (0, 1): 1, (1, 0): -1}
    assert magnus_image(w("x x^-1"), 4, 2).is_one()
    assert magnus_image(w("[x, y]"), 2).format() == "1 + XY - YX"


def test_magnus_matches_naive_expansion():
    rng = random.Random(3)
    for _ in range(200):
        u = random_word(rng, k=3, n=10)
        c = rng.randint(1, 4)
        assert magnus_image(u, c, 3).terms() == naive_magnus(u.letters, 3, c)


def test_magnus_is_multiplicative_randomized():
    rng = random.Random(17)
    for _ in range(1000):
        u, v = random_word(rng), random_word(rng)
        c = rng.randint(1, 5)
        assert magnus_image(u, c, 2) * magnus_image(v, c, 2) == magnus_image(u * v, c, 2)


def test_lcs_depth_examples():
    assert str(lcs_depth(w("x"), 4)) == "1"
    assert str(lcs_depth(w("[x, y]"), 4)) == "2"
    assert str(lcs_depth(w("[[x, y], y]"), 4)) == "3"
    assert str(lcs_depth(Word(), 4)) == "infinite"
    assert str(lcs_depth(w("[[[x, y], y], y]"), 3)) == ">=4"


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=24))
def test_depth_two_iff_exponent_sums_vanish(ls):
    u = Word(ls)
    if not u:
        return
    d = lcs_depth(u, 3, 2)
    assert (d.lower >= 2) == (exponent_sums(u, 2) == [0, 0])


def test_basic_commutators_have_their_weight_as_depth():
    for b in basic_commutators(2, 5):
        assert lcs_depth(b.word, 5, 2).exact
        assert int(lcs_depth(b.word, 5, 2).lower) == b.weight
    assert [sum(1 for b in basic_commutators(3, 3) if b.weight == j) for j in (1, 2, 3)] == [3, 3, 8]


def test_layer_rank_examples():
    assert lcs_layer_ranks(2, 2) == [2, 1]
    assert lcs_layer_ranks(2, 6) == [2, 1, 2, 3, 6, 9]
    assert lcs_layer_ranks(1, 3) == [1, 0, 0]


@pytest.mark.parametrize("k,c", [(2, 6), (3, 4)])
def test_layer_ranks_against_lyndon_oracle(k, c):
    expected = [lyndon_count(k, j) for j in range(1, c + 1)]
    assert [necklace_count(k, j) for j in range(1, c + 1)] == expected
    assert lcs_layer_ranks(k, c) == expected


def test_layer_rank_cutoff_is_enforced():
    with pytest.raises(ValueError):
        lcs_layer_ranks(2, 9)


# --- parafree example ------------------------------------------------------

Y_PRIME = "y x y x^-1 y^-1"


def test_surjectivity_examples():
    assert nilpotent_surjectivity([w("x"), w(Y_PRIME)], 2, 6)
    assert not nilpotent_surjectivity([w("x^2"), w("y")], 2)
    assert nilpotent_surjectivity([w("x"), w("y")], 2)


def test_membership_examples():
    gens = [w("x"), w(Y_PRIME)]
    assert not subgroup_membership(gens, w("y"))
    assert subgroup_membership(gens, w("x"))
    assert subgroup_membership(gens, w(Y_PRIME) * w("x^-1") * w(Y_PRIME))


def test_rank_examples():
    assert subgroup_rank([w("x"), w(Y_PRIME)]) == 2
    assert subgroup_rank([w("x")]) == 1
    assert subgroup_rank([w("x"), w("x^2")]) == 1


def test_membership_of_random_products():
    rng = random.Random(23)
    for _ in range(100):
        gens = [random_word(rng, n=6) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if g] or [w("x")]
        prod = Word()
        for _ in range(rng.randint(0, 8)):
            prod = prod * (rng.choice(gens) ** rng.choice([1, -1]))
        assert subgroup_membership(gens, prod)


def test_folded_graph_is_deterministic():
    rng = random.Random(29)
    for _ in range(50):
        gens = [random_word(rng, n=8) for _ in range(3)]
        g = SubgroupGraph(gens)
        assert g.is_folded()
        assert g.rank() == len(g.edges()) - len(g.vertices) + 1


# --- Fox calculus -------------------------------------------------------------

def test_fox_examples():
    m = metabelian_image(w("[x, y]"), 2)
    one = Laurent.monomial((0, 0))
    x, y = Laurent.monomial((1, 0)), Laurent.monomial((0, 1))
    assert m.exponents == (0, 0)
    # with [x,y] = x^-1 y^-1 x y the derivatives are x^-1 y^-1 (1 - y) and x^-1 y^-1 (x - 1)
    xy_inv = Laurent.monomial((-1, -1))
    assert m.fox == (xy_inv * (one - y), xy_inv * (x - one))
    assert not m.is_trivial()
    g = metabelian_image(w("x"), 2)
    assert g.exponents == (1, 0) and g.fox == (one, Laurent(2))


def test_second_derived_elements_are_trivial():
    rng = random.Random(31)
    for _ in range(200):
        a = commutator(random_word(rng, n=5), random_word(rng, n=5))
        b = commutator(random_word(rng, n=5), random_word(rng, n=5))
        assert metabelian_image(commutator(a, b), 2).is_trivial()
    c = w("[x, y]")
    assert metabelian_image(commutator(c, conjugate(c, w("x"))), 2).is_trivial()
    for text in ("x", "y", "[x, y]"):
        assert not metabelian_image(w(text), 2).is_trivial()


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=20),
       st.lists(st.sampled_from([1, -1, 2, -2]), max_size=20))
def test_fox_identity_and_product_rule(a, b):
    u, v = Word(a), Word(b)
    mu, mv, muv = metabelian_image(u, 2), metabelian_image(v, 2), metabelian_image(u * v, 2)
    assert mu.fundamental_identity_holds() and muv.fundamental_identity_holds()
    tu = Laurent.monomial(mu.exponents)
    for i in range(2):
        assert muv.fox[i] == mu.fox[i] + tu * mv.fox[i]
