import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosol.words import (
    ParseError,
    Word,
    commutator,
    conjugate,
    exponent_sums,
    free_reduce,
    parse_presentation,
    parse_word,
)

from oracles import naive_reduce

XY = ["x", "y"]
AB = ["a", "b"]

letters = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=40)


def w(text, names=XY):
    return parse_word(text, names)


def test_cancellation_example():
    assert free_reduce([1, 2, -2, 1]) == Word([1, 1])


def test_empty_word():
    assert free_reduce([]) == Word()
    assert not Word()


def test_baumslag_relator_reduction():
    a, b = 1, 2
    ab = [-b, a, b]
    ab_inv = [-b, -a, b]
    # a^-1 [a, a^b] = a^-1 a^-1 (a^b)^-1 a a^b with a^b written out
    raw = [-a, -a] + ab_inv + [a] + ab
    reduced = free_reduce(raw)
    assert reduced.letters == naive_reduce(raw)
    assert reduced == parse_word("a^-1 [a, a^b]", AB)
    assert reduced == Word([-a, -a, -b, -a, b, a, -b, a, b])
    # one trailing a more gives a different, longer word
    assert free_reduce(raw + [a]) != reduced
    assert len(free_reduce(raw + [a])) == 10


def test_length_eight_word_is_the_commutator():
    # the length-8 word a^-1 b^-1 a^-1 b a b^-1 a b is [a, a^b] itself
    assert w("a^-1 b^-1 a^-1 b a b^-1 a b", AB) == commutator(w("a", AB), w("a^b", AB))


def test_commutator_examples():
    x, y = w("x"), w("y")
    assert commutator(x, x) == Word()
    assert commutator(x, y) == w("x^-1 y^-1 x y")
    assert commutator(x, Word()) == Word()


def test_conjugate_examples():
    a, b = w("a", AB), w("b", AB)
    assert conjugate(a, b) == w("b^-1 a b", AB)
    assert conjugate(a, Word()) == a
    assert conjugate(Word(), b) == Word()


def test_exponent_sum_examples():
    assert exponent_sums(w("[x, y]"), 2) == [0, 0]
    assert exponent_sums(w("y x y x^-1 y^-1"), 2) == [0, 1]
    assert exponent_sums(w("a^-1 [a, a^b]", AB), 2) == [-1, 0]


def test_presentation_syntax_and_cyclic_reduction():
    p = parse_presentation("<a,b | a = [a, a^b]>")
    assert p.names == ["a", "b"]
    assert len(p.relators) == 1
    r = p.relators[0]
    assert r == r.cyclically_reduced()
    assert exponent_sums(r, 2) == [-1, 0]


def test_parse_errors_are_reported():
    with pytest.raises(ParseError):
        parse_presentation("<a,b | a = [a, a^b>")
    with pytest.raises(ParseError):
        parse_word("z", XY)


@settings(max_examples=300, deadline=None)
@given(letters)
def test_reduction_matches_naive_oracle(ls):
    assert free_reduce(ls).letters == naive_reduce(ls)


@settings(max_examples=300, deadline=None)
@given(letters)
def test_reduction_is_idempotent(ls):
    r = free_reduce(ls)
    assert free_reduce(r) == r
    assert len(r) <= len(ls)


def test_word_times_inverse_is_empty_randomized():
    rng = random.Random(7)
    for _ in range(10_000):
        ls = [rng.choice([1, -1, 2, -2]) for _ in range(rng.randrange(0, 30))]
        u = Word(ls)
        assert (u * u.inverse()) == Word()
        assert free_reduce(ls + [-x for x in reversed(ls)]) == Word()


@settings(max_examples=200, deadline=None)
@given(letters, letters)
def test_exponent_sums_are_reduction_invariant_and_kill_commutators(a, b):
    assert exponent_sums(Word(a), 3) == exponent_sums(free_reduce(a), 3)
    raw = [0, 0, 0]
    for x in a:
        raw[abs(x) - 1] += 1 if x > 0 else -1
    assert exponent_sums(Word(a), 3) == raw
    assert exponent_sums(commutator(Word(a), Word(b)), 3) == [0, 0, 0]
