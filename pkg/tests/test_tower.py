import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosol.certify import load_certificate
from prosol.finite import symmetric_group
from prosol.tower import (
    CoherentSequence,
    TowerError,
    canonical_map,
    coherent_product,
    completion_comparison,
    cyclic_tower,
    load_tower,
    metric,
    padic_grothendieck_demo,
    padic_rank2_demo,
    padic_tower,
    refinement_check,
    series_distance,
    stagewise_center_check,
    tower_from_levels,
    ultrametric_check,
)
from prosol.treeauto import grigorchuk_group, level_quotient_group, project
from prosol.words import Word, parse_presentation

TWO = padic_tower(2, 4)
GRIG = tower_from_levels([level_quotient_group(grigorchuk_group(), n) for n in range(1, 5)],
                         ("a", "b", "c", "d"), project, name="grigorchuk")
TOWERS = {"two-adic": TWO, "three-adic": padic_tower(3, 3), "grigorchuk": GRIG}


def words_for(t, rng, count, max_len=10):
    k = len(t.generators)
    return [Word(rng.choice([1, -1]) * rng.randint(1, k) for _ in range(rng.randint(0, max_len)))
            for _ in range(count)]


# --- metric -------------------------------------------------------------------

def test_metric_examples():
    d = metric(TWO, 5, 5)
    assert d.is_zero_flag and d.value is None
    assert str(d) == "0 (no separation up to stage 4)"
    d = metric(TWO, 0, 4)
    assert d.first == 3 and d.value == Fraction(1, 4)
    assert metric(TWO, 0, 1).value == 1
    assert str(metric(TWO, 0, 2)) == "1/2^1"


def test_distance_is_the_weighted_series():
    rng = random.Random(1)
    for name, t in TOWERS.items():
        for _ in range(200):
            x, y = words_for(t, rng, 2)
            d = metric(t, x, y)
            assert d.key() == series_distance(t, x, y), name


def test_ultrametric_examples():
    assert ultrametric_check(TWO, [3, 3, 3]).ok
    rep = ultrametric_check(TWO, [0, 1, 2, 4, 8])
    assert rep.ok
    assert metric(TWO, 0, 4) == metric(TWO, 1, 5)


@pytest.mark.parametrize("name", sorted(TOWERS))
def test_ultrametric_on_random_triples(name):
    t = TOWERS[name]
    rng = random.Random(name)
    rep = ultrametric_check(t, words_for(t, rng, 50), max_triples=2000, seed=3)
    assert rep.triples >= 1000
    assert rep.ok, rep.failures[:3]


ints = st.integers(-300, 300)


@settings(max_examples=200, deadline=None)
@given(ints, ints, ints)
def test_padic_metric_properties(x, y, z):
    d = lambda a, b: metric(TWO, a, b).key()
    assert d(x, z) <= max(d(x, y), d(y, z))
    assert d(x, y) == d(y, x)
    assert d(x + z, y + z) == d(x, y)
    # direct 2-adic valuation oracle
    diff = y - x
    if diff % 16 == 0:
        assert d(x, y) == 0
    else:
        v = (diff & -diff).bit_length() - 1
        assert d(x, y) == Fraction(1, 2**v)


def test_nested_towers_are_required():
    good = load_tower({"generators": ["t"], "stages": [{"cyclic": 4, "images": {"t": 1}},
                                                      {"cyclic": 8, "images": {"t": 1}}]})
    assert good.depth == 2
    with pytest.raises(TowerError):
        load_tower({"generators": ["t"], "stages": [{"cyclic": 2, "images": {"t": 1}},
                                                    {"cyclic": 3, "images": {"t": 1}}]})


# --- coherent sequences ------------------------------------------------------

def test_coherent_examples():
    a = canonical_map(TWO, 7)
    assert (a * a.inverse()).is_identity()
    u, v = Word([1, 1, 1]), Word([-1])
    assert coherent_product(canonical_map(TWO, u), canonical_map(TWO, v)) == canonical_map(TWO, u * v)
    s = CoherentSequence(TWO, ((1,), (3,), (3,), (11,)))
    t = CoherentSequence(TWO, ((1,), (1,), (5,), (13,)))
    assert (s * t).elements == ((0,), (0,), (0,), (8,))
    with pytest.raises(TowerError):
        CoherentSequence(TWO, ((1,), (2,), (3,), (4,)))


def test_canonical_map_examples():
    assert canonical_map(TWO, Word()).is_identity()
    assert canonical_map(TWO, "t").elements == ((1,), (1,), (1,), (1,))
    assert canonical_map(TWO, 1).format() == ["1", "1", "1", "1"]


def test_canonical_map_is_a_homomorphism_with_normal_kernels():
    rng = random.Random(9)
    t = GRIG
    sample = words_for(t, rng, 60, max_len=8)
    for u, v in zip(sample, sample[1:]):
        assert canonical_map(t, u) * canonical_map(t, v) == canonical_map(t, u * v)
    gens = [Word.gen(i, s) for i in range(4) for s in (1, -1)]
    for k in range(1, t.depth + 1):
        kernel = [w for w in sample + [u * v * u.inverse() * v.inverse() for u, v in zip(sample, sample[3:])]
                  if t.stages[k - 1].is_identity(t.evaluate(k, w))]
        for w in kernel:
            for g in gens:
                assert t.stages[k - 1].is_identity(t.evaluate(k, g.inverse() * w * g))


# --- refinement ----------------------------------------------------------------

def test_refinement_examples():
    r = refinement_check(TWO, TWO)
    assert r.refines and r.same_topology
    sub = cyclic_tower([4, 16])
    r = refinement_check(cyclic_tower([2, 4, 8, 16]), sub)
    assert r.refines and r.same_topology
    r = refinement_check(padic_tower(2, 4), padic_tower(3, 3))
    assert not r.refines and not r.same_topology
    assert not refinement_check(padic_tower(3, 3), padic_tower(2, 4)).refines


def test_refinement_is_transitive():
    towers = [cyclic_tower(m) for m in ([2], [2, 4], [4, 16], [2, 8], [3], [3, 9], [6], [2, 6, 12])]
    rel = {(i, j): refinement_check(a, b, both=False).refines
           for i, a in enumerate(towers) for j, b in enumerate(towers)}
    n = len(towers)
    for i in range(n):
        assert rel[i, i]
        for j in range(n):
            for k in range(n):
                if rel[i, j] and rel[j, k]:
                    assert rel[i, k]


def test_center_identity_stagewise():
    assert stagewise_center_check(GRIG)
    assert stagewise_center_check(TWO)


# --- p-adic demonstrations -----------------------------------------------------

def test_grothendieck_examples():
    r = padic_grothendieck_demo(2, 3, 4)
    assert r.inverses[3] == 11 and r.ok
    with pytest.raises(ValueError):
        padic_grothendieck_demo(3, 3, 4)
    assert padic_grothendieck_demo(5, 2, 1).inverses == [3]


@pytest.mark.parametrize("p,n", [(2, 3), (2, 5), (2, 7), (5, 2), (5, 3), (5, 7)])
def test_grothendieck_bijections(p, n):
    r = padic_grothendieck_demo(p, n, 12)
    assert r.ok and len(r.inverses) == 12
    for a, inv in enumerate(r.inverses, start=1):
        assert n * inv % p**a == 1


def test_rank2_examples():
    assert padic_rank2_demo(2, 5, 3).kernel_sizes[-1] == 8
    assert padic_rank2_demo(2, None, 0).kernel_sizes == [1]
    r = padic_rank2_demo(3, [1], 2, min_a=2)
    assert r.kernel_sizes == [9]


@pytest.mark.parametrize("p", [2, 5])
def test_rank2_kernel_sizes(p):
    r = padic_rank2_demo(p, None, 12, min_a=1)
    assert r.ok
    assert r.kernel_sizes == [p**a for a in range(1, 13)]


# --- completions ------------------------------------------------------------

def test_completion_of_integers():
    rep = completion_comparison(parse_presentation("<t | >"), "Z")
    assert rep.prosoluble_stabilizes and rep.ptowers_grow and rep.distinguishes
    assert rep.ptower_orders[2] == [2**a for a in range(1, 7)]


def test_completion_of_finite_soluble_group():
    rep = completion_comparison(symmetric_group(4), "S4")
    assert rep.prosoluble_stabilizes and not rep.ptowers_grow
    assert "order 24" in rep.verdict


def test_completion_of_baumslag_group():
    p = parse_presentation("<a, b | a = [a, a^b]>")
    cert = load_certificate({"target": "a", "w1": "g", "w2": "g^(b)", "pi": [[0, "1", 1]]}, p)
    rep = completion_comparison(p, "baumslag", certificate=cert)
    assert rep.prosoluble_stage == "Z"
    assert rep.distinguishes
