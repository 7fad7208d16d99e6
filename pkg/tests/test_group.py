import itertools
import math

import numpy as np
import pytest

from schottky.catalog import cyclic, near_tangent, ring, suite, sym2
from schottky.group import (
    MarkedSchottkyGroup,
    NoWitnessError,
    WordBudgetExceeded,
    count_reduced_words,
    enumerate_words,
    letters_to_word,
    limit_set_sample,
    nested_disk,
    pairing_map,
    verify_classical,
    word_to_letters,
)
from schottky.moebius import Circle, MoebiusMap, compose, map_circle


def rank3():
    return ring(3, 2.0, 0.4)


@pytest.mark.parametrize("g", [1, 2, 3])
@pytest.mark.parametrize("N", range(0, 7))
def test_word_counts(g, N):
    group = {1: cyclic(), 2: sym2(), 3: rank3()}[g]
    words = [w for w, _ in enumerate_words(group, N)]
    assert len(words) == 1 + sum(2 * g * (2 * g - 1) ** (n - 1) for n in range(1, N + 1))
    assert len(set(words)) == len(words)


def test_word_count_examples():
    assert sum(1 for _ in enumerate_words(sym2(), 2)) == 17
    words = [w for w, _ in enumerate_words(cyclic(), 5)]
    assert len(words) == 11
    assert set(words) == {""} | {"a" * k for k in range(1, 6)} | {"A" * k for k in range(1, 6)}


def test_words_are_reduced_and_length_lex():
    g = sym2()
    words = [w for w, _ in enumerate_words(g, 4)]
    keys = [(len(w), word_to_letters(w, 2)) for w in words]
    assert keys == sorted(keys)
    for w in words:
        L = word_to_letters(w, 2)
        assert all(y != (x + 2) % 4 for x, y in zip(L, L[1:]))


def test_word_map_is_composition():
    g = sym2()
    maps = dict(enumerate_words(g, 2))
    A, B = g.generators
    assert maps["ab"].close_to(compose(A, B))
    assert maps["aB"].close_to(compose(A, B.inverse()))


def test_word_budget():
    with pytest.raises(WordBudgetExceeded):
        list(enumerate_words(sym2(), 6, budget=100))
    with pytest.raises(ValueError):
        list(enumerate_words(sym2(), -1))


def test_letter_roundtrip():
    assert letters_to_word(word_to_letters("aBcA", 3), 3) == "aBcA"
    with pytest.raises(ValueError):
        word_to_letters("d", 3)


def test_verify_examples():
    # generator pairing the circles of radius 1 about -2 and 2
    assert verify_classical(cyclic()).ok
    inflated = MarkedSchottkyGroup(cyclic().generators, (Circle(-2, 2.1), Circle(2, 2.1)))
    rep = verify_classical(inflated)
    assert not rep.ok
    assert any(v.startswith("disks overlap") for v in rep.violations)
    g = sym2()
    swapped = MarkedSchottkyGroup(g.generators, (g.circles[0], g.circles[1], g.circles[3], g.circles[2]))
    rep = verify_classical(swapped)
    assert not rep.ok
    assert any(v.startswith("image circle mismatch") for v in rep.violations)


def test_verify_orientation():
    # translate c0 onto c1, then a hyperbolic automorphism of disk 1: exterior stays exterior
    c0, c1 = Circle(-2, 1), Circle(2, 1)
    shift = MoebiusMap.translation(2)
    aut = shift @ MoebiusMap(1, 0.5, 0.5, 1) @ shift.inverse()
    grp = MarkedSchottkyGroup((aut @ MoebiusMap.translation(4),), (c0, c1))
    rep = verify_classical(grp)
    assert not rep.ok
    assert rep.violations[0].startswith("orientation")


def test_verify_needs_witness():
    with pytest.raises(NoWitnessError):
        verify_classical(MarkedSchottkyGroup(cyclic().generators))


def test_non_loxodromic_rejected():
    with pytest.raises(ValueError):
        MarkedSchottkyGroup((MoebiusMap.translation(1),))


@pytest.mark.parametrize("name", list(suite()))
def test_suite_is_classical(name):
    assert verify_classical(suite()[name]).ok


def test_near_tangent_is_classical():
    assert verify_classical(near_tangent(1e-3)).ok


def test_freeness_witness():
    g = sym2()
    items = list(enumerate_words(g, 4))
    mats = np.array([m.matrix.ravel() for _, m in items])
    for i in range(len(items)):
        diff = np.minimum(np.abs(mats - mats[i]).max(axis=1), np.abs(mats + mats[i]).max(axis=1))
        diff[i] = np.inf
        assert diff.min() > 1e-6, items[i][0]


def test_limit_set_rank_one():
    g = cyclic()
    a, b = sorted((z.real for z in limit_set_sample(g, 12)))
    assert a == pytest.approx(-math.sqrt(3), abs=1e-5) and b == pytest.approx(math.sqrt(3), abs=1e-5)
    assert len(limit_set_sample(g, 3)) == 2


@pytest.mark.parametrize("name", ["sym2", "ring2", "ring3"])
def test_limit_set_counts_and_containment(name):
    g = suite()[name]
    for depth in (1, 3, 5):
        pts = limit_set_sample(g, depth)
        assert len(pts) == count_reduced_words(g.rank, depth)
        for z in pts:
            assert any(c.contains(z) for c in g.circles)


def test_limit_set_nesting():
    g = suite()["ring2"]
    for d in range(1, 5):
        outer = [nested_disk(w, g) for w, _ in enumerate_words(g, d) if len(w) == d]
        for z in limit_set_sample(g, d + 1):
            assert any(abs(z - c.center) < c.radius for c in outer)


def test_limit_set_real_symmetric():
    for z in limit_set_sample(sym2(), 7):
        assert abs(z.imag) < 1e-9


def test_nested_disk_examples():
    g = cyclic()
    c = nested_disk("a", g)
    assert c.center == pytest.approx(g.circles[1].center) and c.radius == pytest.approx(g.circles[1].radius)
    with pytest.raises(ValueError):
        nested_disk("", g)
    with pytest.raises(ValueError):
        nested_disk("aA", g)


@pytest.mark.parametrize("name", ["sym2", "twist2", "ring3"])
def test_nesting_strict(name):
    g = suite()[name]
    disks = {w: nested_disk(w, g) for w, _ in enumerate_words(g, 5 if g.rank < 3 else 4) if w}
    for w, c in disks.items():
        assert any(abs(c.center - W.center) + c.radius <= W.radius + 1e-10 for W in g.circles)
        if len(w) > 1:
            parent = disks[w[:-1]]
            assert c.radius < parent.radius
            assert abs(c.center - parent.center) + c.radius <= parent.radius + 1e-10


def test_conjugate_and_scale():
    g = sym2()
    h = MoebiusMap(1, 0, 0.1j, 1)
    gc = g.conjugate(h)
    assert verify_classical(gc).ok
    for c, c2 in zip(g.circles, gc.circles):
        assert map_circle(h, c).center == pytest.approx(c2.center)
    s = g.scale_radii(1.5)
    assert [c.radius for c in s.circles] == pytest.approx([0.45] * 4)
    assert verify_classical(s).ok
    assert g.scale == pytest.approx(6)


def test_pairing_map_sends_circle():
    for c0, c1 in itertools.permutations([Circle(0, 1), Circle(5 + 1j, 0.3)], 2):
        f = pairing_map(c0, c1, twist=1.0)
        img = map_circle(f, c0)
        assert img.center == pytest.approx(c1.center) and img.radius == pytest.approx(c1.radius)
