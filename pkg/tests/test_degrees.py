import random

import pytest

from blregion.degrees import DIFFERENTIAL_SHIFT, TriDegree, Window, coweight


def test_coweight_examples():
    assert coweight(TriDegree(0, 0, 0)) == 0
    assert coweight(TriDegree(5, 3, 5)) == 0
    assert coweight(TriDegree(2, 0, 5)) == -3


def test_degree_arithmetic_componentwise():
    a, b = TriDegree(3, 1, 2), TriDegree(-1, 0, -1)
    assert a + b == TriDegree(2, 1, 1)
    assert a.scale(3) == TriDegree(9, 3, 6)


def test_coweight_additive_and_commutative():
    rng = random.Random(11)
    for _ in range(200):
        a = TriDegree(rng.randint(-9, 9), rng.randint(0, 9), rng.randint(-9, 9))
        b = TriDegree(rng.randint(-9, 9), rng.randint(0, 9), rng.randint(-9, 9))
        c = TriDegree(rng.randint(-9, 9), rng.randint(0, 9), rng.randint(-9, 9))
        assert a + b == b + a
        assert (a + b) + c == a + (b + c)
        assert coweight(a + b) == coweight(a) + coweight(b)


def test_negative_filtration_rejected_for_classes():
    with pytest.raises(ValueError):
        TriDegree(0, -1, 0).require_filtration()
    # shift vectors may carry f = -1
    assert TriDegree(1, -1, 1).f == -1


def test_differential_shift():
    assert DIFFERENTIAL_SHIFT == TriDegree(-1, 1, 0)
    assert coweight(TriDegree(4, 4, 4) + DIFFERENTIAL_SHIFT) == -1


def test_window_stores_and_asserts():
    w = Window(max_stem=10, stem_pad=2, coweight_pad=1)
    assert w.stores(TriDegree(12, 3, 12))
    assert not w.asserts(TriDegree(12, 3, 12))
    assert w.asserts(TriDegree(5, 3, 5))
    assert w.stores(TriDegree(4, 1, 7))  # coweight -3 padding row
    assert not w.asserts(TriDegree(4, 1, 7))
    assert w.near_boundary(TriDegree(10, 3, 10), reach=1)
