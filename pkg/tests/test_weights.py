"""Coordinate conversions, validation and support enumeration."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from limitlab.weights import (
    ACoordinates,
    AlgebraConfig,
    DynkinLabels,
    EnumerationCapError,
    OrthogonalWeight,
    WeightError,
    acoords_to_dynkin,
    acoords_to_orthogonal,
    candidate_count,
    check_config_match,
    dynkin_to_acoords,
    dynkin_to_orthogonal,
    enumerate_candidates,
    enumerate_support,
    orthogonal_to_dynkin,
    parse_int_list,
    weight_from_json,
    weight_to_json,
)

labels_st = st.lists(st.integers(0, 9), min_size=1, max_size=7).map(tuple)


def test_dynkin_to_orthogonal_examples():
    w = dynkin_to_orthogonal(DynkinLabels((2, 2, 0, 1, 2)))
    assert w.values == (6, 4, 2, 2, 1)
    assert dynkin_to_orthogonal(DynkinLabels((0, 0, 0))).values == (0, 0, 0)
    assert dynkin_to_orthogonal(DynkinLabels((0, 1))).values == (Fraction(1, 2), Fraction(1, 2))


def test_orthogonal_to_dynkin_examples():
    assert orthogonal_to_dynkin(OrthogonalWeight((12, 8, 4, 4, 2))).l == (2, 2, 0, 1, 2)
    assert orthogonal_to_dynkin(OrthogonalWeight((0, 0, 0, 0))).l == (0, 0, 0, 0)
    assert orthogonal_to_dynkin(OrthogonalWeight((2, 0))).l == (1, 0)


def test_orthogonal_rejects_invalid():
    with pytest.raises(WeightError):
        OrthogonalWeight((2, 4))  # not dominant
    with pytest.raises(WeightError):
        OrthogonalWeight((3, 2))  # mixed integer and half-integer entries
    with pytest.raises(WeightError):
        OrthogonalWeight((2, -2))


def test_acoords_examples():
    assert dynkin_to_acoords(DynkinLabels((0, 0, 0)), AlgebraConfig(3, 2)).a == (5, 3, 1)
    assert dynkin_to_acoords(DynkinLabels((2, 2, 0, 1, 2)), AlgebraConfig(5, 2)).a == (21, 15, 9, 7, 3)
    assert dynkin_to_acoords(DynkinLabels((0, 1)), AlgebraConfig(2, 1)).a == (4, 2)
    assert acoords_to_dynkin(ACoordinates((5, 3, 1)), AlgebraConfig(3, 2)).l == (0, 0, 0)
    assert acoords_to_dynkin(ACoordinates((21, 15, 9, 7, 3)), AlgebraConfig(5, 2)).l == (2, 2, 0, 1, 2)


def test_acoords_via_orthogonal():
    w = dynkin_to_orthogonal(DynkinLabels((2, 2, 0, 1, 2)))
    n = 5
    assert tuple(w.x2[i] + 2 * (n - 1 - i) + 1 for i in range(n)) == (21, 15, 9, 7, 3)


@pytest.mark.parametrize("bad", [(4, 2, 1), (3, 3, 1), (1, 3), (3, 1, -1), (2, 0)])
def test_acoords_rejects(bad):
    with pytest.raises(WeightError):
        ACoordinates(bad)


def test_parity_mismatch_against_config():
    # N even forces odd a-coordinates
    with pytest.raises(WeightError):
        check_config_match(ACoordinates((4, 2)), AlgebraConfig(2, 2))
    check_config_match(ACoordinates((4, 2)), AlgebraConfig(2, 1))
    with pytest.raises(WeightError):
        check_config_match(ACoordinates((5, 3, 1)), AlgebraConfig(2, 2))


@settings(max_examples=200, deadline=None)
@given(labels_st)
def test_round_trip_dynkin_orthogonal(labels):
    d = DynkinLabels(labels)
    assert orthogonal_to_dynkin(dynkin_to_orthogonal(d)) == d


@settings(max_examples=200, deadline=None)
@given(labels_st, st.integers(0, 3))
def test_round_trip_dynkin_acoords(labels, k):
    n = len(labels)
    # a_n = l_n + 1, and the parity of a is (N + 1) mod 2
    N = 2 * k + (1 if labels[-1] % 2 else 2)
    config = AlgebraConfig(n, N)
    a = dynkin_to_acoords(DynkinLabels(labels), config)
    assert all(x - y >= 2 for x, y in zip(a.a, a.a[1:]))
    assert acoords_to_dynkin(a, config) == DynkinLabels(labels)
    assert acoords_to_orthogonal(a) == dynkin_to_orthogonal(DynkinLabels(labels))


def test_config_quantities():
    cfg = AlgebraConfig(20, 200)
    assert cfg.cone == 239
    assert cfg.c_n == Fraction(239, 20)
    assert cfg.c_caption == 12
    assert cfg.parity == 1
    assert AlgebraConfig(3, 4).empty_acoords().a == (5, 3, 1)
    assert AlgebraConfig(3, 5).empty_acoords().a == (6, 4, 2)
    with pytest.raises(WeightError):
        AlgebraConfig(0, 3)


@pytest.mark.parametrize("n,N,expected", [
    (2, 2, [(3, 1), (5, 1), (5, 3)]),
    (1, 1, [(2,)]),
    (2, 1, [(4, 2)]),
    (1, 2, [(1,), (3,)]),
])
def test_enumerate_support_examples(n, N, expected):
    assert [a.a for a in enumerate_support(AlgebraConfig(n, N))] == expected


@pytest.mark.parametrize("n,N", [(n, N) for n in range(1, 4) for N in range(1, 9)])
def test_parity_law_and_order(n, N):
    support = [a.a for a in enumerate_support(AlgebraConfig(n, N))]
    assert support == sorted(support)
    assert all(v % 2 != N % 2 for a in support for v in a)
    assert all(x - y >= 2 for a in support for x, y in zip(a, a[1:]))
    assert len(list(enumerate_candidates(AlgebraConfig(n, N)))) == candidate_count(AlgebraConfig(n, N))


def test_enumeration_cap():
    config = AlgebraConfig(6, 30)
    assert candidate_count(config) > 1000
    with pytest.raises(EnumerationCapError):
        list(enumerate_support(config, cap=1000))


def test_json_round_trip():
    config = AlgebraConfig(5, 2)
    a = ACoordinates((21, 15, 9, 7, 3))
    obj = weight_to_json(a, config)
    assert obj == {"n": 5, "N": 2, "dynkin": [2, 2, 0, 1, 2],
                   "orthogonal_x2": [12, 8, 4, 4, 2], "a": [21, 15, 9, 7, 3]}
    assert weight_from_json(obj) == (config, a)
    obj["dynkin"] = [2, 2, 0, 1, 3]
    with pytest.raises(WeightError):
        weight_from_json(obj)


def test_parse_int_list():
    assert parse_int_list("4, 2") == (4, 2)
    with pytest.raises(WeightError):
        parse_int_list("4,x")
