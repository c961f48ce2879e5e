from fractions import Fraction as Fr

import pytest

from cantor_avoid.cantor import TERNARY, generation
from cantor_avoid.intervals import (
    DegenerateMapError,
    Interval,
    IntervalSet,
    MalformedIntervalError,
    affine_image,
    as_rational,
    component_containing,
    contains_point,
    format_rational,
    measure,
    normalize,
)


def S(*pairs):
    return IntervalSet([(Fr(a), Fr(b)) for a, b in pairs])


def test_normalize_disjoint_unchanged():
    s = normalize([(Fr(0), Fr(1, 3)), (Fr(2, 3), Fr(1))])
    assert [(iv.lo, iv.hi) for iv in s] == [(0, Fr(1, 3)), (Fr(2, 3), 1)]


def test_normalize_touching_merges():
    assert normalize([(Fr(0), Fr(1, 2)), (Fr(1, 2), Fr(1))]) == S((0, 1))


def test_normalize_overlap_merges():
    assert normalize([(Fr(0), Fr(2, 3)), (Fr(1, 3), Fr(1))]) == S((0, 1))


def test_normalize_unsorted_and_nested():
    s = normalize([(Fr(1, 2), Fr(1)), (Fr(0), Fr(1, 4)), (Fr(3, 5), Fr(7, 10))])
    assert s == S((0, Fr(1, 4)), (Fr(1, 2), 1))


def test_malformed_interval_rejected():
    with pytest.raises(MalformedIntervalError):
        Interval(Fr(1), Fr(0))
    with pytest.raises(MalformedIntervalError):
        normalize([(Fr(1, 2), Fr(1, 3))])


def test_measure_examples():
    assert measure(S((0, Fr(1, 3)), (Fr(2, 3), 1))) == Fr(2, 3)
    assert measure(S((0, 1))) == 1
    assert measure(IntervalSet.empty()) == 0
    assert measure(generation(TERNARY, 2)) == Fr(4, 9)


def test_affine_image_examples():
    assert affine_image(S((0, 1)), Fr(1, 2), Fr(1, 4)) == S((Fr(1, 2), Fr(3, 4)))
    c1 = S((0, Fr(1, 3)), (Fr(2, 3), 1))
    assert affine_image(c1, 0, 1) == c1
    assert affine_image(c1, 1, -1) == c1


def test_affine_image_zero_scale():
    with pytest.raises(DegenerateMapError):
        affine_image(S((0, 1)), 0, 0)


def test_contains_point_examples():
    s = S((0, Fr(1, 3)))
    assert contains_point(s, Fr(1, 3))
    assert not contains_point(s, Fr(1, 2))
    assert not contains_point(IntervalSet.empty(), 0)
    assert not contains_point(s, Fr(-1, 10))


def test_component_containing_examples():
    s = S((0, Fr(1, 3)), (Fr(2, 3), 1))
    assert component_containing(s, Interval(Fr(1, 10), Fr(1, 5))) == Interval(Fr(0), Fr(1, 3))
    assert component_containing(s, Interval(Fr(3, 10), Fr(7, 10))) is None
    assert component_containing(S((0, Fr(1, 7))), Interval(Fr(0), Fr(1, 10))) == Interval(Fr(0), Fr(1, 7))


def test_endpoints_and_point_intervals():
    s = S((0, 0), (Fr(1, 2), 1))
    assert s.endpoints() == [0, Fr(1, 2), 1]


def test_issubset():
    assert S((Fr(1, 9), Fr(2, 9))).issubset(S((0, Fr(1, 3))))
    assert not S((Fr(1, 4), Fr(1, 2))).issubset(S((0, Fr(1, 3)), (Fr(2, 5), 1)))


def test_json_round_trip():
    s = S((0, Fr(1, 7)), (Fr(2, 7), Fr(3, 7)))
    assert s.to_json() == [["0/1", "1/7"], ["2/7", "3/7"]]
    assert IntervalSet.from_json(s.to_json()) == s


def test_rationals_are_exact_only():
    assert as_rational("3/6") == Fr(1, 2)
    assert format_rational(Fr(2, 4)) == "1/2"
    assert format_rational(Fr(3)) == "3/1"
    for bad in ("0.5", "1e-3", ""):
        with pytest.raises(ValueError):
            as_rational(bad)
    with pytest.raises(TypeError):
        as_rational(0.5)
