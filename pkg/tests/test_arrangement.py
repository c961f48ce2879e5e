import random
from fractions import Fraction as Fr

import pytest

from cantor_avoid.arrangement import (
    ADMISSIBILITY_LINES,
    CutLine,
    ParamRect,
    cut_lines,
    face_samples,
    sign_vector,
)
from cantor_avoid.cantor import TERNARY, endpoints

from oracles import dense_points, face_verdicts_agree, random_instance

UNIT = ParamRect(Fr(0), Fr(1), Fr(1, 2), Fr(1))


def test_no_lines_gives_one_sample_at_center():
    (s,) = face_samples([], UNIT)
    assert (s.x, s.t) == (Fr(1, 2), Fr(3, 4))


def test_one_line_splits_the_box():
    line = CutLine(Fr(1, 2), Fr(3, 4))
    samples = face_samples([line], UNIT)
    assert len(samples) == 2
    assert {line.side(s.x, s.t) for s in samples} == {-1, 1}


def test_vertical_line():
    samples = face_samples([CutLine(Fr(0), Fr(1, 4))], UNIT)
    assert sorted(s.x < Fr(1, 4) for s in samples) == [False, True]


def test_product_bound_on_line_count():
    pts = endpoints(TERNARY, 1).points
    grid = [Fr(0), Fr(1, 2), Fr(1)]
    wide = ParamRect(Fr(-2), Fr(2), Fr(1, 100), Fr(3))
    slanted = [ln for ln in cut_lines(pts, grid, wide, include_admissibility=False)]
    assert len(slanted) <= len(pts) * len(grid)
    assert len(cut_lines(pts, grid, wide)) <= len(pts) * len(grid) + len(ADMISSIBILITY_LINES)


def test_lines_missing_the_box_are_dropped():
    rect = ParamRect(Fr(0), Fr(1, 10), Fr(1, 2), Fr(6, 10))
    lines = cut_lines([Fr(1)], [Fr(0), Fr(1, 2), Fr(2)], rect, include_admissibility=False)
    assert lines == [CutLine(Fr(1), Fr(1, 2))]


def test_three_line_count_matches_grid_detection():
    rect = ParamRect(Fr(0), Fr(1), Fr(1, 2), Fr(1))
    lines = cut_lines([Fr(0), Fr(1, 3), Fr(1)], [Fr(1, 4), Fr(5, 4), Fr(3)], rect, include_admissibility=False)
    candidates = [CutLine(a, b) for a in (Fr(0), Fr(1, 3), Fr(1)) for b in (Fr(1, 4), Fr(5, 4), Fr(3))]
    # a line crosses the open box iff the grid sees both of its sides
    crossing = [ln for ln in candidates
                if {ln.side(x, t) for x, t in dense_points(rect, 40)} == {-1, 1}]
    assert lines == crossing
    assert len(lines) == 4


def test_random_arrangements_each_face_once():
    rng = random.Random(1)
    for _ in range(60):
        lines = sorted({CutLine(Fr(rng.randint(0, 8), 8), Fr(rng.randint(0, 24), 16))
                        for _ in range(rng.randint(0, 6))})
        samples = face_samples(lines, UNIT)
        signs = [sign_vector(lines, s.x, s.t) for s in samples]
        assert all(sv is not None for sv in signs)
        assert len(set(signs)) == len(signs)
        for s in samples:
            assert UNIT.a < s.x < UNIT.b and UNIT.A < s.t < UNIT.B


def test_random_four_line_instance_matches_dense_grid():
    rng = random.Random(4)
    lines = sorted({CutLine(Fr(rng.randint(0, 8), 8), Fr(rng.randint(4, 20), 16)) for _ in range(4)})
    from_samples = {sign_vector(lines, s.x, s.t) for s in face_samples(lines, UNIT)}
    from_grid = {sign_vector(lines, x, t) for x, t in dense_points(UNIT, 100)}
    from_grid.discard(None)
    assert from_samples == from_grid


@pytest.mark.parametrize("seed", range(6))
def test_face_verdicts_match_dense_grid(seed):
    ok, faces, grid = face_verdicts_agree(*random_instance(random.Random(seed)), N=60)
    assert ok, (faces, grid)


def test_degenerate_rect_sweeps_segment():
    rect = ParamRect(Fr(1, 4), Fr(1, 4), Fr(1, 2), Fr(1))
    samples = face_samples([CutLine(Fr(1), Fr(1))], rect)
    assert len(samples) == 2
    assert all(s.x == Fr(1, 4) for s in samples)
    assert sorted(s.admissible for s in samples) == [False, True]


def test_rect_validation_and_negative_scales():
    with pytest.raises(ValueError):
        ParamRect(Fr(1), Fr(0), Fr(1), Fr(2))
    with pytest.raises(ValueError):
        ParamRect(Fr(0), Fr(1), Fr(0), Fr(1))
    with pytest.raises(ValueError):
        ParamRect.from_signed(Fr(0), Fr(1), Fr(-1), Fr(1))
    r = ParamRect.from_signed(Fr(1), Fr(2), Fr(-1), Fr(-1, 2))
    assert r == ParamRect(Fr(0), Fr(3, 2), Fr(1, 2), Fr(1))


def test_sign_vector_on_line_is_none():
    line = CutLine(Fr(1), Fr(1))
    assert sign_vector([line], Fr(1, 2), Fr(1, 2)) is None
    assert sign_vector([], Fr(1, 2), Fr(1, 2)) == ()
