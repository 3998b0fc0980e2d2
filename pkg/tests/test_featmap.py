import math
import random

import pytest

from lifegrid.errors import EmptyInput, OutOfBounds
from lifegrid.featmap import (
    MapCoord,
    build_level0,
    build_pyramid,
    locate,
    snake_positions,
    spiral_order,
)


# --- level 0 -----------------------------------------------------------------

def test_level0_single_segment():
    lvl = build_level0([7], [0.5])
    assert (lvl.rows, lvl.cols) == (1, 1)
    assert lvl.cells == (7,)


def test_level0_five_segments_snake_layout():
    # ids a..e with scores 0.5, 0.1, 0.9, 0.3, 0.7 -> sorted b, d, a, e, c
    ids = [1, 2, 3, 4, 5]
    scores = [0.5, 0.1, 0.9, 0.3, 0.7]
    lvl = build_level0(ids, scores)
    assert (lvl.rows, lvl.cols) == (2, 3)
    # row 0 left-to-right: b, d, a; row 1 holds e at (1,2), c at (1,1), empty at (1,0)
    assert lvl.cells == (2, 4, 1, None, 3, 5)


def test_level0_ties_break_by_segment_id():
    lvl = build_level0([30, 10, 20], [0.5, 0.5, 0.5])
    snake = [lvl.at(r, c)[0] for r, c in snake_positions(lvl.rows, lvl.cols)]
    assert [s for s in snake if s is not None] == [10, 20, 30]


def test_level0_empty_input():
    with pytest.raises(EmptyInput):
        build_level0([], [])


def test_level0_contains_every_segment_once():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randrange(1, 200)
        ids = rng.sample(range(10000), n)
        scores = [rng.random() for _ in range(n)]
        lvl = build_level0(ids, scores)
        placed = [c for c in lvl.cells if c is not None]
        assert sorted(placed) == sorted(ids)
        # empties only in the trailing snake positions
        snake = [lvl.at(r, c)[0] for r, c in snake_positions(lvl.rows, lvl.cols)]
        assert all(s is None for s in snake[n:])


def test_snake_monotone_scores():
    rng = random.Random(4)
    n = 150
    ids = list(range(n))
    scores = [round(rng.random(), 2) for _ in range(n)]
    lvl = build_level0(ids, scores)
    by_id = dict(zip(ids, scores))
    seq = [by_id[s] for r, c in snake_positions(lvl.rows, lvl.cols)
           for s in [lvl.at(r, c)[0]] if s is not None]
    assert all(a <= b for a, b in zip(seq, seq[1:]))


# --- pyramid ------------------------------------------------------------------

def test_pyramid_8x8_single_level():
    lvl = build_level0(list(range(64)), [i / 64 for i in range(64)])
    assert (lvl.rows, lvl.cols) == (8, 8)
    assert len(build_pyramid(lvl, viewport=8).levels) == 1


def test_pyramid_32x32_has_three_levels():
    lvl = build_level0(list(range(1024)), [i / 1024 for i in range(1024)])
    assert (lvl.rows, lvl.cols) == (32, 32)
    pyr = build_pyramid(lvl, viewport=8)
    assert len(pyr.levels) == 3
    assert [(l.rows, l.cols) for l in pyr.levels] == [(32, 32), (16, 16), (8, 8)]


def test_pyramid_block_representative_is_lower_median():
    # one 2x2 block with scores 0.1, 0.2, 0.3, 0.4 -> representative 0.2
    lvl = build_level0([1, 2, 3, 4], [0.1, 0.2, 0.3, 0.4])
    assert (lvl.rows, lvl.cols) == (2, 2)
    pyr = build_pyramid(lvl, viewport=1)
    top = pyr.levels[-1]
    assert (top.rows, top.cols) == (1, 1)
    assert top.scores[0] == pytest.approx(0.2)
    assert top.cells[0] == 2


def test_pyramid_representative_tie_breaks_by_id():
    lvl = build_level0([40, 10, 30, 20], [0.5, 0.5, 0.5, 0.5])
    pyr = build_pyramid(lvl, viewport=1)
    # all scores equal: lower median of 4 sorted by (score, id) is the 2nd -> id 20
    assert pyr.levels[-1].cells[0] == 20


def test_pyramid_ancestry_property():
    rng = random.Random(9)
    n = 300
    lvl = build_level0(list(range(n)), [rng.random() for _ in range(n)])
    pyr = build_pyramid(lvl, viewport=4)
    for upper_idx in range(1, len(pyr.levels)):
        upper, lower = pyr.levels[upper_idx], pyr.levels[upper_idx - 1]
        for i in range(upper.rows):
            for j in range(upper.cols):
                seg, _ = upper.at(i, j)
                if seg is None:
                    continue
                block = [lower.at(r, c)[0]
                         for r in (2 * i, 2 * i + 1) for c in (2 * j, 2 * j + 1)
                         if r < lower.rows and c < lower.cols]
                assert seg in block


def test_pyramid_level_count_formula_power_of_two():
    for n_side, viewport in ((8, 8), (16, 8), (32, 8), (64, 8), (16, 4)):
        n = n_side * n_side
        lvl = build_level0(list(range(n)), [i / n for i in range(n)])
        pyr = build_pyramid(lvl, viewport=viewport)
        expected = max(1, 1 + math.ceil(math.log2(n_side / viewport))) if n_side > viewport else 1
        assert len(pyr.levels) == expected


# --- locate ---------------------------------------------------------------------

def test_locate_examples():
    lvl = build_level0([1], [0.0])
    pyr = build_pyramid(lvl)
    assert locate(pyr, MapCoord(0, 0, 0)) == (0.5, 0.5)

    lvl = build_level0(list(range(16)), [i / 16 for i in range(16)])  # 4x4
    pyr = build_pyramid(lvl)
    for r in range(4):
        assert locate(pyr, MapCoord(0, r, 0))[0] == 0.125

    lvl = build_level0(list(range(64)), [i / 64 for i in range(64)])  # 8x8
    pyr = build_pyramid(lvl)
    assert locate(pyr, MapCoord(0, 3, 5)) == (0.6875, 0.4375)


def test_locate_out_of_bounds():
    pyr = build_pyramid(build_level0([1], [0.0]))
    with pytest.raises(OutOfBounds):
        locate(pyr, MapCoord(0, 1, 0))
    with pytest.raises(OutOfBounds):
        locate(pyr, MapCoord(5, 0, 0))


# --- spiral ---------------------------------------------------------------------

def test_spiral_examples():
    assert spiral_order(1, 1) == [(0, 0)]
    assert spiral_order(2, 2) == [(0, 0), (0, 1), (1, 1), (1, 0)]
    assert spiral_order(3, 3) == [(1, 1), (1, 2), (2, 2), (2, 1), (2, 0),
                                  (1, 0), (0, 0), (0, 1), (0, 2)]


def test_spiral_is_permutation_up_to_20():
    for rows in range(1, 21):
        for cols in range(1, 21):
            walk = spiral_order(rows, cols)
            assert len(walk) == rows * cols
            assert set(walk) == {(r, c) for r in range(rows) for c in range(cols)}


def test_spiral_starts_at_center():
    assert spiral_order(5, 9)[0] == (2, 4)
    assert spiral_order(4, 4)[0] == (1, 1)
