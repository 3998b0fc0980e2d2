import random

import numpy as np
import pytest

from lifegrid.errors import BadRate, EmptyDay
from lifegrid.ingest import DayLog, FrameRecord, Raster
from lifegrid.segment import (
    SegmentationConfig,
    detect_shots,
    luma_grid,
    motion_score,
    select_keyframe,
    shots_from_scores,
    uniform_segments,
)
from lifegrid.synth import synthetic_day


def uniform_raster(value, w=8, h=8):
    return Raster.from_array(np.full((h, w, 3), value, dtype=np.uint8))


def day_from_rasters(rasters, day_id="d"):
    n = len(rasters)
    frames = tuple(FrameRecord(day_id=day_id, index=i, timestamp_utc=1000 + 40 * i,
                               tz_offset_min=0, image_path="x") for i in range(n))
    return DayLog(day_id=day_id, frames=frames, rasters=tuple(rasters),
                  sensors=(None,) * n, concepts=((),) * n, ocr=((),) * n)


# --- motion score -----------------------------------------------------------------

def test_motion_identical_is_zero():
    r = uniform_raster(77)
    assert motion_score(r, r) == 0.0


def test_motion_black_white_is_one():
    assert motion_score(uniform_raster(0), uniform_raster(255)) == 1.0


def test_motion_gray_100_vs_150():
    got = motion_score(uniform_raster(100), uniform_raster(150))
    assert got == pytest.approx(50 / 255, abs=1e-12)


def test_motion_handles_differing_dimensions():
    a = uniform_raster(100, w=3, h=50)
    b = uniform_raster(150, w=64, h=7)
    assert motion_score(a, b) == pytest.approx(50 / 255, abs=1e-12)


def test_motion_matches_brute_force_pixel_loop():
    rng = random.Random(4)
    arr_a = np.array([[rng.randrange(256) for _ in range(96)] for _ in range(32)],
                     dtype=np.uint8).reshape(32, 32, 3)
    arr_b = np.array([[rng.randrange(256) for _ in range(96)] for _ in range(32)],
                     dtype=np.uint8).reshape(32, 32, 3)
    a, b = Raster.from_array(arr_a), Raster.from_array(arr_b)
    # 32x32 inputs resample to themselves, so luma diff is directly checkable
    total = 0.0
    for y in range(32):
        for x in range(32):
            ya = (299 * int(arr_a[y, x, 0]) + 587 * int(arr_a[y, x, 1]) + 114 * int(arr_a[y, x, 2])) / 1000
            yb = (299 * int(arr_b[y, x, 0]) + 587 * int(arr_b[y, x, 1]) + 114 * int(arr_b[y, x, 2])) / 1000
            total += abs(ya - yb)
    assert motion_score(a, b) == pytest.approx(total / (32 * 32 * 255), rel=1e-12)


def test_luma_grid_box_average():
    arr = np.zeros((64, 64, 3), dtype=np.uint8)
    arr[:32] = 255  # top half white
    grid = luma_grid(Raster.from_array(arr))
    assert grid.shape == (32, 32)
    assert np.allclose(grid[:16], 255.0)
    assert np.allclose(grid[16:], 0.0)


# --- keyframe ----------------------------------------------------------------------

def test_select_keyframe():
    assert select_keyframe(0, 9) == 4
    assert select_keyframe(5, 5) == 5
    assert select_keyframe(10, 19) == 14


# --- uniform sampling -----------------------------------------------------------------

def test_uniform_23_frames_rate_10():
    day = day_from_rasters([uniform_raster(10)] * 23)
    segs = uniform_segments(day, 10)
    assert [(s.start, s.end) for s in segs] == [(0, 9), (10, 19), (20, 22)]
    assert [s.keyframe for s in segs] == [4, 14, 21]


def test_uniform_exact_fit():
    day = day_from_rasters([uniform_raster(10)] * 10)
    segs = uniform_segments(day, 10)
    assert [(s.start, s.end) for s in segs] == [(0, 9)]


def test_uniform_invariant_to_pixels():
    rng = random.Random(0)
    a = day_from_rasters([uniform_raster(rng.randrange(256)) for _ in range(37)])
    b = day_from_rasters([uniform_raster(0)] * 37)
    ranges = lambda segs: [(s.start, s.end, s.keyframe) for s in segs]
    assert ranges(uniform_segments(a, 7)) == ranges(uniform_segments(b, 7))


def test_uniform_errors():
    day = day_from_rasters([uniform_raster(1)])
    with pytest.raises(BadRate):
        uniform_segments(day, 0)
    empty = day_from_rasters([])
    with pytest.raises(EmptyDay):
        uniform_segments(empty, 10)


def test_uniform_segment_wall_clock_span_360s():
    # 40 s capture gaps, rate 10: full segments span 9 * 40 = 360 s
    day = day_from_rasters([uniform_raster(5)] * 30)
    for seg in uniform_segments(day, 10):
        span = day.frames[seg.end].timestamp_utc - day.frames[seg.start].timestamp_utc
        assert span == 360


# --- shot detection ------------------------------------------------------------------

def test_identical_frames_one_segment():
    day = day_from_rasters([uniform_raster(42)] * 20)
    segs = detect_shots(day)
    assert [(s.start, s.end) for s in segs] == [(0, 19)]


def test_detect_shots_recovers_planted_boundaries():
    rng = random.Random(123)
    day, planted = synthetic_day(rng, 60)
    segs = detect_shots(day)
    assert [s.start for s in segs[1:]] == planted


def test_alternating_frames_split_every_min_len():
    rasters = [uniform_raster(0 if i % 2 == 0 else 255) for i in range(11)]
    day = day_from_rasters(rasters)
    segs = detect_shots(day, SegmentationConfig(theta=0.3, min_len=3))
    assert [(s.start, s.end) for s in segs] == [(0, 2), (3, 5), (6, 8), (9, 10)]


def test_scan_rule_against_manual_simulation():
    # independent simulation of the boundary rule on a score sequence
    rng = random.Random(9)
    for _ in range(50):
        n = rng.randrange(1, 40)
        scores = [rng.random() for _ in range(n - 1)]
        cfg = SegmentationConfig(theta=0.5, min_len=rng.randrange(1, 5))
        segs = shots_from_scores(scores, n, "d", cfg)
        bounds, last = [0], 0
        for i in range(1, n):
            if scores[i - 1] > cfg.theta and i - last >= cfg.min_len:
                bounds.append(i)
                last = i
        assert [s.start for s in segs] == bounds
        assert segs[-1].end == n - 1


def test_theta_above_one_yields_single_segment():
    rng = random.Random(5)
    day, _ = synthetic_day(rng, 30)
    segs = detect_shots(day, SegmentationConfig(theta=1.0, min_len=1))
    # max possible score is 1.0, never strictly above theta=1.0
    assert [(s.start, s.end) for s in segs] == [(0, 29)]


def test_min_len_one_theta_tiny_splits_every_change():
    rasters = [uniform_raster(v) for v in (0, 255, 0, 255)]
    day = day_from_rasters(rasters)
    segs = detect_shots(day, SegmentationConfig(theta=1e-9, min_len=1))
    assert [(s.start, s.end) for s in segs] == [(0, 0), (1, 1), (2, 2), (3, 3)]


def test_empty_day_rejected():
    with pytest.raises(EmptyDay):
        detect_shots(day_from_rasters([]))


# --- partition properties ----------------------------------------------------------------

def _assert_partition(segs, n):
    assert segs[0].start == 0
    assert segs[-1].end == n - 1
    for a, b in zip(segs, segs[1:]):
        assert b.start == a.end + 1
    for s in segs:
        assert s.start <= s.keyframe <= s.end


def test_partition_property_random_days():
    rng = random.Random(77)
    for _ in range(40):
        n = rng.randrange(1, 80)
        day, _ = synthetic_day(rng, n, width=8, height=6)
        _assert_partition(detect_shots(day), n)
        _assert_partition(uniform_segments(day, rng.randrange(1, 12)), n)


def test_min_shot_length_property():
    rng = random.Random(13)
    for _ in range(25):
        n = rng.randrange(3, 60)
        day, _ = synthetic_day(rng, n, min_run=1, max_run=5)
        cfg = SegmentationConfig(theta=0.3, min_len=3)
        segs = detect_shots(day, cfg)
        for s in segs[:-1]:
            assert s.length >= cfg.min_len
