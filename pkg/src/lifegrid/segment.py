"""Day segmentation: motion-score shot detection and uniform sampling.

The original system cut day videos with an optical-flow shot detector whose
internals are not public. This module uses a documented proxy instead: both
frames are box-resampled to a 32x32 luma grid and the motion score is the
mean absolute luma difference, scaled to [0, 1]. On imagery captured tens of
seconds apart true optical flow is ill-defined anyway; the proxy is monotone
in scene-change magnitude, which is all the detector needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import BadRate, EmptyDay
from .ingest import DayLog, Raster

Method = Literal["shot", "uniform"]
METHODS: tuple[Method, ...] = ("shot", "uniform")

LUMA_GRID = 32


@dataclass(frozen=True)
class Segment:
    """Contiguous frame range [start, end] of one day with a keyframe."""

    segment_id: int
    day_id: str
    start: int
    end: int  # inclusive
    keyframe: int
    method: Method

    def __post_init__(self):
        if not self.start <= self.keyframe <= self.end:
            raise ValueError(f"keyframe {self.keyframe} outside [{self.start}, {self.end}]")

    @property
    def length(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class SegmentationConfig:
    theta: float = 0.3
    min_len: int = 3
    uniform_rate: int = 10

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta {self.theta} outside (0, 1]")
        if self.min_len < 1:
            raise ValueError("min_len must be >= 1")
        if self.uniform_rate < 1:
            raise BadRate("uniform_rate must be >= 1")


def luma_grid(r: Raster, size: int = LUMA_GRID) -> np.ndarray:
    """Box-resample a raster to size x size and convert to luma.

    Each target cell averages the source box [floor(i*H/size),
    floor((i+1)*H/size)) x (same for columns); boxes that would be empty take
    the single pixel at their floor coordinate, so the function is total for
    any raster dimensions. Luma is (299R + 587G + 114B) / 1000.
    """
    arr = r.to_array().astype(np.float64)
    y = (299.0 * arr[:, :, 0] + 587.0 * arr[:, :, 1] + 114.0 * arr[:, :, 2]) / 1000.0
    h, w = y.shape
    # integral image for O(1) box sums
    integral = np.zeros((h + 1, w + 1))
    np.cumsum(np.cumsum(y, axis=0), axis=1, out=integral[1:, 1:])
    r0 = np.floor(np.arange(size) * h / size).astype(np.intp)
    r1 = np.maximum(r0 + 1, np.floor((np.arange(size) + 1) * h / size).astype(np.intp))
    c0 = np.floor(np.arange(size) * w / size).astype(np.intp)
    c1 = np.maximum(c0 + 1, np.floor((np.arange(size) + 1) * w / size).astype(np.intp))
    sums = (
        integral[np.ix_(r1, c1)]
        - integral[np.ix_(r0, c1)]
        - integral[np.ix_(r1, c0)]
        + integral[np.ix_(r0, c0)]
    )
    areas = np.outer(r1 - r0, c1 - c0).astype(np.float64)
    return sums / areas


def motion_score(a: Raster, b: Raster) -> float:
    """Scene-change score in [0, 1] between two rasters of any dimensions."""
    return motion_score_from_luma(luma_grid(a), luma_grid(b))


def motion_score_from_luma(la: np.ndarray, lb: np.ndarray) -> float:
    return float(np.mean(np.abs(la - lb)) / 255.0)


def day_motion_scores(day: DayLog) -> np.ndarray:
    """scores[i] = motion_score(frame i-1, frame i); length N-1."""
    if len(day) == 0:
        raise EmptyDay(f"day {day.day_id!r} has no frames")
    lumas = [luma_grid(r) for r in day.rasters]
    return np.array(
        [motion_score_from_luma(lumas[i - 1], lumas[i]) for i in range(1, len(lumas))]
    )


def select_keyframe(start: int, end: int) -> int:
    """Middle frame of the range; deterministic and never a boundary frame."""
    return (start + end) // 2


def shots_from_scores(
    scores: Sequence[float], n_frames: int, day_id: str,
    cfg: SegmentationConfig, id_start: int = 0,
) -> list[Segment]:
    """Apply the boundary rule to precomputed consecutive-pair scores.

    A boundary opens before frame i when scores[i-1] exceeds theta and the
    currently open shot already spans at least min_len frames.
    """
    if n_frames == 0:
        raise EmptyDay(f"day {day_id!r} has no frames")
    bounds = [0]
    for i in range(1, n_frames):
        if scores[i - 1] > cfg.theta and (i - bounds[-1]) >= cfg.min_len:
            bounds.append(i)
    segments = []
    for k, start in enumerate(bounds):
        end = (bounds[k + 1] - 1) if k + 1 < len(bounds) else n_frames - 1
        segments.append(
            Segment(segment_id=id_start + k, day_id=day_id, start=start,
                    end=end, keyframe=select_keyframe(start, end), method="shot")
        )
    return segments


def detect_shots(
    day: DayLog, cfg: SegmentationConfig = SegmentationConfig(), id_start: int = 0
) -> list[Segment]:
    """Segment a day by motion-score shot detection."""
    scores = day_motion_scores(day)
    return shots_from_scores(scores, len(day), day.day_id, cfg, id_start=id_start)


def uniform_segments(day: DayLog, rate: int = 10, id_start: int = 0) -> list[Segment]:
    """Segment a day into fixed-size runs; the last one holds the remainder."""
    if len(day) == 0:
        raise EmptyDay(f"day {day.day_id!r} has no frames")
    if rate < 1:
        raise BadRate(f"rate {rate} must be >= 1")
    segments = []
    for k, start in enumerate(range(0, len(day), rate)):
        end = min(start + rate - 1, len(day) - 1)
        segments.append(
            Segment(segment_id=id_start + k, day_id=day.day_id, start=start,
                    end=end, keyframe=select_keyframe(start, end),
                    method="uniform")
        )
    return segments
