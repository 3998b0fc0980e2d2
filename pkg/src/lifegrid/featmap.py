"""Hierarchical 2D keyframe grids: snake-ordered layout, zoom pyramid,
minimap coordinates and the spiral autopilot walk.

Level 0 lays all segments out in a near-square grid, sorted by criterion
score and snake-ordered so the 1D sort stays spatially local. Each coarser
level downsamples 2x2 blocks, keeping the block's lower-median cell, until
the grid fits the viewport.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptyInput, OutOfBounds


@dataclass(frozen=True)
class GridLevel:
    rows: int
    cols: int
    cells: tuple[Optional[int], ...]  # row-major segment ids, None = empty
    scores: tuple[float, ...]         # parallel; 0.0 for empty cells

    def at(self, row: int, col: int) -> tuple[Optional[int], float]:
        return self.cells[row * self.cols + col], self.scores[row * self.cols + col]


@dataclass(frozen=True)
class FeatureMapPyramid:
    criterion: str
    levels: tuple[GridLevel, ...]  # levels[0] is the finest
    viewport: int


@dataclass(frozen=True)
class MapCoord:
    level: int
    row: int
    col: int


def snake_positions(rows: int, cols: int):
    """Yield (row, col) in snake order: even rows left to right, odd rows
    right to left."""
    for r in range(rows):
        cs = range(cols) if r % 2 == 0 else range(cols - 1, -1, -1)
        for c in cs:
            yield r, c


def build_level0(segment_ids: Sequence[int], scores: Sequence[float]) -> GridLevel:
    """Sort segments by (score, id) and place them snake-wise in a
    near-square grid; trailing positions stay empty."""
    n = len(segment_ids)
    if n == 0 or n != len(scores):
        raise EmptyInput("need at least one segment with a matching score")
    order = sorted(range(n), key=lambda i: (scores[i], segment_ids[i]))
    cols = math.isqrt(n)
    if cols * cols < n:
        cols += 1
    rows = (n + cols - 1) // cols
    cells: list[Optional[int]] = [None] * (rows * cols)
    cell_scores = [0.0] * (rows * cols)
    for k, (r, c) in enumerate(snake_positions(rows, cols)):
        if k >= n:
            break
        cells[r * cols + c] = segment_ids[order[k]]
        cell_scores[r * cols + c] = scores[order[k]]
    return GridLevel(rows=rows, cols=cols, cells=tuple(cells), scores=tuple(cell_scores))


def _downsample(level: GridLevel) -> GridLevel:
    rows = (level.rows + 1) // 2
    cols = (level.cols + 1) // 2
    cells: list[Optional[int]] = [None] * (rows * cols)
    scores = [0.0] * (rows * cols)
    for i in range(rows):
        for j in range(cols):
            block = []
            for r in (2 * i, 2 * i + 1):
                for c in (2 * j, 2 * j + 1):
                    if r < level.rows and c < level.cols:
                        seg, score = level.at(r, c)
                        if seg is not None:
                            block.append((score, seg))
            if block:
                block.sort()
                score, seg = block[(len(block) - 1) // 2]  # lower median
                cells[i * cols + j] = seg
                scores[i * cols + j] = score
    return GridLevel(rows=rows, cols=cols, cells=tuple(cells), scores=tuple(scores))


def build_pyramid(level0: GridLevel, criterion: str = "", viewport: int = 8) -> FeatureMapPyramid:
    """Stack 2x downsampled levels until the top fits the viewport."""
    levels = [level0]
    while levels[-1].rows > viewport or levels[-1].cols > viewport:
        levels.append(_downsample(levels[-1]))
    return FeatureMapPyramid(criterion=criterion, levels=tuple(levels), viewport=viewport)


def locate(pyramid: FeatureMapPyramid, coord: MapCoord) -> tuple[float, float]:
    """Cell center in level-relative unit space, as (x, y).

    The same (x, y) denotes the same map region at every level, so a minimap
    marker computed from it is stable across zooms.
    """
    if not 0 <= coord.level < len(pyramid.levels):
        raise OutOfBounds(f"level {coord.level} outside pyramid")
    level = pyramid.levels[coord.level]
    if not (0 <= coord.row < level.rows and 0 <= coord.col < level.cols):
        raise OutOfBounds(
            f"cell ({coord.row}, {coord.col}) outside {level.rows}x{level.cols} level"
        )
    return (coord.col + 0.5) / level.cols, (coord.row + 0.5) / level.rows


def spiral_order(rows: int, cols: int) -> list[tuple[int, int]]:
    """Spiral walk over the grid, starting at the center cell and expanding
    outward in run lengths 1,1,2,2,3,3,... (right, down, left, up).
    Coordinates outside the grid are skipped; every cell appears exactly once.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid must be at least 1x1")
    r, c = (rows - 1) // 2, (cols - 1) // 2
    total = rows * cols
    out = [(r, c)]
    directions = [(0, 1), (1, 0), (0, -1), (-1, 0)]  # right, down, left, up
    run = 1
    d = 0
    while len(out) < total:
        for _ in range(2):
            dr, dc = directions[d]
            for _ in range(run):
                r += dr
                c += dc
                if 0 <= r < rows and 0 <= c < cols:
                    out.append((r, c))
            d = (d + 1) % 4
        run += 1
    return out
