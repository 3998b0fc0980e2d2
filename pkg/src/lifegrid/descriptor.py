"""Spatial color descriptors, feature-map criterion scores, vector handling.

The keyframe descriptor is a G x G grid of per-cell color histograms over a
fixed 16-color palette; the same structure with a cell mask serves as the
sketch query representation (blank sketch cells are excluded from matching).
G and the palette are fixed constants: changing either changes the on-disk
descriptor format version.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AllBlank,
    EmptyMask,
    RasterTooSmall,
    UnknownConcept,
    ZeroVector,
)
from .ingest import ConceptTaxonomy, DayLog, Raster
from .segment import Segment, day_motion_scores

GRID = 4  # cells per side
PALETTE_SIZE = 16

# index -> (name, rgb); the UI sketch palette is exactly this set
PALETTE: list[tuple[str, tuple[int, int, int]]] = [
    ("black", (0, 0, 0)),
    ("white", (255, 255, 255)),
    ("gray", (128, 128, 128)),
    ("silver", (192, 192, 192)),
    ("red", (255, 0, 0)),
    ("maroon", (128, 0, 0)),
    ("yellow", (255, 255, 0)),
    ("olive", (128, 128, 0)),
    ("lime", (0, 255, 0)),
    ("green", (0, 128, 0)),
    ("cyan", (0, 255, 255)),
    ("teal", (0, 128, 128)),
    ("blue", (0, 0, 255)),
    ("navy", (0, 0, 128)),
    ("magenta", (255, 0, 255)),
    ("purple", (128, 0, 128)),
]

PALETTE_RGB = np.array([rgb for _, rgb in PALETTE], dtype=np.float64)

PALETTE_INDEX = {name: i for i, (name, _) in enumerate(PALETTE)}


@dataclass(frozen=True)
class HistMap:
    """G x G grid of palette histograms; each cell sums to 1."""

    cells: np.ndarray  # shape (GRID, GRID, PALETTE_SIZE)

    def flat(self) -> np.ndarray:
        return self.cells.reshape(-1)


@dataclass(frozen=True)
class SketchHistMap:
    histmap: HistMap
    mask: np.ndarray  # (GRID, GRID) bool; True = painted


FULL_MASK = np.ones((GRID, GRID), dtype=bool)


def quantize(r: Raster) -> np.ndarray:
    """Map every pixel to its nearest palette index (squared RGB distance,
    ties to the lowest index)."""
    arr = r.to_array().astype(np.float64)
    d = ((arr[:, :, None, :] - PALETTE_RGB[None, None, :, :]) ** 2).sum(axis=-1)
    return d.argmin(axis=-1)


def compute_histmap(r: Raster) -> HistMap:
    """Palette-quantize a raster and histogram it per grid cell."""
    if r.width < GRID or r.height < GRID:
        raise RasterTooSmall(f"raster {r.width}x{r.height} smaller than {GRID}x{GRID}")
    q = quantize(r)
    h, w = q.shape
    cells = np.zeros((GRID, GRID, PALETTE_SIZE))
    for i in range(GRID):
        y0, y1 = i * h // GRID, (i + 1) * h // GRID
        for j in range(GRID):
            x0, x1 = j * w // GRID, (j + 1) * w // GRID
            block = q[y0:y1, x0:x1]
            counts = np.bincount(block.ravel(), minlength=PALETTE_SIZE)
            cells[i, j] = counts / block.size
    return HistMap(cells=cells)


def histmap_distance(a: HistMap, b: HistMap, mask: Optional[np.ndarray] = None) -> float:
    """Mean over masked cells of the per-cell total-variation distance."""
    if mask is None:
        mask = FULL_MASK
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyMask("mask selects no cells")
    diff = np.abs(a.cells - b.cells).sum(axis=-1) * 0.5
    return float(diff[mask].mean())


def sketch_to_histmap(canvas: Sequence[Sequence[Optional[int]]]) -> SketchHistMap:
    """Turn a G x G canvas of palette indices (None = blank) into a query."""
    cells = np.zeros((GRID, GRID, PALETTE_SIZE))
    mask = np.zeros((GRID, GRID), dtype=bool)
    for i in range(GRID):
        for j in range(GRID):
            p = canvas[i][j]
            if p is None:
                continue
            if not 0 <= p < PALETTE_SIZE:
                raise ValueError(f"palette index {p} outside 0..{PALETTE_SIZE - 1}")
            cells[i, j, p] = 1.0
            mask[i, j] = True
    if not mask.any():
        raise AllBlank("sketch has no painted cells")
    return SketchHistMap(histmap=HistMap(cells=cells), mask=mask)


# --- scalar criterion scores ---------------------------------------------------

BASE_CRITERIA = ("color", "edge", "motion")


def mean_hue(r: Raster) -> float:
    """Hue angle of the raster's mean RGB, normalized to [0, 1).

    Achromatic means (max channel == min channel) map to 0 so the sort key
    is total.
    """
    mean = r.to_array().reshape(-1, 3).mean(axis=0)
    red, green, blue = (float(c) for c in mean)
    hi, lo = max(red, green, blue), min(red, green, blue)
    c = hi - lo
    if c == 0.0:
        return 0.0
    if hi == red:
        h = ((green - blue) / c) % 6.0
    elif hi == green:
        h = (blue - red) / c + 2.0
    else:
        h = (red - green) / c + 4.0
    return h * 60.0 / 360.0


def edge_score(r: Raster) -> float:
    """Mean luma gradient magnitude, normalized to [0, 1].

    Horizontal and vertical neighbor differences are zero-padded at the
    right/bottom border, so a uniform raster scores exactly 0.
    """
    arr = r.to_array().astype(np.float64)
    y = (299.0 * arr[:, :, 0] + 587.0 * arr[:, :, 1] + 114.0 * arr[:, :, 2]) / 1000.0
    dx = np.zeros_like(y)
    dy = np.zeros_like(y)
    dx[:, :-1] = np.abs(np.diff(y, axis=1))
    dy[:-1, :] = np.abs(np.diff(y, axis=0))
    return float((dx + dy).mean() / (2.0 * 255.0))


def concept_score(
    seg: Segment, concept_id: str, day: DayLog, taxonomy: ConceptTaxonomy,
    expanded: Optional[frozenset[str]] = None,
) -> float:
    """Max confidence of the concept or any taxonomy descendant inside the
    segment, 0 when absent."""
    if expanded is None:
        if concept_id not in taxonomy:
            raise UnknownConcept(concept_id)
        expanded = _descendants(taxonomy, concept_id)
    best = 0.0
    for i in range(seg.start, seg.end + 1):
        for det in day.concepts[i]:
            if det.concept_id in expanded and det.confidence > best:
                best = det.confidence
    return best


def _descendants(taxonomy: ConceptTaxonomy, concept_id: str) -> frozenset[str]:
    out = {concept_id}
    stack = [concept_id]
    while stack:
        for child in taxonomy.children_of(stack.pop()):
            if child not in out:
                out.add(child)
                stack.append(child)
    return frozenset(out)


def criterion_score(
    seg: Segment, criterion: str, day: DayLog, taxonomy: ConceptTaxonomy,
    motion_scores: Optional[np.ndarray] = None,
) -> float:
    """Scalar ordering score in [0, 1] for one segment under one criterion.

    criterion is "color", "edge", "motion" or "concept:<id>". motion_scores
    may pass the day's precomputed consecutive-pair scores.
    """
    if criterion == "color":
        return mean_hue(day.rasters[seg.keyframe])
    if criterion == "edge":
        return edge_score(day.rasters[seg.keyframe])
    if criterion == "motion":
        if seg.length == 1:
            return 0.0
        if motion_scores is None:
            motion_scores = day_motion_scores(day)
        return float(np.mean(motion_scores[seg.start : seg.end]))
    if criterion.startswith("concept:"):
        return concept_score(seg, criterion.split(":", 1)[1], day, taxonomy)
    raise ValueError(f"unknown criterion {criterion!r}")


# --- deep feature vectors ------------------------------------------------------

def normalize_vector(v: Sequence[float] | np.ndarray) -> np.ndarray:
    """Scale to unit L2 norm."""
    arr = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(arr))
    if norm < 1e-12:
        raise ZeroVector("cannot normalize a (near-)zero vector")
    return arr / norm


# --- persistence ---------------------------------------------------------------

HISTMAP_MAGIC = b"HMAP"
HISTMAP_VERSION = 1


def write_histmaps(path: str | Path, histmaps: dict[int, HistMap]) -> None:
    """Persist segment histmaps: little-endian HMAP header + float32 cells."""
    with Path(path).open("wb") as fh:
        fh.write(HISTMAP_MAGIC)
        fh.write(struct.pack("<IIII", HISTMAP_VERSION, GRID, PALETTE_SIZE, len(histmaps)))
        for seg_id in sorted(histmaps):
            fh.write(struct.pack("<Q", seg_id))
            fh.write(histmaps[seg_id].cells.astype("<f4").tobytes())


def read_histmaps(path: str | Path) -> dict[int, HistMap]:
    data = Path(path).read_bytes()
    if data[:4] != HISTMAP_MAGIC:
        raise ValueError(f"{path}: not a histmap file")
    version, grid, k, count = struct.unpack_from("<IIII", data, 4)
    if version != HISTMAP_VERSION or grid != GRID or k != PALETTE_SIZE:
        raise ValueError(f"{path}: unsupported histmap format v{version} G={grid} K={k}")
    out: dict[int, HistMap] = {}
    pos = 20
    cell_bytes = GRID * GRID * PALETTE_SIZE * 4
    for _ in range(count):
        (seg_id,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        cells = np.frombuffer(data[pos : pos + cell_bytes], dtype="<f4").astype(np.float64)
        pos += cell_bytes
        out[seg_id] = HistMap(cells=cells.reshape(GRID, GRID, PALETTE_SIZE))
    return out
