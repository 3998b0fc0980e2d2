"""Exact k-nearest-neighbor retrieval over segments.

Two measures: cosine over ingested deep-feature vectors (similarity, higher
is better) and the masked HistMap distance (lower is better). Everything is
a full scan over one method's segment catalog; at the dataset sizes this
engine targets that is interactive, and exactness keeps results checkable
against a brute-force oracle. Ties always break toward the lower segment id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .descriptor import GRID, PALETTE_SIZE, SketchHistMap
from .errors import DimensionMismatch, EmptyMask, MetricUnavailable, UnknownSegment

Metric = Literal["cosine_deep", "histmap_l1"]
METRICS: tuple[Metric, ...] = ("cosine_deep", "histmap_l1")


@dataclass(frozen=True)
class NeighborResult:
    segment_id: int
    score: float  # similarity for cosine_deep, distance for histmap_l1
    rank: int     # 1-based, contiguous


@dataclass(frozen=True)
class SegmentCatalog:
    """Column store over one segmentation method's segments."""

    ids: np.ndarray                    # int64
    histmaps: np.ndarray               # (S, GRID*GRID*PALETTE_SIZE) float64
    vectors: Optional[np.ndarray]      # (S, D) float64 or None
    has_vector: Optional[np.ndarray]   # (S,) bool, None when vectors is None

    def position(self, segment_id: int) -> int:
        pos = np.nonzero(self.ids == segment_id)[0]
        if pos.size == 0:
            raise UnknownSegment(segment_id)
        return int(pos[0])


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Dot product of two unit-normalized vectors."""
    if u.shape != v.shape:
        raise DimensionMismatch(f"vector dims {u.shape} vs {v.shape}")
    return float(np.dot(u, v))


def _take(order: np.ndarray, scores: np.ndarray, ids: np.ndarray, k: int) -> list[NeighborResult]:
    top = order[: max(k, 0)]
    return [
        NeighborResult(segment_id=int(ids[i]), score=float(scores[i]), rank=r)
        for r, i in enumerate(top, start=1)
    ]


def knn(catalog: SegmentCatalog, query_id: int, k: int, metric: Metric) -> list[NeighborResult]:
    """Top-k neighbors of a segment, excluding the segment itself.

    k larger than the candidate population returns the whole ranked
    population.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pos = catalog.position(query_id)
    if metric == "cosine_deep":
        if catalog.vectors is None:
            raise MetricUnavailable("no feature vectors were ingested")
        if not catalog.has_vector[pos]:
            raise MetricUnavailable(f"segment {query_id} has no feature vector")
        cand = catalog.has_vector & (catalog.ids != query_id)
        scores = catalog.vectors @ catalog.vectors[pos]
        # descending similarity, then ascending id
        order = np.lexsort((catalog.ids[cand], -scores[cand]))
    elif metric == "histmap_l1":
        cand = catalog.ids != query_id
        scores = 0.5 * np.abs(catalog.histmaps - catalog.histmaps[pos]).sum(axis=1) / (GRID * GRID)
        order = np.lexsort((catalog.ids[cand], scores[cand]))
    else:
        raise MetricUnavailable(f"unknown metric {metric!r}")
    cand_idx = np.nonzero(cand)[0]
    return _take(cand_idx[order], scores, catalog.ids, k)


def sketch_search(catalog: SegmentCatalog, sketch: SketchHistMap, k: int) -> list[NeighborResult]:
    """Rank all segments by masked HistMap distance to the sketch."""
    if k < 1:
        raise ValueError("k must be >= 1")
    mask = np.asarray(sketch.mask, dtype=bool)
    if not mask.any():
        raise EmptyMask("sketch mask selects no cells")
    cells = np.nonzero(mask.reshape(-1))[0]
    cols = (cells[:, None] * PALETTE_SIZE + np.arange(PALETTE_SIZE)[None, :]).reshape(-1)
    target = sketch.histmap.flat()[cols]
    scores = 0.5 * np.abs(catalog.histmaps[:, cols] - target).sum(axis=1) / cells.size
    order = np.lexsort((catalog.ids, scores))
    return _take(order, scores, catalog.ids, k)
