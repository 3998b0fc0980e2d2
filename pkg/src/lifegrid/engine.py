"""Engine: loads a dataset and builds every derived structure the service
needs: segmentations, keyframe descriptors, criterion scores, query indexes,
similarity catalogs and feature-map pyramids.

Everything the engine exposes is immutable after construction, so request
handlers may read it concurrently without locks. The one exception is the
lazy per-concept pyramid cache, which is guarded by a single-flight lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import descriptor, featmap, query, simsearch
from .errors import UnknownConcept, UnknownCriterion, UnknownMethod, UnknownSegment
from .ingest import LifelogStore, load_dataset
from .segment import (
    METHODS,
    Method,
    Segment,
    SegmentationConfig,
    day_motion_scores,
    detect_shots,
    uniform_segments,
)

HISTMAP_CACHE_NAME = "histmaps.bin"


@dataclass(frozen=True)
class EngineConfig:
    dataset: Path
    method: Method = "shot"  # default method for queries and views
    theta: float = 0.3
    min_len: int = 3
    uniform_rate: int = 10
    viewport: int = 8
    histmap_cache: bool = True  # persist descriptors next to the dataset

    def segmentation(self) -> SegmentationConfig:
        return SegmentationConfig(theta=self.theta, min_len=self.min_len,
                                  uniform_rate=self.uniform_rate)


@dataclass
class Engine:
    config: EngineConfig
    store: LifelogStore
    segments: dict[Method, list[Segment]]
    seg_by_id: dict[int, Segment]
    histmaps: dict[int, descriptor.HistMap]
    catalogs: dict[Method, simsearch.SegmentCatalog]
    indexes: query.QueryIndexes
    base_scores: dict[tuple[str, Method], list[float]]
    day_motion: dict[str, np.ndarray]
    _pyramids: dict[tuple[str, Method], featmap.FeatureMapPyramid] = field(default_factory=dict)
    _pyramid_lock: threading.Lock = field(default_factory=threading.Lock)

    # --- construction ------------------------------------------------------

    @classmethod
    def load(cls, config: EngineConfig) -> "Engine":
        store = load_dataset(config.dataset)
        return cls.build(store, config)

    @classmethod
    def build(cls, store: LifelogStore, config: EngineConfig) -> "Engine":
        seg_cfg = config.segmentation()
        day_motion = {d.day_id: day_motion_scores(d) for d in store.days if len(d)}

        segments: dict[Method, list[Segment]] = {"shot": [], "uniform": []}
        next_id = 0
        for day in store.days:
            shots = detect_shots(day, seg_cfg, id_start=next_id) if len(day) else []
            segments["shot"].extend(shots)
            next_id += len(shots)
        for day in store.days:
            if len(day):
                uni = uniform_segments(day, rate=seg_cfg.uniform_rate, id_start=next_id)
                segments["uniform"].extend(uni)
                next_id += len(uni)
        seg_by_id = {s.segment_id: s for m in METHODS for s in segments[m]}

        histmaps = cls._histmaps(store, seg_by_id, config)
        catalogs = cls._catalogs(store, segments, histmaps)
        indexes = query.build_indexes(store, segments)

        base_scores: dict[tuple[str, Method], list[float]] = {}
        for method in METHODS:
            for criterion in descriptor.BASE_CRITERIA:
                base_scores[(criterion, method)] = [
                    descriptor.criterion_score(
                        s, criterion, store.day(s.day_id), store.taxonomy,
                        motion_scores=day_motion.get(s.day_id),
                    )
                    for s in segments[method]
                ]

        engine = cls(
            config=config, store=store, segments=segments, seg_by_id=seg_by_id,
            histmaps=histmaps, catalogs=catalogs, indexes=indexes,
            base_scores=base_scores, day_motion=day_motion,
        )
        for method in METHODS:
            for criterion in descriptor.BASE_CRITERIA:
                if segments[method]:
                    engine.pyramid(criterion, method)
        return engine

    @staticmethod
    def _histmaps(
        store: LifelogStore, seg_by_id: dict[int, Segment], config: EngineConfig
    ) -> dict[int, descriptor.HistMap]:
        cache_path = Path(config.dataset) / HISTMAP_CACHE_NAME
        if config.histmap_cache and cache_path.is_file():
            try:
                cached = descriptor.read_histmaps(cache_path)
                if set(cached) == set(seg_by_id):
                    return cached
            except (ValueError, OSError):
                pass  # stale or corrupt cache: recompute below
        out = {}
        for seg_id, seg in seg_by_id.items():
            day = store.day(seg.day_id)
            raster = day.rasters[seg.keyframe]
            if raster.width < descriptor.GRID or raster.height < descriptor.GRID:
                # keyframe smaller than the descriptor grid: replicate pixels
                arr = raster.to_array()
                ry = -(-descriptor.GRID // raster.height)
                rx = -(-descriptor.GRID // raster.width)
                raster = type(raster).from_array(
                    np.repeat(np.repeat(arr, ry, axis=0), rx, axis=1)
                )
            out[seg_id] = descriptor.compute_histmap(raster)
        if config.histmap_cache:
            try:
                descriptor.write_histmaps(cache_path, out)
            except OSError:
                pass  # cache is best-effort
        return out

    @staticmethod
    def _catalogs(
        store: LifelogStore,
        segments: dict[Method, list[Segment]],
        histmaps: dict[int, descriptor.HistMap],
    ) -> dict[Method, simsearch.SegmentCatalog]:
        catalogs = {}
        for method in METHODS:
            segs = segments[method]
            ids = np.array([s.segment_id for s in segs], dtype=np.int64)
            hm = (np.stack([histmaps[s.segment_id].flat() for s in segs])
                  if segs else np.zeros((0, descriptor.GRID ** 2 * descriptor.PALETTE_SIZE)))
            vectors = None
            has_vector = None
            if store.vectors is not None:
                dim = store.vector_dim or 0
                vectors = np.zeros((len(segs), dim))
                has_vector = np.zeros(len(segs), dtype=bool)
                for i, s in enumerate(segs):
                    vec = store.vectors.get((s.day_id, s.keyframe))
                    if vec is not None:
                        vectors[i] = vec
                        has_vector[i] = True
            catalogs[method] = simsearch.SegmentCatalog(
                ids=ids, histmaps=hm, vectors=vectors, has_vector=has_vector
            )
        return catalogs

    # --- feature maps --------------------------------------------------------

    def criteria(self) -> list[str]:
        return list(descriptor.BASE_CRITERIA)

    def _criterion_scores(self, criterion: str, method: Method) -> list[float]:
        key = (criterion, method)
        if key in self.base_scores:
            return self.base_scores[key]
        if not criterion.startswith("concept:"):
            raise UnknownCriterion(f"unknown criterion {criterion!r}")
        cid = criterion.split(":", 1)[1]
        if cid not in self.store.taxonomy:
            raise UnknownConcept(cid)
        return [
            descriptor.criterion_score(s, criterion, self.store.day(s.day_id), self.store.taxonomy)
            for s in self.segments[method]
        ]

    def pyramid(self, criterion: str, method: Method) -> featmap.FeatureMapPyramid:
        """Cached pyramid for one (criterion, method); concept maps build
        lazily on first request."""
        if method not in METHODS:
            raise UnknownMethod(f"unknown method {method!r}")
        key = (criterion, method)
        cached = self._pyramids.get(key)
        if cached is not None:
            return cached
        with self._pyramid_lock:
            cached = self._pyramids.get(key)
            if cached is not None:
                return cached
            scores = self._criterion_scores(criterion, method)
            ids = [s.segment_id for s in self.segments[method]]
            level0 = featmap.build_level0(ids, scores)
            pyramid = featmap.build_pyramid(level0, criterion=criterion,
                                            viewport=self.config.viewport)
            self._pyramids[key] = pyramid
            return pyramid

    # --- queries ---------------------------------------------------------------

    def evaluate(self, q: query.Query) -> query.ResultList:
        return query.evaluate(q, self.indexes, self.store.taxonomy)

    # --- similarity --------------------------------------------------------------

    def segment(self, segment_id: int) -> Segment:
        seg = self.seg_by_id.get(segment_id)
        if seg is None:
            raise UnknownSegment(segment_id)
        return seg

    def knn(self, segment_id: int, k: int, metric: simsearch.Metric) -> list[simsearch.NeighborResult]:
        seg = self.segment(segment_id)
        return simsearch.knn(self.catalogs[seg.method], segment_id, k, metric)

    def sketch_search(
        self, sketch: descriptor.SketchHistMap, k: int, method: Method
    ) -> list[simsearch.NeighborResult]:
        return simsearch.sketch_search(self.catalogs[method], sketch, k)

    # --- summary -----------------------------------------------------------------

    def summary(self) -> dict:
        return {
            "days": len(self.store.days),
            "frames": self.store.frame_count,
            "segments": {m: len(self.segments[m]) for m in METHODS},
            "vectors_available": self.store.vectors is not None,
            "vector_dim": self.store.vector_dim,
            "default_method": self.config.method,
            "concepts": sorted(self.store.taxonomy.nodes),
            "locations": sorted({s.location_name for d in self.store.days
                                 for s in d.sensors
                                 if s is not None and s.location_name}),
            "activities": sorted({s.activity for d in self.store.days
                                  for s in d.sensors
                                  if s is not None and s.activity}),
        }
