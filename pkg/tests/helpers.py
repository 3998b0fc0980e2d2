"""Shared test utilities: in-memory store builders, random query generation
and brute-force oracles kept deliberately independent of the engine's
vectorized code paths.
"""

from __future__ import annotations

import random
from typing import Optional

from lifegrid.ingest import (
    ConceptDetection,
    ConceptTaxonomy,
    DayLog,
    FrameRecord,
    LifelogStore,
    OcrRecord,
    Raster,
    SensorSample,
)
from lifegrid.query import (
    Activity,
    Concept,
    FilterContainer,
    GeoBox,
    NamedLocation,
    OcrText,
    Query,
    Range,
    RangeBetween,
    TimeRange,
    Weekday,
)
from lifegrid.segment import Segment

DUMMY_RASTER = Raster(width=1, height=1, pixels=b"\x00\x00\x00")

TAX_NODES = {
    "animal": None, "dog": "animal", "cat": "animal",
    "vehicle": None, "car": "vehicle", "bus": "vehicle",
    "food": None, "beer": "food", "pizza": "food",
    "device": None, "tablet": "device",
}
LOCATIONS = ["Home", "Office", "The Helix", "Cafe", "Park"]
ACTIVITIES = ["walking", "sitting", "driving", "running"]
OCR_WORDS = ["gate", "menu", "pizza", "open", "flight", "lh", "123", "exit"]


def small_taxonomy() -> ConceptTaxonomy:
    return ConceptTaxonomy(
        nodes=frozenset(TAX_NODES),
        parent={c: p for c, p in TAX_NODES.items() if p},
    )


def random_store(rng: random.Random, days: int, frames_per_day: int) -> LifelogStore:
    """Random in-memory store with sensors, concepts and OCR but no real
    pixel data (query evaluation never touches rasters)."""
    tax = small_taxonomy()
    concept_ids = sorted(tax.nodes)
    day_logs = []
    for d in range(days):
        day_id = f"d{d:03d}"
        n = frames_per_day
        tz = rng.choice([0, 60, -300, 120])
        t0 = rng.randrange(1_500_000_000, 1_600_000_000)
        frames = []
        sensors: list[Optional[SensorSample]] = []
        concepts = []
        ocr = []
        for i in range(n):
            frames.append(FrameRecord(day_id=day_id, index=i,
                                      timestamp_utc=t0 + i * rng.choice([30, 40, 60]),
                                      tz_offset_min=tz, image_path="x.ppm"))
            if rng.random() < 0.15:
                sensors.append(None)
            else:
                has_geo = rng.random() < 0.8
                sensors.append(SensorSample(
                    timestamp_utc=frames[-1].timestamp_utc,
                    lat=rng.uniform(53.0, 53.6) if has_geo else None,
                    lon=rng.uniform(-6.6, -6.0) if has_geo else None,
                    location_name=rng.choice(LOCATIONS) if rng.random() < 0.7 else None,
                    speed_kmh=round(rng.uniform(0, 100), 1) if rng.random() < 0.8 else None,
                    heart_rate_bpm=rng.randrange(50, 170) if rng.random() < 0.8 else None,
                    steps=rng.randrange(0, 250) if rng.random() < 0.7 else None,
                    calories=round(rng.uniform(0, 25), 2) if rng.random() < 0.7 else None,
                    activity=rng.choice(ACTIVITIES) if rng.random() < 0.7 else None,
                ))
            dets = []
            for _ in range(rng.randrange(0, 3)):
                dets.append(ConceptDetection(
                    day_id=day_id, frame_index=i,
                    concept_id=rng.choice(concept_ids),
                    confidence=round(rng.random(), 2),
                ))
            concepts.append(tuple(dets))
            if rng.random() < 0.2:
                ocr.append((OcrRecord(day_id=day_id, frame_index=i,
                                      text=" ".join(rng.sample(OCR_WORDS, rng.randrange(1, 4)))),))
            else:
                ocr.append(())
        day_logs.append(DayLog(
            day_id=day_id, frames=tuple(frames),
            rasters=(DUMMY_RASTER,) * n,
            sensors=tuple(sensors), concepts=tuple(concepts), ocr=tuple(ocr),
        ))
    return LifelogStore(days=tuple(day_logs), taxonomy=tax)


def random_segments(rng: random.Random, store: LifelogStore) -> dict[str, list[Segment]]:
    """Random partitions of each day for both methods, with globally unique
    day-major segment ids (mirrors how the engine assigns them)."""
    out: dict[str, list[Segment]] = {"shot": [], "uniform": []}
    next_id = 0
    for method in ("shot", "uniform"):
        for day in store.days:
            n = len(day)
            start = 0
            while start < n:
                length = min(rng.randrange(1, 9), n - start)
                end = start + length - 1
                out[method].append(Segment(
                    segment_id=next_id, day_id=day.day_id, start=start, end=end,
                    keyframe=(start + end) // 2, method=method,
                ))
                next_id += 1
                start = end + 1
    return out


def random_predicate(rng: random.Random, store: LifelogStore):
    kind = rng.randrange(9)
    if kind == 0:
        return Weekday(days=frozenset(rng.sample(range(7), rng.randrange(1, 4))))
    if kind == 1:
        a, b = rng.randrange(0, 1440), rng.randrange(0, 1440)
        if rng.random() < 0.7:
            a, b = min(a, b), max(a, b)
        return TimeRange(start_min=a, end_min=b)
    if kind == 2:
        return NamedLocation(name=rng.choice(LOCATIONS + ["Nowhere"]))
    if kind == 3:
        lat = sorted((rng.uniform(52.8, 53.8), rng.uniform(52.8, 53.8)))
        lon = sorted((rng.uniform(-6.8, -5.8), rng.uniform(-6.8, -5.8)))
        return GeoBox(lat_min=lat[0], lat_max=lat[1], lon_min=lon[0], lon_max=lon[1])
    if kind == 4:
        return Range(field=rng.choice(["speed_kmh", "heart_rate_bpm", "steps", "calories"]),
                     op=rng.choice(["<", "<=", "=", ">=", ">"]),
                     value=round(rng.uniform(0, 150), 1))
    if kind == 5:
        lo, hi = sorted((round(rng.uniform(0, 150), 1), round(rng.uniform(0, 150), 1)))
        return RangeBetween(field=rng.choice(["speed_kmh", "heart_rate_bpm", "steps", "calories"]),
                            lo=lo, hi=hi)
    if kind == 6:
        return Activity(name=rng.choice(ACTIVITIES + ["flying"]))
    if kind == 7:
        return Concept(concept_id=rng.choice(sorted(store.taxonomy.nodes)),
                       min_conf=rng.choice([0.0, 0.3, 0.5, 0.8]))
    return OcrText(tokens=tuple(rng.sample(OCR_WORDS, rng.randrange(1, 3))))


def random_query(rng: random.Random, store: LifelogStore, method: str) -> Query:
    containers = tuple(
        FilterContainer(predicates=tuple(
            random_predicate(rng, store) for _ in range(rng.randrange(1, 4))
        ))
        for _ in range(rng.randrange(1, 4))
    )
    return Query(containers=containers, method=method)


# --- brute-force similarity oracles (pure python, no numpy) --------------------

def oracle_knn_cosine(ids, vectors, query_pos: int, k: int):
    """(id, score) pairs sorted by descending score then ascending id."""
    q = vectors[query_pos]
    scored = []
    for i, vid in enumerate(ids):
        if i == query_pos:
            continue
        s = sum(a * b for a, b in zip(vectors[i], q))
        scored.append((vid, s))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def oracle_knn_histmap(ids, histmaps, query_pos: int, k: int):
    """(id, distance) sorted ascending distance then id; full-mask distance."""
    q = histmaps[query_pos]
    scored = []
    for i, vid in enumerate(ids):
        if i == query_pos:
            continue
        d = 0.5 * sum(abs(a - b) for a, b in zip(histmaps[i], q)) / 16.0
        scored.append((vid, d))
    scored.sort(key=lambda t: (t[1], t[0]))
    return scored[:k]


def oracle_sketch(ids, histmaps, target, mask_cells, k: int):
    """Masked distance ranking; mask_cells lists flat cell indices 0..15."""
    cols = [c * 16 + b for c in mask_cells for b in range(16)]
    scored = []
    for i, vid in enumerate(ids):
        d = 0.5 * sum(abs(histmaps[i][c] - target[c]) for c in cols) / len(mask_cells)
        scored.append((vid, d))
    scored.sort(key=lambda t: (t[1], t[0]))
    return scored[:k]
