"""Deterministic synthetic lifelog datasets for tests and demos.

A synthetic day is a sequence of piecewise-constant "scenes": runs of frames
sharing one background color (optionally with a stripe pattern), with abrupt
color changes between runs. Scene colors alternate between a dark band
(channels <= 60) and a bright band (channels >= 190), so every planted scene
change moves mean luma by at least 128 while within-scene frames are
identical up to optional small noise. The planted boundaries are written to
``ground_truth_shots.csv`` so shot detection has ground truth.

All output is a pure function of the generator arguments: running the
generator twice with the same arguments yields byte-identical trees.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Optional, TextIO

import numpy as np

from .errors import IoFailure
from .ingest import DayLog, FrameRecord, Raster, encode_ppm

FRAME_GAP_S = 40  # nominal capture cadence
DAY_START_LOCAL_S = 8 * 3600  # days start at 08:00 local time
EPOCH_DATE = date(1970, 1, 1)

LOCATIONS = [
    ("Home", 53.380, -6.210),
    ("Office", 53.345, -6.267),
    ("The Helix", 53.385, -6.257),
    ("Airport", 53.427, -6.244),
    ("Cafe Milano", 53.342, -6.260),
    ("City Park", 53.356, -6.330),
    ("Hotel Aurora", 48.210, 16.372),
    ("Gym", 53.348, -6.254),
]

ACTIVITIES = ["walking", "sitting", "driving", "running", "transport", "cycling"]

# (concept_id, parent_id or None)
TAXONOMY = [
    ("animal", None), ("dog", "animal"), ("cat", "animal"), ("bird", "animal"),
    ("vehicle", None), ("car", "vehicle"), ("bus", "vehicle"),
    ("airplane", "vehicle"), ("bicycle", "vehicle"),
    ("person", None),
    ("food", None), ("beer", "food"), ("wine", "food"), ("pizza", "food"),
    ("coffee", "food"),
    ("device", None), ("tablet", "device"), ("laptop", "device"),
    ("tv", "device"), ("phone", "device"),
    ("building", None), ("office", "building"), ("hotel", "building"),
]

OCR_WORDS = [
    "gate", "boarding", "flight", "lh", "123", "menu", "pizza", "beer",
    "special", "exit", "arrivals", "the", "helix", "theatre", "tickets",
    "sale", "open", "daily", "news", "score",
]


@dataclass(frozen=True)
class Stripe:
    orient: str  # 'h' or 'v'
    lo: float    # fraction of the image extent
    hi: float
    color: tuple[int, int, int]


@dataclass(frozen=True)
class SceneSpec:
    start: int
    length: int
    bright: bool
    bg: tuple[int, int, int]
    stripe: Optional[Stripe]
    location: int  # index into LOCATIONS
    activity: str
    concepts: tuple[str, ...]


@dataclass(frozen=True)
class SynthSummary:
    root: Path
    days: int
    frames: int
    sensor_rows: int
    concept_rows: int
    ocr_rows: int
    vector_rows: int
    boundaries: dict[str, list[int]]
    task_ids: list[str]


def _band(bright: bool) -> tuple[int, int]:
    return (190, 255) if bright else (0, 60)


def _scene_color(rng: random.Random, bright: bool) -> tuple[int, int, int]:
    lo, hi = _band(bright)
    return (rng.randint(lo, hi), rng.randint(lo, hi), rng.randint(lo, hi))


def plan_scenes(
    rng: random.Random,
    n_frames: int,
    min_run: int = 3,
    max_run: int = 12,
) -> list[SceneSpec]:
    """Split n_frames into alternating dark/bright scene runs."""
    scenes: list[SceneSpec] = []
    start = 0
    bright = rng.random() < 0.5
    while start < n_frames:
        run = min(rng.randint(min_run, max_run), n_frames - start)
        bg = _scene_color(rng, bright)
        stripe = None
        if rng.random() < 0.4:
            orient = rng.choice("hv")
            lo, hi = sorted(rng.sample([0.0, 0.25, 0.5, 0.75, 1.0], 2))
            stripe = Stripe(orient=orient, lo=lo, hi=hi,
                            color=_scene_color(rng, bright))
        scenes.append(
            SceneSpec(
                start=start,
                length=run,
                bright=bright,
                bg=bg,
                stripe=stripe,
                location=rng.randrange(len(LOCATIONS)),
                activity=rng.choice(ACTIVITIES),
                concepts=tuple(
                    rng.sample([c for c, p in TAXONOMY if p is not None],
                               rng.randint(1, 3))
                ),
            )
        )
        bright = not bright
        start += run
    return scenes


def render_frame(
    scene: SceneSpec, width: int, height: int,
    rng: random.Random, noise: int = 0,
) -> Raster:
    """Render one frame of a scene; noise is the max per-channel offset."""
    arr = np.full((height, width, 3), scene.bg, dtype=np.uint8)
    if scene.stripe is not None:
        s = scene.stripe
        if s.orient == "h":
            y0, y1 = round(s.lo * height), round(s.hi * height)
            arr[y0:y1, :, :] = s.color
        else:
            x0, x1 = round(s.lo * width), round(s.hi * width)
            arr[:, x0:x1, :] = s.color
    if noise > 0:
        raw = np.frombuffer(rng.randbytes(width * height * 3), dtype=np.uint8)
        offsets = raw.astype(np.int16) % (2 * noise + 1) - noise
        shifted = arr.astype(np.int16) + offsets.reshape(height, width, 3)
        arr = np.clip(shifted, 0, 255).astype(np.uint8)
    return Raster.from_array(arr)


def boundaries_of(scenes: list[SceneSpec]) -> list[int]:
    """Frame indices that start a new scene (the first scene is no boundary)."""
    return [s.start for s in scenes[1:]]


def synthetic_day(
    rng: random.Random,
    n_frames: int,
    width: int = 16,
    height: int = 12,
    noise: int = 0,
    day_id: str = "day",
    min_run: int = 3,
    max_run: int = 12,
) -> tuple[DayLog, list[int]]:
    """Build an in-memory DayLog plus its planted boundary list.

    Used by property tests that need many random days without disk I/O;
    the on-disk generator renders frames the same way.
    """
    scenes = plan_scenes(rng, n_frames, min_run=min_run, max_run=max_run)
    frames = []
    rasters = []
    base = 1_000_000_000
    for scene in scenes:
        for i in range(scene.start, scene.start + scene.length):
            frames.append(FrameRecord(day_id=day_id, index=i,
                                      timestamp_utc=base + FRAME_GAP_S * i,
                                      tz_offset_min=0, image_path=f"{i}.ppm"))
            rasters.append(render_frame(scene, width, height, rng, noise=noise))
    n = len(frames)
    day = DayLog(
        day_id=day_id,
        frames=tuple(frames),
        rasters=tuple(rasters),
        sensors=(None,) * n,
        concepts=((),) * n,
        ocr=((),) * n,
    )
    return day, boundaries_of(scenes)


# --- on-disk generator -------------------------------------------------------

def _writer(fh: TextIO) -> "csv.Writer":
    return csv.writer(fh, lineterminator="\n")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def generate_synthetic(
    seed: int,
    days: int,
    frames_per_day: int,
    out: str | Path,
    *,
    width: int = 24,
    height: int = 18,
    noise: int = 0,
    min_run: int = 3,
    max_run: int = 12,
    vector_dim: int = 8,
    with_vectors: bool = True,
    task_count: int = 2,
) -> SynthSummary:
    """Write a complete synthetic dataset under ``out``.

    Deterministic: the same arguments always produce a byte-identical tree.
    """
    rng = random.Random(seed)
    root = Path(out)
    try:
        root.mkdir(parents=True, exist_ok=True)
        (root / "images").mkdir(exist_ok=True)
        return _generate(rng, root, days, frames_per_day, width, height,
                         noise, min_run, max_run, vector_dim, with_vectors,
                         task_count)
    except OSError as exc:
        raise IoFailure(f"cannot write dataset to {root}: {exc}") from exc


def _generate(
    rng: random.Random, root: Path, days: int, frames_per_day: int,
    width: int, height: int, noise: int, min_run: int, max_run: int,
    vector_dim: int, with_vectors: bool, task_count: int,
) -> SynthSummary:
    start_date = date(2016, 8, 15)
    day_plans: list[tuple[str, int, int, list[SceneSpec]]] = []
    for d in range(days):
        day = start_date + timedelta(days=d)
        day_id = day.isoformat()
        tz_offset_min = rng.choice([0, 60, 60, 120, -60])
        local_epoch = (day - EPOCH_DATE).days * 86400 + DAY_START_LOCAL_S
        utc0 = local_epoch - tz_offset_min * 60
        scenes = plan_scenes(rng, frames_per_day, min_run=min_run, max_run=max_run)
        day_plans.append((day_id, tz_offset_min, utc0, scenes))

    sensor_rows = 0
    concept_rows = 0
    ocr_rows = 0
    vector_rows = 0
    boundaries: dict[str, list[int]] = {}

    frames_fh = (root / "frames.csv").open("w", newline="", encoding="utf-8")
    sensors_fh = (root / "sensors.csv").open("w", newline="", encoding="utf-8")
    concepts_fh = (root / "concepts.csv").open("w", newline="", encoding="utf-8")
    ocr_fh = (root / "ocr.csv").open("w", newline="", encoding="utf-8")
    gt_fh = (root / "ground_truth_shots.csv").open("w", newline="", encoding="utf-8")
    vectors_fh = (root / "vectors.csv").open("w", newline="", encoding="utf-8") if with_vectors else None
    try:
        frames_w = _writer(frames_fh)
        frames_w.writerow(["day_id", "index", "timestamp_utc", "tz_offset_min", "image_path"])
        sensors_w = _writer(sensors_fh)
        sensors_w.writerow(["timestamp_utc", "lat", "lon", "location_name",
                            "speed_kmh", "heart_rate_bpm", "steps", "calories",
                            "activity"])
        concepts_w = _writer(concepts_fh)
        concepts_w.writerow(["day_id", "frame_index", "concept_id", "confidence",
                             "bx", "by", "bw", "bh"])
        ocr_w = _writer(ocr_fh)
        ocr_w.writerow(["day_id", "frame_index", "text"])
        gt_w = _writer(gt_fh)
        gt_w.writerow(["day_id", "boundary_index"])
        vectors_w = None
        if vectors_fh is not None:
            vectors_w = _writer(vectors_fh)
            vectors_w.writerow(["day_id", "frame_index"] + [f"v{i}" for i in range(vector_dim)])

        for day_id, tz_offset_min, utc0, scenes in day_plans:
            img_dir = root / "images" / day_id
            img_dir.mkdir(exist_ok=True)
            boundaries[day_id] = boundaries_of(scenes)
            for b in boundaries[day_id]:
                gt_w.writerow([day_id, b])
            for scene in scenes:
                loc_name, lat0, lon0 = LOCATIONS[scene.location]
                scene_vec_tail = [rng.uniform(-1, 1) for _ in range(max(0, vector_dim - 4))]
                for i in range(scene.start, scene.start + scene.length):
                    ts = utc0 + FRAME_GAP_S * i
                    rel_path = f"images/{day_id}/f{i:05d}.ppm"
                    raster = render_frame(scene, width, height, rng, noise=noise)
                    (root / rel_path).write_bytes(encode_ppm(raster))
                    frames_w.writerow([day_id, i, ts, tz_offset_min, rel_path])

                    if rng.random() >= 0.05:  # occasional dropout
                        has_geo = rng.random() >= 0.1
                        has_hr = rng.random() >= 0.05
                        speed = {
                            "walking": rng.uniform(2, 6),
                            "running": rng.uniform(7, 14),
                            "cycling": rng.uniform(12, 28),
                            "driving": rng.uniform(20, 90),
                            "transport": rng.uniform(30, 120),
                            "sitting": rng.uniform(0, 0.5),
                        }[scene.activity]
                        sensors_w.writerow([
                            ts + rng.randint(-15, 15),
                            _fmt(lat0 + rng.uniform(-0.002, 0.002)) if has_geo else "",
                            _fmt(lon0 + rng.uniform(-0.002, 0.002)) if has_geo else "",
                            loc_name,
                            _fmt(speed),
                            rng.randint(52, 165) if has_hr else "",
                            rng.randint(0, 250),
                            _fmt(rng.uniform(0, 25)),
                            scene.activity,
                        ])
                        sensor_rows += 1

                    for cid in scene.concepts:
                        if rng.random() < 0.7:
                            if rng.random() < 0.5:
                                bx, by = rng.uniform(0, 0.5), rng.uniform(0, 0.5)
                                bw, bh = rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)
                                box = [_fmt(bx), _fmt(by), _fmt(bw), _fmt(bh)]
                            else:
                                box = ["", "", "", ""]
                            concepts_w.writerow([day_id, i, cid,
                                                 _fmt(rng.uniform(0.3, 1.0))] + box)
                            concept_rows += 1

                    if rng.random() < 0.15:
                        words = rng.sample(OCR_WORDS, rng.randint(2, 5))
                        ocr_w.writerow([day_id, i, " ".join(words)])
                        ocr_rows += 1

                    if vectors_w is not None:
                        base = [scene.bg[0] / 255, scene.bg[1] / 255,
                                scene.bg[2] / 255, 1.0]
                        vec = [v + rng.uniform(-0.05, 0.05)
                               for v in (base + scene_vec_tail)[:vector_dim]]
                        norm = sum(v * v for v in vec) ** 0.5 or 1.0
                        vectors_w.writerow([day_id, i] + [_fmt(v / norm) for v in vec])
                        vector_rows += 1
    finally:
        frames_fh.close()
        sensors_fh.close()
        concepts_fh.close()
        ocr_fh.close()
        gt_fh.close()
        if vectors_fh is not None:
            vectors_fh.close()

    with (root / "taxonomy.csv").open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["concept_id", "parent_id"])
        for cid, pid in TAXONOMY:
            w.writerow([cid, pid or ""])

    task_ids = _write_tasks(rng, root, day_plans, task_count)

    return SynthSummary(
        root=root,
        days=days,
        frames=days * frames_per_day,
        sensor_rows=sensor_rows,
        concept_rows=concept_rows,
        ocr_rows=ocr_rows,
        vector_rows=vector_rows,
        boundaries=boundaries,
        task_ids=task_ids,
    )


HINT_TEMPLATES = [
    "I was at {loc}.",
    "There was a {concept} near me.",
    "The logged activity was {activity}.",
    "The scene looked mostly {shade}.",
    "It lasted a few minutes at most.",
    "It was within the usual daily route.",
]


def _write_tasks(
    rng: random.Random, root: Path,
    day_plans: list[tuple[str, int, int, list[SceneSpec]]],
    task_count: int,
) -> list[str]:
    task_ids = []
    with (root / "tasks.csv").open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["task_id", "hint_t", "hint_text", "truth_day_id",
                    "truth_start", "truth_end", "duration_s"])
        if not day_plans:
            return task_ids
        for t in range(task_count):
            task_id = f"t{t + 1:02d}"
            task_ids.append(task_id)
            day_id, _tz, _utc0, scenes = day_plans[rng.randrange(len(day_plans))]
            scene = scenes[rng.randrange(len(scenes))]
            start = scene.start
            end = scene.start + scene.length - 1
            ctx = {
                "loc": LOCATIONS[scene.location][0],
                "concept": scene.concepts[0],
                "activity": scene.activity,
                "shade": "bright" if scene.bright else "dark",
            }
            for k, t_s in enumerate(range(0, 180, 30)):
                text = HINT_TEMPLATES[k % len(HINT_TEMPLATES)].format(**ctx)
                w.writerow([task_id, t_s, text, day_id, start, end, 180])
    return task_ids
