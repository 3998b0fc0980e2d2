"""Dataset ingestion: parse a lifelog directory into an immutable LifelogStore.

A dataset is a directory with a ``frames.csv`` manifest, one P6 PPM file per
frame, and optional sidecar CSVs (sensors, concepts, taxonomy, OCR, feature
vectors). Everything is validated at load time; the resulting store never
changes and is safe for concurrent readers.
"""

from __future__ import annotations

import bisect
import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    BadHeader,
    BadImage,
    BadMagic,
    DanglingReference,
    MalformedRow,
    MissingManifest,
    NonMonotonicTimestamps,
    TruncatedPixelData,
    UnsortedSamples,
    UnsupportedMaxval,
    ZeroVector,
)

FRAMES_MANIFEST = "frames.csv"
SENSORS_FILE = "sensors.csv"
CONCEPTS_FILE = "concepts.csv"
TAXONOMY_FILE = "taxonomy.csv"
OCR_FILE = "ocr.csv"
VECTORS_FILE = "vectors.csv"
TASKS_FILE = "tasks.csv"
GROUND_TRUTH_SHOTS_FILE = "ground_truth_shots.csv"

# Playback rate of the assembled day videos; metadata for clients only.
PLAYBACK_FPS = 5


# --- rasters -----------------------------------------------------------------

@dataclass(frozen=True)
class Raster:
    """Row-major 8-bit RGB image."""

    width: int
    height: int
    pixels: bytes  # len == 3 * width * height

    def to_array(self) -> np.ndarray:
        """View as an (H, W, 3) uint8 array."""
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(
            self.height, self.width, 3
        )

    @staticmethod
    def from_array(arr: np.ndarray) -> "Raster":
        arr = np.asarray(arr, dtype=np.uint8)
        h, w, _ = arr.shape
        return Raster(width=w, height=h, pixels=arr.tobytes())


def parse_ppm(data: bytes) -> Raster:
    """Decode a binary (P6) PPM with maxval 255.

    Header tokens may be separated by any whitespace and interleaved with
    ``#`` comments; exactly one whitespace byte separates the maxval from the
    pixel payload.
    """
    if not data.startswith(b"P6"):
        raise BadMagic("not a P6 PPM (bad magic)")
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and comments
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            if eol < 0:
                raise BadHeader("unterminated comment in header")
            pos = eol + 1
            continue
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if pos == start:
            raise BadHeader(f"expected integer in header at byte {pos}")
        fields.append(int(data[start:pos]))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise BadHeader("missing whitespace after maxval")
    pos += 1
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise BadHeader(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval} unsupported (only 255)")
    need = 3 * width * height
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise TruncatedPixelData(
            f"expected {need} pixel bytes, got {len(payload)}"
        )
    return Raster(width=width, height=height, pixels=bytes(payload))


def encode_ppm(r: Raster) -> bytes:
    """Encode a raster as a binary P6 PPM."""
    return b"P6\n%d %d\n255\n" % (r.width, r.height) + r.pixels


# --- record types ------------------------------------------------------------

@dataclass(frozen=True)
class FrameRecord:
    day_id: str
    index: int
    timestamp_utc: int
    tz_offset_min: int
    image_path: str


@dataclass(frozen=True)
class SensorSample:
    timestamp_utc: int
    lat: Optional[float] = None
    lon: Optional[float] = None
    location_name: Optional[str] = None
    speed_kmh: Optional[float] = None
    heart_rate_bpm: Optional[int] = None
    steps: Optional[int] = None
    calories: Optional[float] = None
    activity: Optional[str] = None


@dataclass(frozen=True)
class ConceptDetection:
    day_id: str
    frame_index: int
    concept_id: str
    confidence: float
    bbox: Optional[tuple[float, float, float, float]] = None  # x, y, w, h


@dataclass(frozen=True)
class OcrRecord:
    day_id: str
    frame_index: int
    text: str


@dataclass(frozen=True)
class ConceptTaxonomy:
    """Forest of concept ids; parent maps child -> parent."""

    nodes: frozenset[str]
    parent: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        children: dict[str, list[str]] = {}
        for child, par in self.parent.items():
            if child not in self.nodes:
                raise DanglingReference(f"taxonomy child {child!r} not a node")
            if par not in self.nodes:
                raise DanglingReference(f"taxonomy parent {par!r} not a node")
            children.setdefault(par, []).append(child)
        # cycle check: follow parent links, each chain must terminate
        for node in self.nodes:
            seen = set()
            cur = node
            while cur in self.parent:
                if cur in seen:
                    raise DanglingReference(f"taxonomy cycle through {cur!r}")
                seen.add(cur)
                cur = self.parent[cur]
        object.__setattr__(self, "_children", {k: sorted(v) for k, v in children.items()})

    def children_of(self, concept_id: str) -> list[str]:
        return self._children.get(concept_id, [])

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.nodes


@dataclass(frozen=True)
class DayLog:
    """One day's frames with per-frame attachments, index-aligned."""

    day_id: str
    frames: tuple[FrameRecord, ...]
    rasters: tuple[Raster, ...]
    sensors: tuple[Optional[SensorSample], ...]
    concepts: tuple[tuple[ConceptDetection, ...], ...]
    ocr: tuple[tuple[OcrRecord, ...], ...]

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class LifelogStore:
    """Immutable post-ingest container for a whole dataset."""

    days: tuple[DayLog, ...]
    taxonomy: ConceptTaxonomy
    vectors: Optional[dict[tuple[str, int], np.ndarray]] = None
    vector_dim: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(
            self, "_day_index", {d.day_id: i for i, d in enumerate(self.days)}
        )

    @property
    def frame_count(self) -> int:
        return sum(len(d) for d in self.days)

    def day(self, day_id: str) -> DayLog:
        idx = self._day_index.get(day_id)
        if idx is None:
            raise KeyError(day_id)
        return self.days[idx]

    def day_position(self, day_id: str) -> Optional[int]:
        return self._day_index.get(day_id)

    def has_day(self, day_id: str) -> bool:
        return day_id in self._day_index


# --- CSV plumbing ------------------------------------------------------------

def _read_csv(path: Path, expected_header: Sequence[str], prefix_ok: bool = False) -> Iterator[tuple[int, list[str]]]:
    """Yield (line_number, row) for each data row, validating the header.

    With prefix_ok, the file may carry extra trailing columns (vectors.csv
    has a dataset-dependent dimension).
    """
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(path.name, 1, "empty file (missing header)")
        expected = list(expected_header)
        got = header[: len(expected)] if prefix_ok else header
        if got != expected:
            raise MalformedRow(
                path.name, 1, f"bad header {header!r}, expected {expected!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            yield line_no, row


def _parse_int(value: str, path: str, line: int, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise MalformedRow(path, line, f"bad {what}: {value!r}")


def _parse_float(value: str, path: str, line: int, what: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise MalformedRow(path, line, f"bad {what}: {value!r}")


def _opt_float(value: str, path: str, line: int, what: str) -> Optional[float]:
    if value == "":
        return None
    return _parse_float(value, path, line, what)


def _opt_int(value: str, path: str, line: int, what: str) -> Optional[int]:
    if value == "":
        return None
    return _parse_int(value, path, line, what)


# --- sensor alignment --------------------------------------------------------

def align_sensors(
    frames: Sequence[FrameRecord],
    samples: Sequence[SensorSample],
    tolerance_s: float = 60.0,
) -> list[Optional[SensorSample]]:
    """Attach to each frame the sample nearest in time, within tolerance.

    Ties on |dt| break toward the earlier sample, which also makes duplicate
    timestamps harmless. Samples must be sorted by timestamp.
    """
    times = [s.timestamp_utc for s in samples]
    if any(times[i] > times[i + 1] for i in range(len(times) - 1)):
        raise UnsortedSamples("sensor samples not sorted by timestamp")
    out: list[Optional[SensorSample]] = []
    for frame in frames:
        t = frame.timestamp_utc
        pos = bisect.bisect_left(times, t)
        best: Optional[int] = None
        # candidate at/after t
        if pos < len(times):
            best = pos
        # candidate before t wins on smaller or equal distance
        if pos > 0:
            if best is None or abs(t - times[pos - 1]) <= abs(times[best] - t):
                best = pos - 1
        # among equal timestamps keep the first occurrence
        if best is not None:
            while best > 0 and times[best - 1] == times[best]:
                best -= 1
        if best is not None and abs(times[best] - t) <= tolerance_s:
            out.append(samples[best])
        else:
            out.append(None)
    return out


# --- loaders -----------------------------------------------------------------

def _load_frames(root: Path) -> dict[str, list[FrameRecord]]:
    manifest = root / FRAMES_MANIFEST
    if not manifest.is_file():
        raise MissingManifest(f"no {FRAMES_MANIFEST} in {root}")
    by_day: dict[str, list[FrameRecord]] = {}
    header = ["day_id", "index", "timestamp_utc", "tz_offset_min", "image_path"]
    for line_no, row in _read_csv(manifest, header):
        if len(row) != 5:
            raise MalformedRow(manifest.name, line_no, f"expected 5 columns, got {len(row)}")
        day_id, idx_s, ts_s, tz_s, image_path = row
        if not day_id:
            raise MalformedRow(manifest.name, line_no, "empty day_id")
        rec = FrameRecord(
            day_id=day_id,
            index=_parse_int(idx_s, manifest.name, line_no, "index"),
            timestamp_utc=_parse_int(ts_s, manifest.name, line_no, "timestamp_utc"),
            tz_offset_min=_parse_int(tz_s, manifest.name, line_no, "tz_offset_min"),
            image_path=image_path,
        )
        if rec.index < 0:
            raise MalformedRow(manifest.name, line_no, f"negative index {rec.index}")
        by_day.setdefault(day_id, []).append(rec)
    for day_id, frames in by_day.items():
        frames.sort(key=lambda f: f.index)
        for pos, f in enumerate(frames):
            if f.index != pos:
                raise MalformedRow(
                    FRAMES_MANIFEST,
                    0,
                    f"day {day_id!r}: frame indices not contiguous at {f.index} (expected {pos})",
                )
        for a, b in zip(frames, frames[1:]):
            if b.timestamp_utc <= a.timestamp_utc:
                raise NonMonotonicTimestamps(day_id)
    return by_day


def _load_sensors(root: Path) -> list[SensorSample]:
    path = root / SENSORS_FILE
    if not path.is_file():
        return []
    header = [
        "timestamp_utc", "lat", "lon", "location_name", "speed_kmh",
        "heart_rate_bpm", "steps", "calories", "activity",
    ]
    samples = []
    for line_no, row in _read_csv(path, header):
        if len(row) != 9:
            raise MalformedRow(path.name, line_no, f"expected 9 columns, got {len(row)}")
        ts, lat, lon, loc, speed, hr, steps, cal, act = row
        sample = SensorSample(
            timestamp_utc=_parse_int(ts, path.name, line_no, "timestamp_utc"),
            lat=_opt_float(lat, path.name, line_no, "lat"),
            lon=_opt_float(lon, path.name, line_no, "lon"),
            location_name=loc or None,
            speed_kmh=_opt_float(speed, path.name, line_no, "speed_kmh"),
            heart_rate_bpm=_opt_int(hr, path.name, line_no, "heart_rate_bpm"),
            steps=_opt_int(steps, path.name, line_no, "steps"),
            calories=_opt_float(cal, path.name, line_no, "calories"),
            activity=act or None,
        )
        if (sample.lat is None) != (sample.lon is None):
            raise MalformedRow(path.name, line_no, "lat/lon must be present together")
        if all(
            getattr(sample, f) is None
            for f in ("lat", "lon", "location_name", "speed_kmh",
                      "heart_rate_bpm", "steps", "calories", "activity")
        ):
            raise MalformedRow(path.name, line_no, "sample carries no data fields")
        samples.append(sample)
    samples.sort(key=lambda s: s.timestamp_utc)
    return samples


def _load_taxonomy(root: Path) -> ConceptTaxonomy:
    path = root / TAXONOMY_FILE
    if not path.is_file():
        return ConceptTaxonomy(nodes=frozenset(), parent={})
    nodes = set()
    parent = {}
    for line_no, row in _read_csv(path, ["concept_id", "parent_id"]):
        if len(row) != 2:
            raise MalformedRow(path.name, line_no, f"expected 2 columns, got {len(row)}")
        cid, pid = row
        if not cid:
            raise MalformedRow(path.name, line_no, "empty concept_id")
        if cid in nodes:
            raise MalformedRow(path.name, line_no, f"duplicate concept {cid!r}")
        nodes.add(cid)
        if pid:
            parent[cid] = pid
    return ConceptTaxonomy(nodes=frozenset(nodes), parent=parent)


def _load_concepts(
    root: Path, by_day: dict[str, list[FrameRecord]], taxonomy: ConceptTaxonomy
) -> dict[tuple[str, int], list[ConceptDetection]]:
    path = root / CONCEPTS_FILE
    out: dict[tuple[str, int], list[ConceptDetection]] = {}
    if not path.is_file():
        return out
    header = ["day_id", "frame_index", "concept_id", "confidence", "bx", "by", "bw", "bh"]
    for line_no, row in _read_csv(path, header):
        if len(row) != 8:
            raise MalformedRow(path.name, line_no, f"expected 8 columns, got {len(row)}")
        day_id, idx_s, cid, conf_s, bx, by, bw, bh = row
        idx = _parse_int(idx_s, path.name, line_no, "frame_index")
        if day_id not in by_day or idx >= len(by_day[day_id]):
            raise DanglingReference(
                f"{path.name}:{line_no}: detection references unknown frame ({day_id!r}, {idx})"
            )
        if cid not in taxonomy:
            raise DanglingReference(
                f"{path.name}:{line_no}: detection references unknown concept {cid!r}"
            )
        conf = _parse_float(conf_s, path.name, line_no, "confidence")
        if not 0.0 <= conf <= 1.0:
            raise MalformedRow(path.name, line_no, f"confidence {conf} outside [0,1]")
        bbox = None
        box_fields = [bx, by, bw, bh]
        if any(box_fields):
            if not all(box_fields):
                raise MalformedRow(path.name, line_no, "partial bounding box")
            x, y, w, h = (_parse_float(v, path.name, line_no, "bbox") for v in box_fields)
            if min(x, y, w, h) < 0 or x + w > 1.0 or y + h > 1.0:
                raise MalformedRow(path.name, line_no, "bounding box outside unit square")
            bbox = (x, y, w, h)
        out.setdefault((day_id, idx), []).append(
            ConceptDetection(day_id=day_id, frame_index=idx, concept_id=cid,
                             confidence=conf, bbox=bbox)
        )
    return out


def _load_ocr(
    root: Path, by_day: dict[str, list[FrameRecord]]
) -> dict[tuple[str, int], list[OcrRecord]]:
    path = root / OCR_FILE
    out: dict[tuple[str, int], list[OcrRecord]] = {}
    if not path.is_file():
        return out
    for line_no, row in _read_csv(path, ["day_id", "frame_index", "text"]):
        if len(row) != 3:
            raise MalformedRow(path.name, line_no, f"expected 3 columns, got {len(row)}")
        day_id, idx_s, text = row
        idx = _parse_int(idx_s, path.name, line_no, "frame_index")
        if day_id not in by_day or idx >= len(by_day[day_id]):
            raise DanglingReference(
                f"{path.name}:{line_no}: OCR row references unknown frame ({day_id!r}, {idx})"
            )
        out.setdefault((day_id, idx), []).append(
            OcrRecord(day_id=day_id, frame_index=idx, text=text)
        )
    return out


def _load_vectors(
    root: Path, by_day: dict[str, list[FrameRecord]]
) -> tuple[Optional[dict[tuple[str, int], np.ndarray]], Optional[int]]:
    path = root / VECTORS_FILE
    if not path.is_file():
        return None, None
    vectors: dict[tuple[str, int], np.ndarray] = {}
    dim: Optional[int] = None
    for line_no, row in _read_csv(path, ["day_id", "frame_index"], prefix_ok=True):
        if len(row) < 3:
            raise MalformedRow(path.name, line_no, "vector row needs at least one component")
        day_id, idx_s = row[0], row[1]
        idx = _parse_int(idx_s, path.name, line_no, "frame_index")
        if day_id not in by_day or idx >= len(by_day[day_id]):
            raise DanglingReference(
                f"{path.name}:{line_no}: vector references unknown frame ({day_id!r}, {idx})"
            )
        comps = [_parse_float(v, path.name, line_no, "vector component") for v in row[2:]]
        if dim is None:
            dim = len(comps)
        elif len(comps) != dim:
            raise MalformedRow(
                path.name, line_no, f"vector dimension {len(comps)} != {dim}"
            )
        vec = np.asarray(comps, dtype=np.float64)
        norm = float(np.linalg.norm(vec))
        if norm < 1e-12:
            raise ZeroVector(f"{path.name}:{line_no}: zero feature vector")
        vectors[(day_id, idx)] = vec / norm
    return vectors, dim


def load_dataset(root: str | Path, sensor_tolerance_s: float = 60.0) -> LifelogStore:
    """Parse a dataset directory into a LifelogStore.

    Raises MissingManifest, MalformedRow, NonMonotonicTimestamps,
    DanglingReference or BadImage on the first violation found.
    """
    root = Path(root)
    by_day = _load_frames(root)
    taxonomy = _load_taxonomy(root)
    samples = _load_sensors(root)
    concepts = _load_concepts(root, by_day, taxonomy)
    ocr = _load_ocr(root, by_day)
    vectors, vector_dim = _load_vectors(root, by_day)

    days = []
    for day_id in sorted(by_day):
        frames = by_day[day_id]
        rasters = []
        for f in frames:
            img_path = root / f.image_path
            try:
                data = img_path.read_bytes()
            except OSError as exc:
                raise BadImage(f"cannot read {f.image_path}: {exc}") from exc
            try:
                rasters.append(parse_ppm(data))
            except (BadMagic, BadHeader, UnsupportedMaxval, TruncatedPixelData) as exc:
                raise BadImage(f"{f.image_path}: {exc}") from exc
        attached = align_sensors(frames, samples, tolerance_s=sensor_tolerance_s)
        days.append(
            DayLog(
                day_id=day_id,
                frames=tuple(frames),
                rasters=tuple(rasters),
                sensors=tuple(attached),
                concepts=tuple(
                    tuple(concepts.get((day_id, i), ())) for i in range(len(frames))
                ),
                ocr=tuple(
                    tuple(ocr.get((day_id, i), ())) for i in range(len(frames))
                ),
            )
        )
    return LifelogStore(days=tuple(days), taxonomy=taxonomy,
                        vectors=vectors, vector_dim=vector_dim)
