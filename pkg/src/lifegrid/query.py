"""Combinable filter queries over frames and segments.

A query is a disjunction of filter containers; a container is a conjunction
of typed predicates that one single frame must satisfy in full. A segment
matches when any of its frames matches any container.

Two evaluation routes exist on purpose: ``evaluate_scan`` is the semantic
reference (a plain double loop over frames and containers), and ``evaluate``
runs the same semantics over precomputed column arrays and posting lists.
The test suite holds them observationally identical.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import InvalidQuery, UnknownConcept
from .ingest import ConceptTaxonomy, DayLog, LifelogStore
from .segment import METHODS, Method, Segment

RANGE_FIELDS = ("speed_kmh", "heart_rate_bpm", "steps", "calories")
CMP_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    ">=": operator.ge,
    ">": operator.gt,
}

WEEKDAY_NAMES = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")


def local_epoch(timestamp_utc: int, tz_offset_min: int) -> int:
    return timestamp_utc + tz_offset_min * 60

def local_weekday(timestamp_utc: int, tz_offset_min: int) -> int:
    """0 = Monday .. 6 = Sunday, in frame-local time."""
    return (local_epoch(timestamp_utc, tz_offset_min) // 86400 + 3) % 7

def local_minutes(timestamp_utc: int, tz_offset_min: int) -> int:
    """Minutes since local midnight (seconds truncated)."""
    return local_epoch(timestamp_utc, tz_offset_min) % 86400 // 60


# --- predicate model -----------------------------------------------------------

@dataclass(frozen=True)
class Weekday:
    days: frozenset[int]  # 0 = Mon .. 6 = Sun

    def __post_init__(self):
        if not self.days or not all(0 <= d <= 6 for d in self.days):
            raise InvalidQuery("weekday set must be a non-empty subset of mon..sun")


@dataclass(frozen=True)
class TimeRange:
    """Inclusive local-time range in minutes; start > end wraps midnight."""

    start_min: int
    end_min: int

    def __post_init__(self):
        for v in (self.start_min, self.end_min):
            if not 0 <= v <= 1439:
                raise InvalidQuery(f"time {v} outside 00:00..23:59")

    @property
    def wraps(self) -> bool:
        return self.start_min > self.end_min


@dataclass(frozen=True)
class NamedLocation:
    name: str  # case-insensitive exact match


@dataclass(frozen=True)
class GeoBox:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self):
        if self.lat_min > self.lat_max or self.lon_min > self.lon_max:
            raise InvalidQuery("geo box bounds out of order")


@dataclass(frozen=True)
class Range:
    field: str
    op: str
    value: float

    def __post_init__(self):
        if self.field not in RANGE_FIELDS:
            raise InvalidQuery(f"unknown range field {self.field!r}")
        if self.op not in CMP_OPS:
            raise InvalidQuery(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class RangeBetween:
    field: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.field not in RANGE_FIELDS:
            raise InvalidQuery(f"unknown range field {self.field!r}")


@dataclass(frozen=True)
class Activity:
    name: str  # case-insensitive exact match


@dataclass(frozen=True)
class Concept:
    concept_id: str
    min_conf: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.min_conf <= 1.0:
            raise InvalidQuery(f"min_conf {self.min_conf} outside [0,1]")


@dataclass(frozen=True)
class OcrText:
    tokens: tuple[str, ...]


Predicate = Union[
    Weekday, TimeRange, NamedLocation, GeoBox, Range, RangeBetween,
    Activity, Concept, OcrText,
]


@dataclass(frozen=True)
class FilterContainer:
    predicates: tuple[Predicate, ...]

    def __post_init__(self):
        if not self.predicates:
            raise InvalidQuery("filter container needs at least one predicate")


@dataclass(frozen=True)
class Query:
    containers: tuple[FilterContainer, ...]
    method: Method = "shot"

    def __post_init__(self):
        if not self.containers:
            raise InvalidQuery("query needs at least one container")
        if self.method not in METHODS:
            raise InvalidQuery(f"unknown segmentation method {self.method!r}")


class ResultEntry(NamedTuple):
    segment_id: int
    day_id: str
    start: int
    end: int
    keyframe: int
    frames: tuple[int, ...]  # matching frame indices, ascending


ResultList = list[ResultEntry]


# --- text ----------------------------------------------------------------------

def tokenize(text: str) -> list[str]:
    """Lowercase and split on every non-alphanumeric codepoint; empty tokens
    dropped, order and duplicates kept."""
    tokens: list[str] = []
    cur: list[str] = []
    for ch in text.lower():
        if ch.isalnum():
            cur.append(ch)
        elif cur:
            tokens.append("".join(cur))
            cur = []
    if cur:
        tokens.append("".join(cur))
    return tokens


# --- taxonomy expansion ----------------------------------------------------------

def expand_concept(taxonomy: ConceptTaxonomy, concept_id: str) -> frozenset[str]:
    """The concept plus all taxonomy descendants."""
    if concept_id not in taxonomy:
        raise UnknownConcept(concept_id)
    out = {concept_id}
    stack = [concept_id]
    while stack:
        for child in taxonomy.children_of(stack.pop()):
            if child not in out:
                out.add(child)
                stack.append(child)
    return frozenset(out)


def _validate_concepts(q: Query, taxonomy: ConceptTaxonomy) -> None:
    for container in q.containers:
        for pred in container.predicates:
            if isinstance(pred, Concept):
                expand_concept(taxonomy, pred.concept_id)  # raises UnknownConcept


# --- reference (scan) evaluation -------------------------------------------------

def frame_matches(
    day: DayLog, index: int, container: FilterContainer, taxonomy: ConceptTaxonomy
) -> bool:
    """True iff this frame satisfies every predicate of the container.

    Predicates over absent sensor fields are false, never unknown.
    """
    return all(_pred_holds(p, day, index, taxonomy) for p in container.predicates)


def _pred_holds(
    pred: Predicate, day: DayLog, i: int, taxonomy: ConceptTaxonomy
) -> bool:
    frame = day.frames[i]
    sample = day.sensors[i]
    if isinstance(pred, Weekday):
        return local_weekday(frame.timestamp_utc, frame.tz_offset_min) in pred.days
    if isinstance(pred, TimeRange):
        m = local_minutes(frame.timestamp_utc, frame.tz_offset_min)
        if pred.wraps:
            return m >= pred.start_min or m <= pred.end_min
        return pred.start_min <= m <= pred.end_min
    if isinstance(pred, NamedLocation):
        return (sample is not None and sample.location_name is not None
                and sample.location_name.lower() == pred.name.lower())
    if isinstance(pred, GeoBox):
        if sample is None or sample.lat is None or sample.lon is None:
            return False
        return (pred.lat_min <= sample.lat <= pred.lat_max
                and pred.lon_min <= sample.lon <= pred.lon_max)
    if isinstance(pred, Range):
        v = getattr(sample, pred.field) if sample is not None else None
        return v is not None and CMP_OPS[pred.op](v, pred.value)
    if isinstance(pred, RangeBetween):
        v = getattr(sample, pred.field) if sample is not None else None
        return v is not None and pred.lo <= v <= pred.hi
    if isinstance(pred, Activity):
        return (sample is not None and sample.activity is not None
                and sample.activity.lower() == pred.name.lower())
    if isinstance(pred, Concept):
        expanded = expand_concept(taxonomy, pred.concept_id)
        return any(
            det.concept_id in expanded and det.confidence >= pred.min_conf
            for det in day.concepts[i]
        )
    if isinstance(pred, OcrText):
        seen = set()
        for rec in day.ocr[i]:
            seen.update(tokenize(rec.text))
        return all(tok in seen for tok in pred.tokens)
    raise TypeError(f"unknown predicate {type(pred).__name__}")


def evaluate_scan(
    q: Query, store: LifelogStore, segments: Sequence[Segment]
) -> ResultList:
    """Reference evaluation: exhaustive loop over frames and containers."""
    if not q.containers:
        raise InvalidQuery("query has no containers")
    _validate_concepts(q, store.taxonomy)
    matching: dict[str, set[int]] = {}
    for day in store.days:
        hits = set()
        for i in range(len(day)):
            for container in q.containers:
                if frame_matches(day, i, container, store.taxonomy):
                    hits.add(i)
                    break
        if hits:
            matching[day.day_id] = hits
    out: ResultList = []
    for seg in segments:
        if seg.method != q.method:
            continue
        hits = matching.get(seg.day_id)
        if not hits:
            continue
        frames = tuple(sorted(i for i in hits if seg.start <= i <= seg.end))
        if frames:
            out.append(ResultEntry(
                segment_id=seg.segment_id, day_id=seg.day_id, start=seg.start,
                end=seg.end, keyframe=seg.keyframe, frames=frames,
            ))
    out.sort(key=lambda e: (e.day_id, e.start))
    return out


# --- indexed evaluation -----------------------------------------------------------

@dataclass
class QueryIndexes:
    """Column arrays over all frames (global frame order: day-major), plus
    posting lists for sparse attachments and frame-to-segment maps."""

    day_ids: tuple[str, ...]
    n_frames: int
    frame_day: np.ndarray    # int32, day ordinal
    frame_idx: np.ndarray    # int32, index within day
    minutes: np.ndarray      # int32, local minutes since midnight
    weekday: np.ndarray      # int8, 0=Mon
    lat: np.ndarray          # float64, NaN when absent
    lon: np.ndarray
    loc_id: np.ndarray       # int32, -1 when absent
    loc_vocab: dict[str, int]
    activity_id: np.ndarray
    activity_vocab: dict[str, int]
    sensor_cols: dict[str, np.ndarray]  # field -> float64 column, NaN absent
    concept_postings: dict[str, tuple[np.ndarray, np.ndarray]]  # cid -> (ords, max conf)
    ocr_postings: dict[str, np.ndarray]  # token -> sorted frame ords
    seg_of_frame: dict[Method, np.ndarray]  # int64, segment id per frame
    segments_by_id: dict[int, Segment] = field(default_factory=dict)


def build_indexes(
    store: LifelogStore, segments_by_method: dict[Method, Sequence[Segment]]
) -> QueryIndexes:
    n = store.frame_count
    day_ids = tuple(d.day_id for d in store.days)
    frame_day = np.empty(n, dtype=np.int32)
    frame_idx = np.empty(n, dtype=np.int32)
    minutes = np.empty(n, dtype=np.int32)
    weekday = np.empty(n, dtype=np.int8)
    lat = np.full(n, np.nan)
    lon = np.full(n, np.nan)
    loc_id = np.full(n, -1, dtype=np.int32)
    activity_id = np.full(n, -1, dtype=np.int32)
    sensor_cols = {f: np.full(n, np.nan) for f in RANGE_FIELDS}
    loc_vocab: dict[str, int] = {}
    activity_vocab: dict[str, int] = {}
    concept_acc: dict[str, dict[int, float]] = {}
    ocr_acc: dict[str, set[int]] = {}

    ord_ = 0
    day_offsets = []
    for d_ord, day in enumerate(store.days):
        day_offsets.append(ord_)
        for i in range(len(day)):
            f = day.frames[i]
            frame_day[ord_] = d_ord
            frame_idx[ord_] = i
            minutes[ord_] = local_minutes(f.timestamp_utc, f.tz_offset_min)
            weekday[ord_] = local_weekday(f.timestamp_utc, f.tz_offset_min)
            s = day.sensors[i]
            if s is not None:
                if s.lat is not None:
                    lat[ord_] = s.lat
                    lon[ord_] = s.lon
                if s.location_name is not None:
                    key = s.location_name.lower()
                    loc_id[ord_] = loc_vocab.setdefault(key, len(loc_vocab))
                if s.activity is not None:
                    key = s.activity.lower()
                    activity_id[ord_] = activity_vocab.setdefault(key, len(activity_vocab))
                for fld in RANGE_FIELDS:
                    v = getattr(s, fld)
                    if v is not None:
                        sensor_cols[fld][ord_] = v
            for det in day.concepts[i]:
                per = concept_acc.setdefault(det.concept_id, {})
                if det.confidence > per.get(ord_, -1.0):
                    per[ord_] = det.confidence
            for rec in day.ocr[i]:
                for tok in tokenize(rec.text):
                    ocr_acc.setdefault(tok, set()).add(ord_)
            ord_ += 1

    concept_postings = {}
    for cid, per in concept_acc.items():
        ords = np.array(sorted(per), dtype=np.int64)
        confs = np.array([per[o] for o in sorted(per)])
        concept_postings[cid] = (ords, confs)
    ocr_postings = {
        tok: np.array(sorted(ords), dtype=np.int64) for tok, ords in ocr_acc.items()
    }

    seg_of_frame: dict[Method, np.ndarray] = {}
    segments_by_id: dict[int, Segment] = {}
    day_pos = {d: i for i, d in enumerate(day_ids)}
    for method, segs in segments_by_method.items():
        arr = np.full(n, -1, dtype=np.int64)
        for seg in segs:
            off = day_offsets[day_pos[seg.day_id]]
            arr[off + seg.start : off + seg.end + 1] = seg.segment_id
            segments_by_id[seg.segment_id] = seg
        seg_of_frame[method] = arr

    return QueryIndexes(
        day_ids=day_ids, n_frames=n, frame_day=frame_day, frame_idx=frame_idx,
        minutes=minutes, weekday=weekday, lat=lat, lon=lon,
        loc_id=loc_id, loc_vocab=loc_vocab,
        activity_id=activity_id, activity_vocab=activity_vocab,
        sensor_cols=sensor_cols, concept_postings=concept_postings,
        ocr_postings=ocr_postings, seg_of_frame=seg_of_frame,
        segments_by_id=segments_by_id,
    )


def _pred_mask(pred: Predicate, idx: QueryIndexes, taxonomy: ConceptTaxonomy) -> np.ndarray:
    n = idx.n_frames
    if isinstance(pred, Weekday):
        return np.isin(idx.weekday, np.array(sorted(pred.days), dtype=np.int8))
    if isinstance(pred, TimeRange):
        m = idx.minutes
        if pred.wraps:
            return (m >= pred.start_min) | (m <= pred.end_min)
        return (m >= pred.start_min) & (m <= pred.end_min)
    if isinstance(pred, NamedLocation):
        return idx.loc_id == idx.loc_vocab.get(pred.name.lower(), -2)
    if isinstance(pred, GeoBox):
        with np.errstate(invalid="ignore"):
            return ((idx.lat >= pred.lat_min) & (idx.lat <= pred.lat_max)
                    & (idx.lon >= pred.lon_min) & (idx.lon <= pred.lon_max))
    if isinstance(pred, Range):
        col = idx.sensor_cols[pred.field]
        with np.errstate(invalid="ignore"):
            return CMP_OPS[pred.op](col, pred.value)
    if isinstance(pred, RangeBetween):
        col = idx.sensor_cols[pred.field]
        with np.errstate(invalid="ignore"):
            return (col >= pred.lo) & (col <= pred.hi)
    if isinstance(pred, Activity):
        return idx.activity_id == idx.activity_vocab.get(pred.name.lower(), -2)
    if isinstance(pred, Concept):
        mask = np.zeros(n, dtype=bool)
        for cid in expand_concept(taxonomy, pred.concept_id):
            posting = idx.concept_postings.get(cid)
            if posting is not None:
                ords, confs = posting
                mask[ords[confs >= pred.min_conf]] = True
        return mask
    if isinstance(pred, OcrText):
        if not pred.tokens:
            return np.ones(n, dtype=bool)  # vacuous conjunction
        ords: Optional[np.ndarray] = None
        for tok in pred.tokens:
            posting = idx.ocr_postings.get(tok)
            if posting is None:
                return np.zeros(n, dtype=bool)
            ords = posting if ords is None else np.intersect1d(ords, posting, assume_unique=True)
        mask = np.zeros(n, dtype=bool)
        mask[ords] = True
        return mask
    raise TypeError(f"unknown predicate {type(pred).__name__}")


def evaluate(q: Query, idx: QueryIndexes, taxonomy: ConceptTaxonomy) -> ResultList:
    """Index-backed evaluation; observationally identical to evaluate_scan."""
    if not q.containers:
        raise InvalidQuery("query has no containers")
    _validate_concepts(q, taxonomy)
    total = np.zeros(idx.n_frames, dtype=bool)
    for container in q.containers:
        m = np.ones(idx.n_frames, dtype=bool)
        for pred in container.predicates:
            m &= _pred_mask(pred, idx, taxonomy)
            if not m.any():
                break
        total |= m
    ords = np.nonzero(total)[0]
    if ords.size == 0:
        return []
    seg_arr = idx.seg_of_frame[q.method]
    segs = seg_arr[ords]
    # global frame order is day-major, so each segment's matches are contiguous
    changes = np.nonzero(np.diff(segs))[0] + 1
    starts = np.concatenate(([0], changes)).tolist()
    ends = np.concatenate((changes, [len(segs)])).tolist()
    frame_vals = idx.frame_idx[ords]
    out: ResultList = []
    by_id = idx.segments_by_id
    for s, e in zip(starts, ends):
        seg_id = int(segs[s])
        if seg_id < 0:
            continue
        seg = by_id[seg_id]
        out.append(ResultEntry(
            segment_id=seg_id, day_id=seg.day_id, start=seg.start, end=seg.end,
            keyframe=seg.keyframe, frames=tuple(frame_vals[s:e].tolist()),
        ))
    out.sort(key=lambda entry: (entry.day_id, entry.start))
    return out
