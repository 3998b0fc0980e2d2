"""Pydantic request/response models for the HTTP API.

The structured query JSON mirrors the engine's predicate types one-to-one;
``to_query`` converts a validated payload into the engine AST.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

from .. import query as q
from ..errors import InvalidQuery
from ..query import WEEKDAY_NAMES
from ..segment import Method

RangeField = Literal["speed_kmh", "heart_rate_bpm", "steps", "calories"]


# --- structured query ------------------------------------------------------------

class WeekdayPredicate(BaseModel):
    kind: Literal["weekday"]
    days: list[str]

    @field_validator("days")
    @classmethod
    def _known_days(cls, v: list[str]) -> list[str]:
        for day in v:
            if day.lower() not in WEEKDAY_NAMES:
                raise ValueError(f"unknown weekday {day!r}")
        return v


class TimePredicate(BaseModel):
    kind: Literal["time"]
    start: str  # "HH:MM"
    end: str


class LocationPredicate(BaseModel):
    kind: Literal["loc"]
    name: str


class GeoPredicate(BaseModel):
    kind: Literal["geo"]
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float


class RangePredicate(BaseModel):
    kind: Literal["range"]
    field: RangeField
    op: Literal["<", "<=", "=", ">=", ">"]
    value: float


class BetweenPredicate(BaseModel):
    kind: Literal["between"]
    field: RangeField
    lo: float
    hi: float


class ActivityPredicate(BaseModel):
    kind: Literal["activity"]
    name: str


class ConceptPredicate(BaseModel):
    kind: Literal["concept"]
    id: str
    min_conf: float = 0.0


class OcrPredicate(BaseModel):
    kind: Literal["ocr"]
    text: str


PredicateModel = Annotated[
    Union[
        WeekdayPredicate, TimePredicate, LocationPredicate, GeoPredicate,
        RangePredicate, BetweenPredicate, ActivityPredicate, ConceptPredicate,
        OcrPredicate,
    ],
    Field(discriminator="kind"),
]


class ContainerModel(BaseModel):
    predicates: list[PredicateModel] = Field(min_length=1)


class StructuredQuery(BaseModel):
    containers: list[ContainerModel] = Field(min_length=1)
    method: Optional[Method] = None


class QueryRequest(BaseModel):
    dsl: Optional[str] = None
    structured: Optional[StructuredQuery] = None
    method: Optional[Method] = None  # method for DSL queries


def _parse_hhmm(text: str) -> int:
    parts = text.split(":")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise InvalidQuery(f"bad time {text!r}, expected HH:MM")
    h, m = int(parts[0]), int(parts[1])
    if h > 23 or m > 59:
        raise InvalidQuery(f"time {text!r} outside 00:00..23:59")
    return h * 60 + m


def _to_predicate(model: BaseModel) -> q.Predicate:
    if isinstance(model, WeekdayPredicate):
        return q.Weekday(days=frozenset(WEEKDAY_NAMES.index(d.lower()) for d in model.days))
    if isinstance(model, TimePredicate):
        return q.TimeRange(start_min=_parse_hhmm(model.start), end_min=_parse_hhmm(model.end))
    if isinstance(model, LocationPredicate):
        return q.NamedLocation(name=model.name)
    if isinstance(model, GeoPredicate):
        return q.GeoBox(lat_min=model.lat_min, lat_max=model.lat_max,
                        lon_min=model.lon_min, lon_max=model.lon_max)
    if isinstance(model, RangePredicate):
        return q.Range(field=model.field, op=model.op, value=model.value)
    if isinstance(model, BetweenPredicate):
        return q.RangeBetween(field=model.field, lo=model.lo, hi=model.hi)
    if isinstance(model, ActivityPredicate):
        return q.Activity(name=model.name)
    if isinstance(model, ConceptPredicate):
        return q.Concept(concept_id=model.id, min_conf=model.min_conf)
    if isinstance(model, OcrPredicate):
        return q.OcrText(tokens=tuple(q.tokenize(model.text)))
    raise TypeError(type(model).__name__)


def to_query(model: StructuredQuery, default_method: Method) -> q.Query:
    return q.Query(
        containers=tuple(
            q.FilterContainer(predicates=tuple(_to_predicate(p) for p in c.predicates))
            for c in model.containers
        ),
        method=model.method or default_method,
    )


# --- requests ---------------------------------------------------------------------

class SketchRequest(BaseModel):
    cells: list[Optional[int]] = Field(min_length=16, max_length=16)
    k: int = Field(default=12, ge=1)
    method: Optional[Method] = None


class SubmitRequest(BaseModel):
    day_id: str
    frame_index: int = Field(ge=0)


class AdvanceRequest(BaseModel):
    seconds: float = Field(ge=0)


# --- responses ---------------------------------------------------------------------

class ErrorBody(BaseModel):
    code: str
    message: str
    detail: Optional[dict] = None


class SegmentInfo(BaseModel):
    segment_id: int
    day_id: str
    start: int
    end: int
    keyframe: int
    keyframe_url: str


class HealthResponse(BaseModel):
    status: str
    days: int
    frames: int
    segments: dict[str, int]
    vectors_available: bool
    vector_dim: Optional[int]
    default_method: str
    fps: int
    concepts: list[str]
    locations: list[str]
    activities: list[str]
    tasks: list[dict]


class MapsResponse(BaseModel):
    criteria: list[str]
    methods: list[str]
    concept_criteria: list[str]
    viewport: int


class TileCell(BaseModel):
    row: int
    col: int
    segment_id: Optional[int]
    score: Optional[float]
    empty: bool
    keyframe_url: Optional[str]
    day_id: Optional[str] = None
    keyframe: Optional[int] = None


class TileResponse(BaseModel):
    criterion: str
    method: str
    level: int
    levels: int
    level_rows: int
    level_cols: int
    row0: int
    col0: int
    rows: int
    cols: int
    cells: list[TileCell]


class QueryResultEntry(BaseModel):
    segment_id: int
    day_id: str
    start: int
    end: int
    keyframe: int
    keyframe_url: str
    frames: list[int]


class QueryResponse(BaseModel):
    method: str
    total: int
    results: list[QueryResultEntry]


class NeighborEntry(BaseModel):
    segment_id: int
    score: float
    rank: int
    day_id: str
    start: int
    end: int
    keyframe: int
    keyframe_url: str


class NeighborsResponse(BaseModel):
    metric: str
    method: str
    results: list[NeighborEntry]


class DaySummaryResponse(BaseModel):
    day_id: str
    method: str
    frame_count: int
    prev_day: Optional[str]
    next_day: Optional[str]
    segments: list[SegmentInfo]


class FramePayload(BaseModel):
    day_id: str
    index: int
    width: int
    height: int
    rgb_base64: str


class FrameMeta(BaseModel):
    index: int
    timestamp_utc: int
    tz_offset_min: int
    local_minutes: int
    weekday: int
    sensor: Optional[dict]
    concepts: list[dict]
    ocr: list[str]


class DayMetaResponse(BaseModel):
    day_id: str
    fps: int
    frame_count: int
    frames: list[FrameMeta]


class TaskStartResponse(BaseModel):
    task_id: str
    duration_s: float
    elapsed_s: float


class HintEntry(BaseModel):
    t: float
    text: str


class HintsResponse(BaseModel):
    task_id: str
    elapsed_s: float
    expired: bool
    hints: list[HintEntry]


class SubmitResponse(BaseModel):
    task_id: str
    correct: bool
    solved: bool
    wrong_count: int
    score: Optional[float]
    elapsed_s: float
