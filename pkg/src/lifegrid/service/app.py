"""HTTP facade over the engine.

All read endpoints serve immutable engine state and are freely concurrent;
task sessions are the only mutable state and live in the TaskManager.
Every error body has the shape {code, message, detail}.
"""

from __future__ import annotations

import base64
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .. import dsl
from ..descriptor import GRID, PALETTE, PALETTE_SIZE, sketch_to_histmap
from ..engine import Engine
from ..errors import (
    AllBlank,
    AlreadySolved,
    BadRate,
    EmptyInput,
    EmptyMask,
    InvalidQuery,
    LifegridError,
    MetricUnavailable,
    OutOfBounds,
    SessionExpired,
    UnknownConcept,
    UnknownCriterion,
    UnknownDay,
    UnknownFrame,
    UnknownMethod,
    UnknownSegment,
    UnknownSession,
    UnknownTask,
)
from ..ingest import PLAYBACK_FPS
from ..query import local_minutes, local_weekday
from ..segment import METHODS, Method
from ..simsearch import METRICS, Metric
from . import models
from .tasks import ManualClock, TaskManager

_STATUS_BY_CODE = {
    UnknownDay: 404, UnknownFrame: 404, UnknownSegment: 404, UnknownTask: 404,
    UnknownConcept: 404, UnknownCriterion: 404, UnknownSession: 404,
    UnknownMethod: 400, InvalidQuery: 400, dsl.ParseError: 400,
    EmptyMask: 400, AllBlank: 400, EmptyInput: 400, OutOfBounds: 400,
    BadRate: 400, MetricUnavailable: 409, AlreadySolved: 409,
    SessionExpired: 410,
}


def _error_response(status: int, code: str, message: str, detail: Optional[dict] = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(
    engine: Engine,
    tasks: TaskManager,
    static_dir: Optional[Path] = None,
    test_clock: Optional[ManualClock] = None,
) -> FastAPI:
    app = FastAPI(title="lifegrid", version="0.1.0", docs_url="/api/docs",
                  openapi_url="/api/openapi.json")

    @app.exception_handler(LifegridError)
    async def _engine_error(request: Request, exc: LifegridError):
        status = 500
        for klass, st in _STATUS_BY_CODE.items():
            if isinstance(exc, klass):
                status = st
                break
        detail = None
        if isinstance(exc, dsl.ParseError):
            detail = {"offset": exc.offset, "line": exc.line,
                      "column": exc.column, "expected": exc.expected}
        return _error_response(status, exc.code, str(exc), detail)

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        return _error_response(exc.status_code, "http_error", str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response(422, "validation_error", "invalid request body",
                               {"errors": exc.errors()})

    def _keyframe_url(day_id: str, index: int) -> str:
        return f"/api/days/{day_id}/frames/{index}"

    def _method(value: Optional[str]) -> Method:
        if value is None:
            return engine.config.method
        if value not in METHODS:
            raise UnknownMethod(f"unknown method {value!r}")
        return value  # type: ignore[return-value]

    def _day(day_id: str):
        if not engine.store.has_day(day_id):
            raise UnknownDay(f"unknown day {day_id!r}")
        return engine.store.day(day_id)

    # --- health / maps -------------------------------------------------------

    @app.get("/api/health", response_model=models.HealthResponse)
    def health():
        summary = engine.summary()
        return models.HealthResponse(
            status="ok", fps=PLAYBACK_FPS,
            tasks=[{"task_id": t.task_id, "duration_s": t.duration_s,
                    "hint_count": len(t.hints)} for t in tasks.tasks.values()],
            **summary,
        )

    @app.get("/api/palette")
    def palette():
        return {"palette": [{"index": i, "name": name, "rgb": list(rgb)}
                            for i, (name, rgb) in enumerate(PALETTE)],
                "grid": GRID}

    @app.get("/api/maps", response_model=models.MapsResponse)
    def maps():
        return models.MapsResponse(
            criteria=engine.criteria(),
            methods=list(METHODS),
            concept_criteria=[f"concept:{c}" for c in sorted(engine.store.taxonomy.nodes)],
            viewport=engine.config.viewport,
        )

    @app.get("/api/maps/{criterion}/{method}/levels/{level}",
             response_model=models.TileResponse)
    def map_tile(criterion: str, method: str, level: int,
                 row0: int = 0, col0: int = 0, rows: int = 8, cols: int = 8):
        pyramid = engine.pyramid(criterion, _method(method))
        if not 0 <= level < len(pyramid.levels):
            raise OutOfBounds(f"level {level} outside pyramid of {len(pyramid.levels)} levels")
        grid = pyramid.levels[level]
        row0 = max(0, min(row0, grid.rows - 1))
        col0 = max(0, min(col0, grid.cols - 1))
        rows = max(1, min(rows, grid.rows - row0))
        cols = max(1, min(cols, grid.cols - col0))
        cells = []
        for r in range(row0, row0 + rows):
            for c in range(col0, col0 + cols):
                seg_id, score = grid.at(r, c)
                if seg_id is None:
                    cells.append(models.TileCell(row=r, col=c, segment_id=None,
                                                 score=None, empty=True,
                                                 keyframe_url=None))
                else:
                    seg = engine.seg_by_id[seg_id]
                    cells.append(models.TileCell(
                        row=r, col=c, segment_id=seg_id, score=score, empty=False,
                        keyframe_url=_keyframe_url(seg.day_id, seg.keyframe),
                        day_id=seg.day_id, keyframe=seg.keyframe,
                    ))
        return models.TileResponse(
            criterion=criterion, method=method, level=level,
            levels=len(pyramid.levels), level_rows=grid.rows,
            level_cols=grid.cols, row0=row0, col0=col0, rows=rows, cols=cols,
            cells=cells,
        )

    # --- days ------------------------------------------------------------------

    @app.get("/api/days", response_model=list[str])
    def days():
        return [d.day_id for d in engine.store.days]

    @app.get("/api/days/{day_id}/summary", response_model=models.DaySummaryResponse)
    def day_summary(day_id: str, method: Optional[str] = None):
        day = _day(day_id)
        m = _method(method)
        pos = engine.store.day_position(day_id)
        all_days = engine.store.days
        segs = [s for s in engine.segments[m] if s.day_id == day_id]
        return models.DaySummaryResponse(
            day_id=day_id, method=m, frame_count=len(day),
            prev_day=all_days[pos - 1].day_id if pos > 0 else None,
            next_day=all_days[pos + 1].day_id if pos + 1 < len(all_days) else None,
            segments=[models.SegmentInfo(
                segment_id=s.segment_id, day_id=s.day_id, start=s.start,
                end=s.end, keyframe=s.keyframe,
                keyframe_url=_keyframe_url(s.day_id, s.keyframe),
            ) for s in segs],
        )

    @app.get("/api/days/{day_id}/frames/{index}", response_model=models.FramePayload)
    def frame_payload(day_id: str, index: int):
        day = _day(day_id)
        if not 0 <= index < len(day):
            raise UnknownFrame(f"frame {index} outside day {day_id!r}")
        raster = day.rasters[index]
        return models.FramePayload(
            day_id=day_id, index=index, width=raster.width, height=raster.height,
            rgb_base64=base64.b64encode(raster.pixels).decode("ascii"),
        )

    @app.get("/api/days/{day_id}/meta", response_model=models.DayMetaResponse)
    def day_meta(day_id: str):
        day = _day(day_id)
        frames = []
        for i, f in enumerate(day.frames):
            sample = day.sensors[i]
            sensor = None
            if sample is not None:
                sensor = {k: v for k, v in vars(sample).items() if v is not None}
            frames.append(models.FrameMeta(
                index=i, timestamp_utc=f.timestamp_utc,
                tz_offset_min=f.tz_offset_min,
                local_minutes=local_minutes(f.timestamp_utc, f.tz_offset_min),
                weekday=local_weekday(f.timestamp_utc, f.tz_offset_min),
                sensor=sensor,
                concepts=[{"id": d.concept_id, "confidence": d.confidence,
                           "bbox": list(d.bbox) if d.bbox else None}
                          for d in day.concepts[i]],
                ocr=[rec.text for rec in day.ocr[i]],
            ))
        return models.DayMetaResponse(day_id=day_id, fps=PLAYBACK_FPS,
                                      frame_count=len(day), frames=frames)

    # --- retrieval ----------------------------------------------------------------

    def _query_response(q) -> models.QueryResponse:
        results = engine.evaluate(q)
        return models.QueryResponse(
            method=q.method, total=len(results),
            results=[models.QueryResultEntry(
                segment_id=e.segment_id, day_id=e.day_id, start=e.start,
                end=e.end, keyframe=e.keyframe,
                keyframe_url=_keyframe_url(e.day_id, e.keyframe),
                frames=list(e.frames),
            ) for e in results],
        )

    @app.post("/api/query", response_model=models.QueryResponse)
    def run_query(body: models.QueryRequest):
        if (body.dsl is None) == (body.structured is None):
            raise InvalidQuery("provide exactly one of 'dsl' or 'structured'")
        if body.dsl is not None:
            q = dsl.parse(body.dsl, method=_method(body.method))
        else:
            q = models.to_query(body.structured, default_method=engine.config.method)
        return _query_response(q)

    @app.post("/api/sketch", response_model=models.NeighborsResponse)
    def sketch(body: models.SketchRequest):
        for v in body.cells:
            if v is not None and not 0 <= v < PALETTE_SIZE:
                raise InvalidQuery(f"palette index {v} outside 0..{PALETTE_SIZE - 1}")
        canvas = [[body.cells[r * GRID + c] for c in range(GRID)] for r in range(GRID)]
        sk = sketch_to_histmap(canvas)
        m = _method(body.method)
        neighbors = engine.sketch_search(sk, body.k, m)
        return _neighbors_response("histmap_l1", m, neighbors)

    @app.get("/api/similar/{segment_id}", response_model=models.NeighborsResponse)
    def similar(segment_id: int, metric: Metric = "cosine_deep", k: int = 12):
        if metric not in METRICS:
            raise MetricUnavailable(f"unknown metric {metric!r}")
        seg = engine.segment(segment_id)
        neighbors = engine.knn(segment_id, k, metric)
        return _neighbors_response(metric, seg.method, neighbors)

    def _neighbors_response(metric: str, method: str, neighbors) -> models.NeighborsResponse:
        entries = []
        for n in neighbors:
            seg = engine.seg_by_id[n.segment_id]
            entries.append(models.NeighborEntry(
                segment_id=n.segment_id, score=n.score, rank=n.rank,
                day_id=seg.day_id, start=seg.start, end=seg.end,
                keyframe=seg.keyframe,
                keyframe_url=_keyframe_url(seg.day_id, seg.keyframe),
            ))
        return models.NeighborsResponse(metric=metric, method=method, results=entries)

    # --- task harness ---------------------------------------------------------------

    @app.post("/api/tasks/{task_id}/start", response_model=models.TaskStartResponse)
    def task_start(task_id: str):
        session = tasks.start(task_id)
        return models.TaskStartResponse(task_id=task_id,
                                        duration_s=session.task.duration_s,
                                        elapsed_s=0.0)

    @app.get("/api/tasks/{task_id}/hints", response_model=models.HintsResponse)
    def task_hints(task_id: str):
        elapsed, visible, expired = tasks.hints(task_id)
        return models.HintsResponse(
            task_id=task_id, elapsed_s=elapsed, expired=expired,
            hints=[models.HintEntry(t=t, text=text) for t, text in visible],
        )

    @app.post("/api/tasks/{task_id}/submit", response_model=models.SubmitResponse)
    def task_submit(task_id: str, body: models.SubmitRequest):
        result = tasks.submit(task_id, body.day_id, body.frame_index)
        return models.SubmitResponse(
            task_id=task_id, correct=result.correct, solved=result.solved,
            wrong_count=result.wrong_count, score=result.score,
            elapsed_s=result.elapsed_s,
        )

    # --- test-only clock ---------------------------------------------------------------

    if test_clock is not None:
        @app.post("/api/_test/advance")
        def advance_clock(body: models.AdvanceRequest):
            return {"now": test_clock.advance(body.seconds)}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
