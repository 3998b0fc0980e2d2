"""Timed retrieval tasks: staged hint release, submission checking, scoring.

A task runs for duration_s (default 180 s). Hints become visible once the
session clock passes their timestamp. A submission is correct when it names
the truth day and a frame inside the truth range. The score rewards speed
and accuracy: 100 at t=0 decaying linearly to 50 at the deadline, minus 10
per wrong submission, clamped at 0. The server clock is authoritative.
"""

from __future__ import annotations

import csv
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..errors import (
    AlreadySolved,
    MalformedRow,
    SessionExpired,
    UnknownSession,
    UnknownTask,
)
from ..ingest import TASKS_FILE, LifelogStore


@dataclass(frozen=True)
class TaskDef:
    task_id: str
    hints: tuple[tuple[float, str], ...]  # (t_seconds, text), t non-decreasing
    truth_day_id: str
    truth_start: int
    truth_end: int
    duration_s: float = 180.0

    def __post_init__(self):
        if not self.hints:
            raise ValueError(f"task {self.task_id!r} has no hints")
        ts = [t for t, _ in self.hints]
        if ts != sorted(ts) or ts[0] < 0:
            raise ValueError(f"task {self.task_id!r}: hint times must be non-decreasing from 0")
        if any(t >= self.duration_s for t in ts):
            raise ValueError(f"task {self.task_id!r}: hint time past duration")
        if self.truth_start > self.truth_end or self.truth_start < 0:
            raise ValueError(f"task {self.task_id!r}: bad truth range")


def score_for(elapsed_s: float, duration_s: float, wrong_count: int) -> float:
    """max(0, 100 - 50*(elapsed/duration) - 10*wrong)."""
    return max(0.0, 100.0 - 50.0 * (elapsed_s / duration_s) - 10.0 * wrong_count)


@dataclass
class TaskSession:
    task: TaskDef
    started_at: float
    wrong_count: int = 0
    solved: bool = False
    score: Optional[float] = None  # set once, on solve or expiry


@dataclass(frozen=True)
class SubmissionResult:
    correct: bool
    solved: bool
    wrong_count: int
    score: Optional[float]
    elapsed_s: float


class TaskManager:
    """One active session per task; submissions to a session serialize."""

    def __init__(self, tasks: dict[str, TaskDef], clock: Callable[[], float] = time.monotonic):
        self.tasks = dict(tasks)
        self.clock = clock
        self._sessions: dict[str, TaskSession] = {}
        self._lock = threading.Lock()

    def task(self, task_id: str) -> TaskDef:
        task = self.tasks.get(task_id)
        if task is None:
            raise UnknownTask(f"unknown task {task_id!r}")
        return task

    def start(self, task_id: str) -> TaskSession:
        task = self.task(task_id)
        with self._lock:
            session = TaskSession(task=task, started_at=self.clock())
            self._sessions[task_id] = session
            return session

    def _session(self, task_id: str) -> TaskSession:
        self.task(task_id)
        session = self._sessions.get(task_id)
        if session is None:
            raise UnknownSession(f"task {task_id!r} has no active session")
        return session

    def elapsed(self, task_id: str) -> float:
        return self.clock() - self._session(task_id).started_at

    def hints(self, task_id: str) -> tuple[float, list[tuple[float, str]], bool]:
        """(elapsed_s, visible hints in t order, expired)."""
        with self._lock:
            session = self._session(task_id)
            elapsed = self.clock() - session.started_at
            self._finalize_if_expired(session, elapsed)
            visible = [(t, text) for t, text in session.task.hints if t <= elapsed]
            return elapsed, visible, elapsed >= session.task.duration_s

    def submit(self, task_id: str, day_id: str, frame_index: int) -> SubmissionResult:
        with self._lock:
            session = self._session(task_id)
            elapsed = self.clock() - session.started_at
            if session.solved:
                raise AlreadySolved(f"task {task_id!r} already solved")
            if elapsed >= session.task.duration_s:
                self._finalize_if_expired(session, elapsed)
                raise SessionExpired(f"task {task_id!r} expired")
            task = session.task
            correct = (day_id == task.truth_day_id
                       and task.truth_start <= frame_index <= task.truth_end)
            if correct:
                session.solved = True
                session.score = score_for(elapsed, task.duration_s, session.wrong_count)
            else:
                session.wrong_count += 1
            return SubmissionResult(
                correct=correct, solved=session.solved,
                wrong_count=session.wrong_count, score=session.score,
                elapsed_s=elapsed,
            )

    def status(self, task_id: str) -> TaskSession:
        with self._lock:
            session = self._session(task_id)
            self._finalize_if_expired(session, self.clock() - session.started_at)
            return session

    @staticmethod
    def _finalize_if_expired(session: TaskSession, elapsed: float) -> None:
        if not session.solved and session.score is None and elapsed >= session.task.duration_s:
            session.score = 0.0


def load_tasks(root: str | Path, store: Optional[LifelogStore] = None) -> dict[str, TaskDef]:
    """Parse tasks.csv (one row per hint) into task definitions.

    With a store given, truth ranges are checked against the actual days.
    """
    path = Path(root) / TASKS_FILE
    if not path.is_file():
        return {}
    rows_by_task: dict[str, list[tuple[float, str, str, int, int, float]]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["task_id", "hint_t", "hint_text", "truth_day_id",
                    "truth_start", "truth_end", "duration_s"]
        if header != expected:
            raise MalformedRow(path.name, 1, f"bad header {header!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 7:
                raise MalformedRow(path.name, line_no, f"expected 7 columns, got {len(row)}")
            try:
                rows_by_task.setdefault(row[0], []).append(
                    (float(row[1]), row[2], row[3], int(row[4]), int(row[5]), float(row[6]))
                )
            except ValueError as exc:
                raise MalformedRow(path.name, line_no, str(exc)) from exc
    tasks = {}
    for task_id, rows in rows_by_task.items():
        truths = {(r[2], r[3], r[4], r[5]) for r in rows}
        if len(truths) != 1:
            raise MalformedRow(path.name, 0, f"task {task_id!r} has inconsistent truth rows")
        day_id, start, end, duration = next(iter(truths))
        if store is not None:
            if not store.has_day(day_id) or end >= len(store.day(day_id)):
                raise MalformedRow(path.name, 0,
                                   f"task {task_id!r} truth outside dataset")
        tasks[task_id] = TaskDef(
            task_id=task_id,
            hints=tuple(sorted(((r[0], r[1]) for r in rows), key=lambda h: h[0])),
            truth_day_id=day_id, truth_start=start, truth_end=end,
            duration_s=duration,
        )
    return tasks


@dataclass
class ManualClock:
    """Deterministic clock for tests; advances only on request."""

    now: float = 0.0
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> float:
        with self._lock:
            self.now += seconds
            return self.now
