import pytest

from lifegrid.errors import (
    AlreadySolved,
    MalformedRow,
    SessionExpired,
    UnknownSession,
    UnknownTask,
)
from lifegrid.service.tasks import (
    ManualClock,
    TaskDef,
    TaskManager,
    load_tasks,
    score_for,
)
from lifegrid.synth import generate_synthetic
from lifegrid.ingest import load_dataset


def staged_task(task_id="t1", duration=180.0):
    hints = tuple((float(t), f"clue {t}") for t in range(0, 180, 30))
    return TaskDef(task_id=task_id, hints=hints, truth_day_id="d1",
                   truth_start=10, truth_end=20, duration_s=duration)


@pytest.fixture
def manager():
    clock = ManualClock()
    return TaskManager({"t1": staged_task()}, clock=clock), clock


def test_score_formula_worked_cases():
    assert score_for(0, 180, 0) == 100.0
    assert score_for(180 - 1e-9, 180, 0) == pytest.approx(50.0, abs=1e-6)
    assert score_for(90, 180, 2) == 55.0
    assert score_for(180, 180, 10) == 0.0  # clamped


def test_score_monotone_decreasing():
    prev = 101.0
    for t in range(0, 180, 10):
        s = score_for(t, 180, 0)
        assert 0.0 <= s <= 100.0
        assert s < prev
        prev = s
    assert score_for(60, 180, 1) < score_for(60, 180, 0)


def test_hints_release_schedule(manager):
    mgr, clock = manager
    mgr.start("t1")
    elapsed, visible, expired = mgr.hints("t1")
    assert [t for t, _ in visible] == [0.0]
    clock.advance(60)
    _, visible, _ = mgr.hints("t1")
    assert [t for t, _ in visible] == [0.0, 30.0, 60.0]
    clock.advance(1000)
    _, visible, expired = mgr.hints("t1")
    assert len(visible) == 6
    assert expired


def test_hint_monotonicity(manager):
    mgr, clock = manager
    mgr.start("t1")
    seen = set()
    for _ in range(10):
        _, visible, _ = mgr.hints("t1")
        now = {t for t, _ in visible}
        assert seen <= now
        seen = now
        clock.advance(20)


def test_submit_correct_and_wrong(manager):
    mgr, clock = manager
    mgr.start("t1")
    r = mgr.submit("t1", "d1", 5)  # outside truth range
    assert not r.correct and r.wrong_count == 1 and r.score is None
    r = mgr.submit("t1", "d2", 15)  # wrong day
    assert not r.correct and r.wrong_count == 2
    clock.advance(90)
    r = mgr.submit("t1", "d1", 15)
    assert r.correct and r.solved
    assert r.score == 100 - 25 - 20 == 55
    with pytest.raises(AlreadySolved):
        mgr.submit("t1", "d1", 15)


def test_truth_range_inclusive(manager):
    mgr, clock = manager
    mgr.start("t1")
    assert mgr.submit("t1", "d1", 10).correct  # start boundary
    mgr.start("t1")
    assert mgr.submit("t1", "d1", 20).correct  # end boundary


def test_expiry(manager):
    mgr, clock = manager
    mgr.start("t1")
    clock.advance(180)
    with pytest.raises(SessionExpired):
        mgr.submit("t1", "d1", 15)
    assert mgr.status("t1").score == 0.0  # finalized once, unsolved


def test_unknown_task_and_session(manager):
    mgr, clock = manager
    with pytest.raises(UnknownTask):
        mgr.start("nope")
    with pytest.raises(UnknownSession):
        mgr.submit("t1", "d1", 15)


def test_restart_resets_session(manager):
    mgr, clock = manager
    mgr.start("t1")
    mgr.submit("t1", "d1", 0)
    mgr.start("t1")
    assert mgr.status("t1").wrong_count == 0


def test_taskdef_validation():
    with pytest.raises(ValueError):
        TaskDef(task_id="x", hints=(), truth_day_id="d", truth_start=0,
                truth_end=1)
    with pytest.raises(ValueError):
        TaskDef(task_id="x", hints=((200.0, "late"),), truth_day_id="d",
                truth_start=0, truth_end=1, duration_s=180)
    with pytest.raises(ValueError):
        TaskDef(task_id="x", hints=((0.0, "a"),), truth_day_id="d",
                truth_start=5, truth_end=2)


def test_load_tasks_from_synthetic(tmp_path):
    generate_synthetic(seed=10, days=2, frames_per_day=40, out=tmp_path)
    store = load_dataset(tmp_path)
    tasks = load_tasks(tmp_path, store)
    assert set(tasks) == {"t01", "t02"}
    for t in tasks.values():
        assert [h[0] for h in t.hints] == [0.0, 30.0, 60.0, 90.0, 120.0, 150.0]
        assert t.duration_s == 180.0
        assert store.has_day(t.truth_day_id)


def test_load_tasks_rejects_inconsistent_truth(tmp_path):
    (tmp_path / "tasks.csv").write_text(
        "task_id,hint_t,hint_text,truth_day_id,truth_start,truth_end,duration_s\n"
        "t1,0,a,d1,0,5,180\n"
        "t1,30,b,d1,0,6,180\n")
    with pytest.raises(MalformedRow):
        load_tasks(tmp_path)
