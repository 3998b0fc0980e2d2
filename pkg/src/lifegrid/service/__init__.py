from .app import create_app
from .tasks import ManualClock, TaskDef, TaskManager, TaskSession, load_tasks, score_for

__all__ = [
    "create_app",
    "ManualClock",
    "TaskDef",
    "TaskManager",
    "TaskSession",
    "load_tasks",
    "score_for",
]
