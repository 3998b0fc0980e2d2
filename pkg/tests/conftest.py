import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make helpers importable

from lifegrid.engine import Engine, EngineConfig  # noqa: E402
from lifegrid.synth import generate_synthetic  # noqa: E402


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory) -> Path:
    """Small shared synthetic dataset (3 days x 60 frames)."""
    root = tmp_path_factory.mktemp("dataset")
    generate_synthetic(seed=11, days=3, frames_per_day=60, out=root)
    return root


@pytest.fixture(scope="session")
def engine(dataset_dir) -> Engine:
    return Engine.load(EngineConfig(dataset=dataset_dir, histmap_cache=False))


ACCEPTANCE_FILE = "test_acceptance.py"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            nodeid = getattr(report, "nodeid", "")
            if ACCEPTANCE_FILE not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            status = "PASS" if outcome == "passed" else "FAIL"
            lines.append((name, status))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in lines:
            terminalreporter.write_line(f"{status}  {name}")
