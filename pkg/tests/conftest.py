from __future__ import annotations

import json
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from surfdefect.lattice import defect_map_from_json

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
# opt-in deeper search: HYPOTHESIS_PROFILE=stress pytest -m "not slow"
settings.register_profile("stress", parent=settings.get_profile("repo"), derandomize=False, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str):
    """(spec, defect map, raw json) for a committed fixture."""
    text = (FIXTURES / name).read_text(encoding="utf-8")
    spec, dm = defect_map_from_json(text)
    return spec, dm, json.loads(text)


@pytest.fixture
def worked_example():
    return load_fixture("worked_example.json")


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[n])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
