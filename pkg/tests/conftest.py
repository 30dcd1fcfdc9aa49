from __future__ import annotations

import os
import sys
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from hyperpoly.analyzer import AnalysisConfig, analyze_program  # noqa: E402
from hyperpoly.frontend import parse_program  # noqa: E402

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much]
)
# fresh generation only, so statistics count newly generated cases
settings.register_profile("acceptance", parent=settings.get_profile("default"), database=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

BENCH = resources.files("hyperpoly") / "benchmarks"

# filled by test_acceptance, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def bench_source(name: str) -> str:
    return (BENCH / name).read_text()


@pytest.fixture(scope="session")
def water_level():
    return parse_program(bench_source("water_level.wdt"))


@pytest.fixture(scope="session")
def thermostat():
    return parse_program(bench_source("thermostat.wdt"))


@pytest.fixture(scope="session")
def elapse():
    return parse_program(bench_source("elapse.wdt"))


@pytest.fixture(scope="session")
def water_level_result(water_level):
    return analyze_program(water_level, AnalysisConfig())


@pytest.fixture(scope="session")
def thermostat_result(thermostat):
    return analyze_program(thermostat, AnalysisConfig())


@pytest.fixture
def bench_path():
    def get(name: str) -> str:
        return str(BENCH / name)
    return get
