from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from agentminer.logio import ColumnMapping, parse_csv

DATA = Path(__file__).parent / "data"

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def table1_path():
    return DATA / "table1.csv"


@pytest.fixture
def table1(table1_path):
    """Running example with agent types a1/a2/a3 as the agent attribute."""
    return parse_csv(table1_path, ColumnMapping(agent_column="type"))


@pytest.fixture
def table1_instances(table1_path):
    return parse_csv(table1_path, ColumnMapping(agent_column="instance"))


def names(trace):
    return tuple(e.extras["event"] for e in trace)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
