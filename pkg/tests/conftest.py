import pytest

from watchrisk.scores import Population

ACCEPTANCE_RESULTS = []


def make_population(genuine, impostor, score_max=100.0):
    """Population straight from ``{subject: [scores]}`` dicts."""
    return Population(dict(genuine), dict(impostor), score_max)


@pytest.fixture
def population_factory():
    return make_population


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")
