import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORACLES = json.loads((Path(__file__).parent / "oracles" / "values.json").read_text())

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def symbols():
    """Numeric values of every symbol in the region polynomials at the default ladders.

    The multi-index series are cached inside the package, so later identity
    checks at the same cutoffs reuse them.
    """
    from lmhs.hpnum import DEFAULT_CTX
    from lmhs.zetaseries.identities import symbol_values

    return symbol_values(DEFAULT_CTX)
