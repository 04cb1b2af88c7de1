import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("symplex", max_examples=40, deadline=None)
settings.load_profile("symplex")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import OUTCOMES

    if not OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(OUTCOMES):
        terminalreporter.write_line(OUTCOMES[number])
