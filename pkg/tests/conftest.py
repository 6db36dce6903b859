import functools

import pytest

from twoatom import _backend
from twoatom.scenario import figure_preset, run_scenario

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def preset_run(number, engine="collective", caption=True, gamma12=None):
    """Cached figure trajectories shared between test modules."""
    return run_scenario(figure_preset(number, caption_couplings=caption, engine=engine, gamma12=gamma12))


@pytest.fixture(params=_backend.BACKENDS if _backend.numba is not None else ("numpy",))
def backend(request):
    previous = _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
