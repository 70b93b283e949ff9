import functools

import pytest
from hypothesis import settings

from quadpack.fixtures import FIXTURES
from quadpack.packing import Mode, PackOptions, pack
from quadpack.pipeline import run_method

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

MODES = {"centered": Mode.BOUNDARY_CENTERED, "tangent": Mode.BOUNDARY_TANGENT}
PACK_MODE = {"voronoi": "centered", "rightangle": "centered", "kite": "tangent",
             "maxangle": "tangent"}


@functools.lru_cache(maxsize=None)
def packing_of(name, mode):
    return pack(FIXTURES[name](), PackOptions(mode=MODES[mode]))


@functools.lru_cache(maxsize=None)
def result_of(name, method):
    return run_method(FIXTURES[name](), method, packing=packing_of(name, PACK_MODE[method]))


@pytest.fixture(scope="session")
def packings():
    return packing_of


@pytest.fixture(scope="session")
def results():
    return result_of


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(n, ok, detail):
        lines[n] = f"criterion {n:2d}\t{'PASS' if ok else 'FAIL'}\t{detail}"
        print(lines[n])
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
