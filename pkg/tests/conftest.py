import pytest

from stickweave.wang import WangInstance, WangTile


def wang(k, *tiles):
    return WangInstance(k, tuple(WangTile(*t) for t in tiles))


# tiles are (north, east, south, west)
CHECKERBOARD = wang(2, (1, 1, 1, 2), (1, 2, 1, 1))
UNIFORM = wang(1, (1, 1, 1, 1))
BROKEN = wang(2, (1, 1, 1, 2))

CORPUS = {
    "uniform": UNIFORM,
    "broken": BROKEN,
    "checkerboard": CHECKERBOARD,
    "stripes": wang(2, (2, 1, 1, 1), (1, 1, 2, 1)),
    "three": wang(3, (1, 2, 1, 3), (1, 3, 1, 2), (1, 1, 1, 1)),
    "mixed": wang(3, (1, 2, 3, 2), (3, 2, 1, 2), (2, 1, 2, 1)),
}


@pytest.fixture
def checkerboard():
    return CHECKERBOARD


# acceptance results, printed once at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
