import numpy as np
import pytest

from streamplan.flowfield import Domain, GriddedField, GyreLattice, LinearSaddle, Uniform


@pytest.fixture(scope="session")
def gyre():
    return GyreLattice(v_peak=1.0, cell_size=1000.0, n_x=2, n_y=2)


@pytest.fixture(scope="session")
def gridded_gyre(gyre):
    # s/100 = 10 m resolution over the whole lattice
    return GriddedField.sample(gyre, (0.0, 0.0), 10.0, 10.0, 201, 201)


@pytest.fixture
def saddle():
    return LinearSaddle(1e-4)


@pytest.fixture
def still():
    return Uniform(0.0, 0.0)


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def record(request):
    """Log one acceptance line, then assert it."""
    lines = request.config.stash[ACCEPTANCE]

    def _record(number, name, ok, detail=""):
        lines.append((number, name, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {name}: {detail}")
        assert ok, f"criterion {number} ({name}) failed: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(lines, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}  {name}  {detail}")
