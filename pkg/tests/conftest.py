import pytest

from amalgam import kernels


@pytest.fixture(params=sorted(kernels.BACKENDS))
def each_backend(request):
    """Run a test once per available kernel backend."""
    previous = kernels.backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, name, ok, detail, elapsed):
        line = f"criterion {number:>2}  {'PASS' if ok else 'FAIL'}  {name}: {detail} ({elapsed:.1f} s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
