import pytest

from qcstates.config import parse_config
from qcstates.pipeline import cmd_spectrum

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def baseline_run(tmp_path_factory):
    """Default configuration: 24 x 24 x 16 grid, k = 400."""
    out = tmp_path_factory.mktemp("baseline") / "run"
    return cmd_spectrum(parse_config(""), out)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
