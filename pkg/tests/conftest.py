import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = []


class AcceptanceRecorder:
    """Collects one verdict line per acceptance criterion."""

    def __init__(self, capsys):
        self._capsys = capsys

    def __call__(self, number, title, ok, detail):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _ACCEPTANCE.append(line)
        with self._capsys.disabled():
            print("\n" + line)
        return ok


@pytest.fixture
def acceptance(capsys):
    return AcceptanceRecorder(capsys)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
