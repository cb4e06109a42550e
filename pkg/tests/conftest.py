import contextlib

import pytest

_VERDICTS = {}


class Verdicts:
    """Collects one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def criterion(self, key, detail=""):
        _VERDICTS[key] = ("FAIL", detail)
        try:
            yield
        except BaseException as e:
            _VERDICTS[key] = ("FAIL", f"{detail} {type(e).__name__}: {e}".strip()[:300])
            raise
        _VERDICTS[key] = ("PASS", detail)

    def note(self, key, status, detail):
        _VERDICTS[key] = (status, detail)


@pytest.fixture(scope="session")
def verdicts():
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_VERDICTS, key=str):
        status, detail = _VERDICTS[key]
        line = f"criterion {key}: {status}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
