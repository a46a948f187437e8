import pytest

_RESULTS = {}


class CriterionLog:
    def record(self, number: int, title: str, ok: bool, detail: str) -> bool:
        _RESULTS[number] = (title, ok, detail)
        print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}: {detail}")
        return ok


@pytest.fixture(scope="session")
def criteria():
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok, detail = _RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}: {detail}")
