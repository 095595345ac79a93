import pytest

VERDICTS: dict[str, str] = {}


@pytest.fixture
def verdict():
    def record(name: str, ok: bool, detail: str = "") -> bool:
        line = f"{name}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        VERDICTS[name] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for name in sorted(VERDICTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(VERDICTS[name])
