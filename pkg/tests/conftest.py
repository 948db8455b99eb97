import pytest

_outcomes: dict[str, list[str]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if call.when != "call" and not (call.when == "setup" and call.excinfo):
        return
    label = marker.args[0]
    _outcomes.setdefault(label, []).append("FAIL" if call.excinfo else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes):
        status = "FAIL" if "FAIL" in _outcomes[label] else "PASS"
        terminalreporter.write_line(f"{status}  {label}")


@pytest.fixture
def kind_text():
    return "Kind\tKinder\tN;NOM;PL\nKind\tKindern\tN;DAT;PL\n"
