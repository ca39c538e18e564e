import pytest

from parity_watermark.core import BitMatrix, PixelImage

_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "acceptance" in report.keywords:
        _acceptance.append((report.head_line or report.nodeid, report.outcome))
    elif report.when == "setup" and report.outcome != "passed" and "acceptance" in report.keywords:
        _acceptance.append((report.head_line or report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")


@pytest.fixture
def img():
    def make(rows, depth=2):
        return PixelImage.from_rows(rows, depth)

    return make


@pytest.fixture
def bits():
    return BitMatrix.from_rows
