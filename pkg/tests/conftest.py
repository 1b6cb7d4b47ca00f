from importlib import resources
from pathlib import Path

import pytest

from confact.chunking import Granularity, Passage
from confact.corpus import load_dataset
from confact.ranking import RankedPassage

DATA = Path(str(resources.files("confact.data")))


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def fixture_records():
    return load_dataset(DATA / "fixture_dataset.jsonl")


def make_passage(text, pid="p0", domain="example.com", doc="d0"):
    return Passage(pid, doc, text, len(text.split()), Granularity.PARAGRAPH, (0, len(text)), domain)


def make_ranked(texts_domains):
    out = []
    for i, (text, domain) in enumerate(texts_domains):
        out.append(RankedPassage(make_passage(text, f"p{i}", domain, f"d{i}"), 1.0, 1.0, None, 1.0, i + 1))
    return out


# -- acceptance summary ----------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or report.outcome != "passed":
        previous = _CRITERIA.get(number, (title, "PASS"))[1]
        outcome = "PASS" if report.outcome == "passed" and previous == "PASS" else "FAIL"
        _CRITERIA[number] = (title, outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome = _CRITERIA[number]
        terminalreporter.write_line(f"[{outcome}] criterion {number:2d}: {title}")
