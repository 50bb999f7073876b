from importlib import resources
from pathlib import Path

import pytest

from smishdetect.corpus import load_corpus
from smishdetect.pipeline import PipelineConfig

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def config():
    return PipelineConfig()


@pytest.fixture(scope="session")
def sample_corpus_path():
    return Path(str(resources.files("smishdetect.data").joinpath("sample_corpus.tsv")))


@pytest.fixture(scope="session")
def sample_corpus(sample_corpus_path):
    return load_corpus(sample_corpus_path)


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::"
    if marker in report.nodeid and report.when == "call":
        ACCEPTANCE[report.nodeid.split(marker, 1)[1]] = report.outcome
    elif marker in report.nodeid and report.when == "setup" and report.outcome != "passed":
        ACCEPTANCE[report.nodeid.split(marker, 1)[1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in ACCEPTANCE.items():
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
