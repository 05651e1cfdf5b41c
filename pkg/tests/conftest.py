import glob
import os

import pytest

from autodens.dfao import load_dfao

CORPUS_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "autodens", "corpus")
CORPUS = {os.path.basename(p)[:-4]: p for p in sorted(glob.glob(os.path.join(CORPUS_DIR, "*.aut")))}


def corpus(name):
    return load_dfao(CORPUS[name])


@pytest.fixture
def load():
    return corpus


_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    key = name[len("test_criterion_"):]
    if report.when == "call" or report.failed:
        ok = report.passed and not report.failed
        _criteria[key] = _criteria.get(key, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda s: int(s.split("_")[0])):
        num, _, title = key.partition("_")
        verdict = "PASS" if _criteria[key] else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2} {verdict}  {title.replace('_', ' ')}")
