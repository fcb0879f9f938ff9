import json

import pytest

from collabmetrics import _kernels
from collabmetrics.corpus import PaperRecord

# closed 5-paper fixture: every reference resolves inside the corpus
HAND_RECORDS = [
    PaperRecord("P1", ("a", "b"), "ATLAS", ("hep-ex",), 2001, ()),
    PaperRecord("P2", ("a",), None, ("hep-th",), 2002, ("P1",)),
    PaperRecord("P3", ("b", "c", "d", "e"), "ATLAS", ("hep-ex",), 2003, ("P1", "P2")),
    PaperRecord("P4", ("c",), None, ("astro-ph",), 2004, ("P1", "P2", "P3")),
    PaperRecord("P5", ("a", "c"), None, ("gr-qc",), 2005, ("P1", "P3", "P4", "P2")),
]


def to_line(rec):
    return rec.to_json()


@pytest.fixture
def hand_records():
    return list(HAND_RECORDS)


@pytest.fixture
def hand_corpus_file(tmp_path):
    path = tmp_path / "hand.jsonl"
    path.write_text("".join(to_line(r) + "\n" for r in HAND_RECORDS), encoding="utf-8")
    return path


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request):
    return _kernels.BACKENDS[request.param]


def jsonl(*objs):
    return "".join(json.dumps(o) + "\n" for o in objs)


# --------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

ACCEPTANCE_RESULTS = {}


def record_acceptance(number, title, passed, detail=""):
    ACCEPTANCE_RESULTS[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {number:2d}. {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
