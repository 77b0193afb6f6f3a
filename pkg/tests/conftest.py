from pathlib import Path

import pytest

from mwq.pipeline import load_kb, load_query

ROOT = Path(__file__).resolve().parent.parent
BUNDLES = ROOT / "bundles"

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def bundle(name: str):
    d = BUNDLES / name
    return load_kb(d / "kb.txt", d / "data.csv"), load_query(d / "query.txt")


@pytest.fixture
def cancer():
    return bundle("cancer")


@pytest.fixture
def chemo():
    return bundle("chemo")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (len(k.split(".")[0]), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")
