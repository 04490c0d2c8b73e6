import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

DATA = ROOT / "data"


def have(name):
    return (DATA / name).exists()


@pytest.fixture(scope="session")
def german():
    from bomkc.data import resolve_dataset
    if not have("german.numer.libsvm.gz"):
        pytest.skip("german data missing; run scripts/build_datasets.py")
    return resolve_dataset("german")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
