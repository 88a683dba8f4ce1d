import pathlib
import re

import pytest
from hypothesis import settings

from maternk.oracle import OracleCache

DATA = pathlib.Path(__file__).parent / "data"
ORACLE_CACHE = DATA / "oracle_cache.csv"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def oracle_cache():
    # read-only use: entries computed during a run stay in memory
    return OracleCache(str(ORACLE_CACHE))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
