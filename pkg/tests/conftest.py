import sys

import pytest

from wkra.catalog import catalog
from wkra.models import Poset, build_wk, sugihara


@pytest.fixture(scope="session")
def cat():
    return {A.name: A for A in catalog()}


@pytest.fixture(scope="session")
def wk2():
    return build_wk(Poset.chain(2), name="wk(2)")


@pytest.fixture(scope="session")
def s3():
    return sugihara(3)


@pytest.fixture(scope="session")
def s4():
    return sugihara(4)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
