import sys

import pytest
from hypothesis import settings

import helpers

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def chain_tree():
    return helpers.chain()


@pytest.fixture(scope="session")
def chain_mask():
    return helpers.chain_mask()


@pytest.fixture(scope="session")
def chain_family():
    return helpers.chain_family()


@pytest.fixture(scope="session")
def chain_system():
    return helpers.chain_system()


@pytest.fixture(scope="session")
def haar_family():
    return helpers.haar_family()


@pytest.fixture(scope="session")
def haar_system(haar_family):
    from lfwave.wavelets import build_system

    return build_system(haar_family)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    order = sorted(mod.RESULTS, key=lambda k: (int(k.split("-")[0]), k))
    for cid in order:
        ok, detail = mod.RESULTS[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{cid}] {detail}")
