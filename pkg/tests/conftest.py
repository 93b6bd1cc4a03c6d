import functools

import pytest

from unidom.atlas import resolve

_CRITERIA: dict[int, tuple[str, str]] = {}


@functools.lru_cache(maxsize=None)
def group(spec: str, seed: int = 0):
    """Groups are cached for the whole session; overgroup lattices and
    class tables hang off them, so later tests reuse that work."""
    return resolve(spec).group(seed=seed)


@pytest.fixture(scope="session")
def A5():
    return group("alt 5")


@pytest.fixture(scope="session")
def A6():
    return group("alt 6")


@pytest.fixture(scope="session")
def M11():
    return group("M11")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    n = mark.args[0]
    status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    prev = _CRITERIA.get(n)
    if prev is None or prev[0] == "PASS":
        _CRITERIA[n] = (status, item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, name = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  ({name})")
