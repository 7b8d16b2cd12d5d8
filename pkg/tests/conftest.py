import time

import numpy as np
import pytest

SESSION_BUDGET_S = 60.0

_results = {}
_titles = {}
_start = [0.0]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


def pytest_sessionstart(session):
    _start[0] = time.perf_counter()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    n, title = marker
    _titles[n] = title
    _results.setdefault(n, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])


def _elapsed():
    return time.perf_counter() - _start[0]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_results):
        ok = all(_results[n])
        tr.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {_titles[n]}")
    dt = _elapsed()
    ok = dt < SESSION_BUDGET_S
    tr.write_line(f"criterion 11: {'PASS' if ok else 'FAIL'}  full run {dt:.1f} s < {SESSION_BUDGET_S:.0f} s")


def pytest_sessionfinish(session, exitstatus):
    if _results and _elapsed() >= SESSION_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_signal(rng, L):
    return rng.normal(size=L) + 1j * rng.normal(size=L)


def unit(x):
    return x / np.linalg.norm(x)
