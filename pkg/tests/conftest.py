"""Shared fixtures and the acceptance summary printed after the run."""

from __future__ import annotations

from collections import OrderedDict

import pytest

from bugonomics import kernels
from bugonomics.serialize import load_fixture

# criterion id -> description, in reporting order
CRITERIA = OrderedDict(
    [
        ("anchors", "anchor table: derived public quantities reproduced"),
        ("bands", "validation-cost bands and amortized ranges exact"),
        ("release-split", "release severity split consistent with accepted count"),
        ("cost-identities", "cost identities over >=1000 random cases each"),
        ("sampling", "Monte Carlo mean, containment and reproducibility"),
        ("simulator", "simulator conservation, capacity case, thinning, monotonicity, cost"),
        ("lint", "reporting-field lint and review checklists"),
        ("io", "JSON round trip and CLI exit codes"),
    ]
)

_outcomes: dict[str, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(criterion): ties a test to an acceptance criterion")


def pytest_runtest_logreport(report):
    criterion = getattr(report, "acceptance_criterion", None)
    if criterion is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(criterion, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance_criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key, text in CRITERIA.items():
        results = _outcomes.get(key)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        n = len(results or [])
        terminalreporter.write_line(f"{status:7s} {key:16s} {text} ({n} checks)")


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    previous = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


@pytest.fixture
def firefox():
    return load_fixture("firefox_opus46")


@pytest.fixture
def mythos():
    return load_fixture("mythos_preview")
