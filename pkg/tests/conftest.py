import numpy as np
import pytest

from ssploc.fingerprints import Location, RadioMap, RadioPoint
from ssploc.likelihood import SingleGaussian

_acceptance_outcomes = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_outcomes.append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_outcomes:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, ok in _acceptance_outcomes:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}")


def gaussian_map(entries, std=2.0):
    """Tiny radio map from [(x, y, [mean per feature])] rows."""
    points = []
    for i, (x, y, means) in enumerate(entries):
        models = tuple(SingleGaussian(mean=float(m), std=std) for m in means)
        points.append(RadioPoint(rp_id=i, location=Location(x, y), models=models))
    return RadioMap(points, family="single_gaussian")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_map():
    """Four reference points on a line; RP2 nearly duplicates RP1's
    fingerprint from 9 m away (spatial ambiguity on purpose)."""
    return gaussian_map(
        [
            (0.0, 0.0, [-40.0, -70.0]),
            (1.0, 0.0, [-55.0, -55.0]),
            (10.0, 0.0, [-54.5, -55.5]),
            (11.0, 0.0, [-70.0, -40.0]),
        ]
    )
