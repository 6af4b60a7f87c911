import numpy as np
import pytest

from mzuq.spectral import PCField


def random_reality_field(rng, N, M, scale=1.0):
    """Random field satisfying conjugate symmetry with the unpaired
    k = -N/2 mode pinned to zero."""
    half = N // 2
    coeffs = np.zeros((N, M), dtype=np.complex128)
    a = scale * (rng.normal(size=(half - 1, M)) + 1j * rng.normal(size=(half - 1, M)))
    coeffs[half + 1:, :] = a
    coeffs[1:half, :] = np.conj(a[::-1])
    coeffs[half, :] = scale * rng.normal(size=M)
    return PCField(N, M, coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


# one pass/fail summary line per acceptance criterion
_acceptance_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid, outcome in sorted(_acceptance_outcomes.items()):
        name = nodeid.split("::")[-1]
        verdict = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{name}: {verdict}")
