import numpy as np
import pytest
from scipy.stats import unitary_group

_ACCEPTANCE = []


def random_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng)


def random_hermitian(dim, rng, scale=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (m + m.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    """Log one PASS/FAIL line for an acceptance criterion."""

    def _record(label, ok, detail=""):
        line = f"ACCEPTANCE {label}: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
