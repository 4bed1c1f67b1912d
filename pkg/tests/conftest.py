import numpy as np
import pytest

from boundsim.simplex import FamilyParams

# One line per acceptance criterion, filled by test_acceptance.py.
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def featured():
    return FamilyParams(3, -0.07, -1.73, -0.5774)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(rng, n):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (z + z.conj().T) / 2


def random_density(rng, n, rank=None):
    rank = n if rank is None else rank
    z = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def random_ket(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


@pytest.fixture
def helpers():
    class H:
        unitary = staticmethod(random_unitary)
        hermitian = staticmethod(random_hermitian)
        density = staticmethod(random_density)
        ket = staticmethod(random_ket)

    return H


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def acceptance():
    """Record a one-line verdict for an acceptance criterion, then assert it."""

    def record(num: int, ok: bool, detail: str, seconds: float, limit: float):
        timely = seconds <= limit
        verdict = "PASS" if ok and timely else "FAIL"
        line = f"criterion {num}: {verdict}  {detail}  [{seconds:.1f}s / limit {limit:.0f}s]"
        ACCEPTANCE_LINES[num] = line
        print(line)
        assert ok, line
        assert timely, line

    return record
