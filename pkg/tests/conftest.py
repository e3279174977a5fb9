import numpy as np
import pytest

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
LETTERS = {"I": I2, "X": SX, "Y": SY, "Z": SZ}


def kron_all(mats):
    """Kronecker product with qubit 1 as the least significant factor."""
    out = np.array([[1.0 + 0j]])
    for m in reversed(list(mats)):
        out = np.kron(out, m)
    return out


def oracle_matrix(letters, phase=1.0):
    return phase * kron_all([LETTERS[c] for c in letters])


def oracle_generators(n):
    """Hermitian and anti-Hermitian parts of (X + iY)^{(x)n}, densely."""
    t = kron_all([SX + 1j * SY] * n)
    return (t + t.conj().T) / 2, (t - t.conj().T) / 2j


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(number, title, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
        assert ok, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
