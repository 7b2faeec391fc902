import numpy as np
import pytest

from qsteer.states import DensityOperator, XFormState

_ACCEPTANCE_LINES = []


def random_density(rng, dim=4, rank=None):
    rank = rank or rng.integers(1, dim + 1)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)


def random_xform(rng):
    a, b, c, d = rng.dirichlet(np.ones(4))
    w = np.sqrt(a * d) * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    z = np.sqrt(b * c) * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    return XFormState(a, b, c, d, w, z)


def random_unitary(rng, dim=2):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20211)


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def _report(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
