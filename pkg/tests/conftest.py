import numpy as np
import pytest
from hypothesis import settings

from shaken_trimer.fock import build_basis
from shaken_trimer.model import BASE_PARAMS

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture(scope="session")
def basis4():
    return build_basis(4)


@pytest.fixture(scope="session")
def base():
    return BASE_PARAMS


def ladder_operators(N: int):
    """Truncated annihilation operators for three modes, each with 0..N quanta."""
    a = np.diag(np.sqrt(np.arange(1, N + 1)), 1)
    eye = np.eye(N + 1)
    return [
        np.kron(np.kron(a, eye), eye),
        np.kron(np.kron(eye, a), eye),
        np.kron(np.kron(eye, eye), a),
    ]


def product_index(N: int, s) -> int:
    n1, n2, n3 = s
    return (n1 * (N + 1) + n2) * (N + 1) + n3


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
