import numpy as np
import pytest

from openxxx.boundary import triangularize, sample_cotriangularizable
from openxxx.lattice import ChainConfig


def rand_c(rng, scale=1.0):
    return complex(*(scale * rng.normal(size=2)))


def random_chain(rng, spins, eta=None):
    alphas = [rand_c(rng, 0.5) for _ in spins]
    if eta is None:
        eta = 0.5 + 0.5 * rng.uniform() + 0.2j * rng.normal()
    return ChainConfig(spins, alphas, eta)


def random_boundary(rng, eta):
    return triangularize(sample_cotriangularizable(rng), eta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> (passed, summary); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, passed: bool, summary: str) -> None:
    ACCEPTANCE[number] = (bool(passed), summary)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}")
