import numpy as np
import pytest

from micropolar.dynamics import Bases
from micropolar.spectral_core import DomainSpec, Resolution

ACCEPTANCE = []


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def bases4():
    return Bases.build(DomainSpec(1.0), Resolution(4, 4))


@pytest.fixture(scope="session")
def bases8():
    return Bases.build(DomainSpec(1.0), Resolution(8, 8))


@pytest.fixture(scope="session")
def bases_wide():
    # l = 2 pi, unequal truncations
    return Bases.build(DomainSpec(2 * np.pi), Resolution(5, 6, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
