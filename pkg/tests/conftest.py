import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("anadisk", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("anadisk")


def random_poly(rng, n, degree, scale=1.0):
    from anadisk import Polynomial

    c = rng.standard_normal((n, degree + 1)) + 1j * rng.standard_normal((n, degree + 1))
    return Polynomial(scale * c / np.sqrt(2 * (degree + 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict = {}


def record(number: int, title: str, passed: bool, detail: str = ""):
    """Store and print one acceptance line; asserting is left to the caller."""
    line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    ACCEPTANCE[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
