import numpy as np
import pytest

from fracns.grid import BoxSpec, SpectralField, random_field


@pytest.fixture(scope="session")
def box16():
    return BoxSpec(16)


@pytest.fixture(scope="session")
def box32():
    return BoxSpec(32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def rand32(box32):
    return random_field(box32, 7)


def single_mode(box, k, amp, component=0):
    """Real field with u_component = amp * sin(k . x)."""
    f = SpectralField.zeros(box)
    idx = tuple(int(v) % box.n for v in k)
    neg = tuple(int(-v) % box.n for v in k)
    f.coeffs[(component,) + idx] = -0.5j * amp
    f.coeffs[(component,) + neg] = 0.5j * amp
    return f


# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
