import math

import numpy as np
import pytest

from qchaos.spectrum import PotentialSpec, Spectrum, SystemParams

ACCEPTANCE_LINES = []


@pytest.fixture
def unit_params():
    """m = hbar = 1, d_p = 2 pi (g_p0 = 1), eps_p = 1."""
    return SystemParams(m=1.0, hbar=1.0, d_p=2 * math.pi, eps_p=1.0)


@pytest.fixture
def harmonic():
    return PotentialSpec("harmonic", -10.0, 10.0, grid_n=2048, omega=1.0)


@pytest.fixture
def harmonic_spec(unit_params):
    return Spectrum.from_levels([n + 0.5 for n in range(10)], unit_params)


def gaussian_pdd(x, center, width):
    rho = np.exp(-0.5 * ((x - center) / width) ** 2)
    return rho / (rho.sum() * (x[1] - x[0]))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
