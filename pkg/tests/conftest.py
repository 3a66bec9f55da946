import math

import pytest

from collapse_bound import csl, electromech
from collapse_bound.dynamics import ModeRegister, NoiseRates, System

QUARTZ_DENSITY = 2648.0
RADIUS = 35e-6
HEIGHT = 240e-6
FREQ = 6.65e9
R_C = 1e-7

# Acceptance outcomes, collected by tests/test_acceptance.py and echoed at the end of the run.
ACCEPTANCE_LINES = []


def single_node_geometry(wavelength=9.5e-7):
    return csl.ResonatorGeometry.from_wavelength(RADIUS, wavelength, 1, QUARTZ_DENSITY, FREQ)


def design_geometry():
    return csl.ResonatorGeometry.from_height(RADIUS, HEIGHT, 503, QUARTZ_DENSITY, FREQ)


def design_piezo():
    return electromech.PiezoQubitParams(v_l=6346.0)


@pytest.fixture(scope="session")
def piezo():
    return design_piezo()


@pytest.fixture(scope="session")
def design_register():
    modes = electromech.register_modes_around(HEIGHT, design_piezo())
    return ModeRegister.from_modes(modes)


@pytest.fixture(scope="session")
def design_system(design_register):
    return System(design_register, NoiseRates())


def single_mode_register(g_hz=3e6, freq_hz=6.65e9):
    return ModeRegister((2 * math.pi * freq_hz,), (2 * math.pi * g_hz,))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def design_swap(design_system):
    from collapse_bound.dynamics import swap_efficiency
    return swap_efficiency(design_system)
