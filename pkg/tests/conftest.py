import numpy as np
import pytest

from qli_sim.electrostatics import DipoleMoment, GradiometerGeometry, InterfaceModel
from qli_sim.ion_crystal import YB171, TwoIonCrystal
from qli_sim import scenario as scn

ACCEPTANCE_LINES = []


@pytest.fixture
def paper_scenario():
    return scn.build_scenario(scn.defaults())


@pytest.fixture(scope="session")
def yb_crystal():
    return TwoIonCrystal.from_frequency(YB171, 1e6)


@pytest.fixture
def baseline_geometry():
    return GradiometerGeometry.from_microns(10.0, 3.45)


@pytest.fixture
def dipole_20d():
    return DipoleMoment.from_debye(20.0)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
