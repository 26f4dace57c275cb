"""Physical constants in SI units (CODATA 2018 via scipy)."""

from dataclasses import dataclass

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    epsilon_0: float = _sc.epsilon_0
    e: float = _sc.e
    hbar: float = _sc.hbar
    atomic_mass: float = _sc.atomic_mass
    electron_mass: float = _sc.m_e
    # 1 D = 1e-21 C m^2 s^-1 / c
    debye: float = 1e-21 / _sc.c
    angstrom: float = 1e-10

    @property
    def coulomb_k(self):
        return 1.0 / (4.0 * _sc.pi * self.epsilon_0)


CONSTANTS = PhysicalConstants()

EPS0 = CONSTANTS.epsilon_0
E_CHARGE = CONSTANTS.e
HBAR = CONSTANTS.hbar
AMU = CONSTANTS.atomic_mass
DEBYE = CONSTANTS.debye
ANGSTROM = CONSTANTS.angstrom
K_COULOMB = CONSTANTS.coulomb_k

MICRON = 1e-6
MV_PER_M = 1e-3  # mV/m in V/m
