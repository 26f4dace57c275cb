"""Two-ion crystal mechanics: equilibrium spacing and the axial stretch mode."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .constants import AMU, CONSTANTS, E_CHARGE, EPS0, HBAR
from .errors import DomainError


@dataclass(frozen=True)
class IonSpecies:
    """Ion mass in kg and charge as a multiple of e."""

    name: str
    mass: float
    charge: int = 1

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"ion mass must be > 0, got {self.mass}")
        if int(self.charge) != self.charge or self.charge < 1:
            raise DomainError(f"ion charge must be a positive integer, got {self.charge}")

    @classmethod
    def from_atomic_mass(cls, name, mass_u, charge=1):
        """Build an ion from its neutral-atom mass in u, removing `charge` electrons."""
        return cls(name, mass_u * AMU - charge * CONSTANTS.electron_mass, charge)


# Neutral atomic masses (AME2020), in u.
YB171 = IonSpecies.from_atomic_mass("171Yb+", 170.9363302)
CA40 = IonSpecies.from_atomic_mass("40Ca+", 39.962590850)

SPECIES = {s.name: s for s in (YB171, CA40)}


def equilibrium_separation(species, omega_x):
    """Spacing of two identical ions in a harmonic well, (Z^2 e^2 / (2 pi eps0 m w^2))^(1/3)."""
    if not omega_x > 0:
        raise DomainError(f"trap frequency must be > 0, got {omega_x}")
    q = species.charge * E_CHARGE
    return (q**2 / (2 * np.pi * EPS0 * species.mass * omega_x**2)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class TwoIonCrystal:
    species: IonSpecies
    omega_x: float

    def __post_init__(self):
        if not self.omega_x > 0:
            raise DomainError(f"trap frequency must be > 0, got {self.omega_x}")

    @classmethod
    def from_frequency(cls, species, f_x_hz):
        return cls(species, 2 * np.pi * f_x_hz)

    @cached_property
    def d_eq(self):
        return equilibrium_separation(self.species, self.omega_x)

    @cached_property
    def omega_stretch(self):
        return np.sqrt(3.0) * self.omega_x

    @cached_property
    def x0(self):
        # single-ion mass at the stretch frequency; the 1/sqrt(2) mode factor lives in H_ext
        return np.sqrt(HBAR / (2 * self.species.mass * self.omega_stretch))


def stretch_mode(crystal):
    """Return (omega_stretch, x0) for the out-of-phase axial mode."""
    return crystal.omega_stretch, crystal.x0
