"""Point-dipole electrostatics for the lateral two-ion gradiometer.

Coordinates: z is the sample surface normal (sample near z = 0), x is the
trap axis. The two ions sit at (+d/2, 0, h) and (-d/2, 0, h) and the sensor
reads the lateral differential field Ex(+d/2) - Ex(-d/2).

All functions take and return SI quantities. Debye and microns only appear
in the explicit conversion helpers.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import ANGSTROM, DEBYE, E_CHARGE, K_COULOMB, MICRON
from .errors import DomainError

_UNIT_TOL = 1e-12


class InterfaceKind(str, Enum):
    VACUUM = "vacuum"
    PLANAR_DIELECTRIC = "planar-dielectric"
    METAL_UNDERLAYER = "metal-underlayer"


class OrientationPolicy(str, Enum):
    FIXED_NORMAL = "fixed-normal"
    ISOTROPIC_RMS = "isotropic-rms"


@dataclass(frozen=True)
class DipoleMoment:
    """Dipole moment in C m with a unit orientation vector."""

    magnitude: float
    orientation: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not self.magnitude >= 0:
            raise DomainError(f"dipole magnitude must be >= 0, got {self.magnitude}")
        o = np.asarray(self.orientation, dtype=float)
        if o.shape != (3,):
            raise DomainError("orientation must be a 3-vector")
        if abs(np.linalg.norm(o) - 1.0) > _UNIT_TOL:
            raise DomainError(f"orientation must have unit norm, got |o| = {np.linalg.norm(o)}")
        object.__setattr__(self, "orientation", tuple(float(c) for c in o))

    @classmethod
    def from_debye(cls, debye, orientation=(0.0, 0.0, 1.0)):
        return cls(debye * DEBYE, orientation)

    @property
    def debye(self):
        return self.magnitude / DEBYE

    @property
    def vector(self):
        return self.magnitude * np.asarray(self.orientation)

    @property
    def is_normal(self):
        ox, oy, oz = self.orientation
        return abs(ox) <= _UNIT_TOL and abs(oy) <= _UNIT_TOL and oz > 0


@dataclass(frozen=True)
class GradiometerGeometry:
    """Ion height h above the surface and lateral baseline d, both in meters."""

    h: float
    d: float

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError(f"height h must be > 0, got {self.h}")
        if not self.d > 0:
            raise DomainError(f"baseline d must be > 0, got {self.d}")

    @classmethod
    def from_microns(cls, h_um, d_um):
        return cls(h_um * MICRON, d_um * MICRON)

    @property
    def sensor_position(self):
        return np.array([self.d / 2, 0.0, self.h])

    @property
    def reference_position(self):
        return np.array([-self.d / 2, 0.0, self.h])

    @property
    def ratio(self):
        return self.d / self.h


@dataclass(frozen=True)
class InterfaceModel:
    kind: InterfaceKind = InterfaceKind.VACUUM
    epsilon_r: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", InterfaceKind(self.kind))
        if not self.epsilon_r >= 1.0:
            raise DomainError(f"epsilon_r must be >= 1, got {self.epsilon_r}")

    @property
    def eta(self):
        """Multiplicative transmission of the normal-dipole field."""
        if self.kind is InterfaceKind.VACUUM:
            return 1.0
        if self.kind is InterfaceKind.PLANAR_DIELECTRIC:
            return 2.0 / (self.epsilon_r + 1.0)
        return 2.0


def debye_from_charge_displacement(charge_fraction, displacement):
    """Dipole (Debye) from moving `charge_fraction` elementary charges by
    `displacement` angstrom. The prefactor e*1A/D is about 4.803."""
    if displacement < 0:
        raise DomainError(f"displacement must be >= 0, got {displacement}")
    return charge_fraction * E_CHARGE * displacement * ANGSTROM / DEBYE


def c_eff(u):
    """Geometry factor 3 / (1 + (u/2)^2)^(5/2) for u = d/h."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("c_eff requires u >= 0")
    out = 3.0 / (1.0 + (u / 2.0) ** 2) ** 2.5
    return float(out) if out.ndim == 0 else out


def delta_ex(geometry, dipole, interface=InterfaceModel()):
    """Lateral differential field (V/m) from a surface-normal dipole at the origin.

    Only the normal orientation has this closed form; tilted dipoles must go
    through :func:`differential_field` instead.
    """
    if dipole.magnitude == 0:
        return 0.0
    if not dipole.is_normal:
        raise DomainError(
            "closed-form delta_ex covers only dipoles along +z; "
            "use differential_field() for arbitrary orientations"
        )
    h, d = geometry.h, geometry.d
    return interface.eta * dipole.magnitude * K_COULOMB * 3 * h * d / (h**2 + (d / 2) ** 2) ** 2.5


def dipole_field_at_point(dipole, source_position, field_point):
    """Field of a point dipole, E = k [3 (p.r^) r^ - p] / |r|^3."""
    r = np.asarray(field_point, dtype=float) - np.asarray(source_position, dtype=float)
    dist = np.linalg.norm(r)
    if dist == 0:
        raise DomainError("field point coincides with the dipole position")
    p = dipole.vector
    rhat = r / dist
    return K_COULOMB * (3.0 * np.dot(p, rhat) * rhat - p) / dist**3


def differential_field(geometry, dipole, interface=InterfaceModel(), source_position=(0.0, 0.0, 0.0)):
    """Ex(sensor) - Ex(reference) by evaluating the full dipole field at both ions.

    Works for any orientation. The interface factor is applied as a plain
    multiplier, which is exact only for the normal component.
    """
    e_s = dipole_field_at_point(dipole, source_position, geometry.sensor_position)
    e_r = dipole_field_at_point(dipole, source_position, geometry.reference_position)
    return interface.eta * float(e_s[0] - e_r[0])


def rms_signal(delta_ex_max, orientation_policy=OrientationPolicy.ISOTROPIC_RMS):
    if delta_ex_max < 0:
        raise DomainError("delta_ex_max must be >= 0")
    if OrientationPolicy(orientation_policy) is OrientationPolicy.FIXED_NORMAL:
        return delta_ex_max
    return delta_ex_max / np.sqrt(3.0)
