"""Analytic field-to-phase transduction for closed spin-dependent-force loops.

Interaction-frame Hamiltonians on the stretch mode:

    H_sdf(t) = hbar g (a e^{i delta t} + a^dag e^{-i delta t}) s
    H_ext    = e dE x0 / sqrt(2) (a + a^dag)

with s the differential spin operator. The relative phase phi is the phase
of the |down,up> branch relative to |up,down>, i.e. arg <chi_ud | chi_du>
of the conditional motional states.
"""

from dataclasses import dataclass

import numpy as np

from .constants import E_CHARGE, HBAR
from .errors import DomainError

# Eigenvalue of s on |up,down>; |down,up> gets the negative, the aligned
# states zero. 1/2 is what makes the closed-loop gain and the contrast law
# agree with a direct solution of the Hamiltonians above.
SPIN_EIGENVALUE = 0.5


@dataclass(frozen=True)
class SDFSequence:
    """Spin-dependent-force sequence.

    g, delta in rad/s, T in s. The closure error epsilon = delta*T - 2 pi N is
    always derived, never stored.
    """

    g: float
    delta: float
    T: float
    N: int = 1
    nbar: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"interrogation time must be > 0, got {self.T}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"loop count must be a positive integer, got {self.N}")
        if not self.nbar >= 0:
            raise DomainError(f"nbar must be >= 0, got {self.nbar}")

    @classmethod
    def closed(cls, g, delta, N=1, nbar=0.0, epsilon=0.0):
        """Sequence with delta*T = 2 pi N + epsilon."""
        return cls(g=g, delta=delta, T=(2 * np.pi * N + epsilon) / delta, N=N, nbar=nbar)

    @property
    def epsilon(self):
        return self.delta * self.T - 2 * np.pi * self.N


@dataclass(frozen=True)
class TransductionGain:
    """Phase per unit differential field, rad/(V/m). Signed; readout depends on |phi| only."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise DomainError("transduction gain is not finite")

    def __abs__(self):
        return abs(self.value)

    def __float__(self):
        return float(self.value)


def gain_prefactor(g, crystal):
    """sqrt(2) e g x0 / hbar, in rad / (V/m) per unit of the time integral."""
    return np.sqrt(2.0) * E_CHARGE * g * crystal.x0 / HBAR


def gain(seq, crystal):
    """G_E = (sqrt2 e g x0 / hbar) (sin(dT)/d^2 - T cos(dT)/d)."""
    if seq.delta == 0:
        raise DomainError("gain is singular at delta = 0 (resonant drive not modelled)")
    d, T = seq.delta, seq.T
    shape = np.sin(d * T) / d**2 - T * np.cos(d * T) / d
    return TransductionGain(gain_prefactor(seq.g, crystal) * shape)


def closed_loop_gain(g, delta, N, crystal):
    """Signed closed-loop limit, -2 pi N sqrt2 e g x0 / (hbar delta^2)."""
    if delta == 0:
        raise DomainError("gain is singular at delta = 0")
    return TransductionGain(-2 * np.pi * N * gain_prefactor(g, crystal) / delta**2)


def phase_from_field(gain, delta_ex):
    return float(gain) * delta_ex


def contrast(seq):
    """exp[-(2 nbar + 1) (g eps / delta)^2].

    This is the squared overlap |<chi_ud|chi_du>|^2 of the conditional
    motional states (thermally averaged) to leading order in eps; the Ramsey
    fringe visibility is its square root.
    """
    if seq.delta == 0:
        raise DomainError("contrast is undefined at delta = 0")
    x = seq.g * seq.epsilon / seq.delta
    return float(np.exp(-(2 * seq.nbar + 1) * x**2))


def visibility(seq):
    return float(np.sqrt(contrast(seq)))
