"""Numerical simulation of the two-ion Ramsey/SDF sequence.

The Hilbert space is spin (4 states) x truncated Fock space of the stretch
mode. Spin basis order is (dd, du, ud, uu) with d = down, u = up. The
propagation never uses the closed-form displacement operator: each step is a
fourth-order Magnus exponential of the sampled Hamiltonian matrices, and the
step count is doubled until the final amplitudes stop moving. This keeps the
simulation an independent check on :mod:`qli_sim.transduction`.

Thermal initial states are carried as a weighted ensemble of Fock-state
trajectories, so a :class:`ProtocolState` holds ``amplitudes`` with shape
``(K, 4, n_max + 1)`` and ``weights`` with shape ``(K,)``.
"""

from dataclasses import dataclass

import numpy as np

from .constants import E_CHARGE, HBAR
from .errors import (
    ConvergenceError,
    PreconditionError,
    TruncationError,
    UnidentifiablePhaseError,
)
from .transduction import SPIN_EIGENVALUE

DD, DU, UD, UU = range(4)
BASIS_LABELS = ("dd", "du", "ud", "uu")

DEFAULT_N_MAX = 24
MAX_N_MAX = 96
LEAKAGE_THRESHOLD = 1e-6
CONVERGENCE_TOL = 1e-8
THERMAL_CUTOFF = 0.999
NORM_TOL = 1e-9

_C1 = 0.5 - np.sqrt(3.0) / 6.0
_C2 = 0.5 + np.sqrt(3.0) / 6.0


def _spin_diagonal():
    return np.array([0.0, -SPIN_EIGENVALUE, SPIN_EIGENVALUE, 0.0])


def _ms_matrix():
    # Ideal entangler as a Hermitian involution:
    # |dd> <-> (|ud> + |du>)/sqrt2, |uu> <-> (|ud> - |du>)/sqrt2
    r = 1 / np.sqrt(2.0)
    bplus = np.array([0, r, r, 0], dtype=complex)
    bminus = np.array([0, -r, r, 0], dtype=complex)
    e_dd = np.array([1, 0, 0, 0], dtype=complex)
    e_uu = np.array([0, 0, 0, 1], dtype=complex)
    return (
        np.outer(bplus, e_dd)
        + np.outer(e_dd, bplus)
        + np.outer(bminus, e_uu)
        + np.outer(e_uu, bminus)
    )


U_MS = _ms_matrix()


@dataclass
class ProtocolState:
    amplitudes: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim == 2:
            amps = amps[None]
        if amps.ndim != 3 or amps.shape[1] != 4:
            raise ValueError("amplitudes must have shape (K, 4, n_max+1) or (4, n_max+1)")
        if amps.shape[2] < 9:
            raise ValueError("Fock truncation n_max must be >= 8")
        self.amplitudes = amps
        if self.weights is None:
            self.weights = np.ones(amps.shape[0]) / amps.shape[0]
        self.weights = np.asarray(self.weights, dtype=float)

    @property
    def n_max(self):
        return self.amplitudes.shape[2] - 1

    @classmethod
    def ground(cls, n_max=DEFAULT_N_MAX):
        """|dd>|0>."""
        return cls.fock(0, n_max)

    @classmethod
    def fock(cls, n, n_max=DEFAULT_N_MAX):
        amps = np.zeros((4, n_max + 1), dtype=complex)
        amps[DD, n] = 1.0
        return cls(amps)

    @classmethod
    def thermal(cls, nbar, n_max=DEFAULT_N_MAX, cutoff=THERMAL_CUTOFF):
        """|dd> with the mode in a Boltzmann mixture, truncated at `cutoff` cumulative weight."""
        if nbar == 0:
            return cls.ground(n_max)
        ns, p = thermal_weights(nbar, cutoff)
        if ns[-1] > n_max - 2:
            raise TruncationError(
                f"thermal state with nbar={nbar} needs Fock levels up to {ns[-1]}",
                required_n_max=int(ns[-1]) + DEFAULT_N_MAX,
            )
        amps = np.zeros((len(ns), 4, n_max + 1), dtype=complex)
        amps[np.arange(len(ns)), DD, ns] = 1.0
        return cls(amps, p)

    def norms(self):
        return np.sqrt(np.sum(np.abs(self.amplitudes) ** 2, axis=(1, 2)))

    def spin_populations(self):
        pops = np.sum(np.abs(self.amplitudes) ** 2, axis=2)
        return self.weights @ pops

    def coherence(self):
        """Ensemble-averaged <chi_ud|chi_du>, i.e. rho[du, ud] scaled to a unit-norm Bell pair."""
        ov = np.sum(np.conj(self.amplitudes[:, UD]) * self.amplitudes[:, DU], axis=1)
        return complex(self.weights @ ov) * 2.0

    def relative_phase(self):
        """Phase of the |du> branch relative to |ud>."""
        return float(np.angle(self.coherence()))

    def overlap(self):
        """|<chi_ud|chi_du>| of the conditional motional states (1 = disentangled)."""
        pops = self.spin_populations()
        return abs(self.coherence()) / (2 * np.sqrt(pops[UD] * pops[DU]))

    def padded(self, n_max):
        extra = n_max - self.n_max
        if extra <= 0:
            return self
        amps = np.pad(self.amplitudes, ((0, 0), (0, 0), (0, extra)))
        return ProtocolState(amps, self.weights.copy())

    def top_leakage(self):
        """Largest population in the top two Fock levels over ensemble members."""
        return float(np.max(np.sum(np.abs(self.amplitudes[:, :, -2:]) ** 2, axis=(1, 2))))


def thermal_weights(nbar, cutoff=THERMAL_CUTOFF):
    """Fock indices and renormalised Boltzmann weights up to cumulative `cutoff`."""
    if nbar == 0:
        return np.array([0]), np.array([1.0])
    r = nbar / (nbar + 1.0)
    # cumulative weight up to n is 1 - r^(n+1)
    n_last = int(np.ceil(np.log(1 - cutoff) / np.log(r) - 1))
    ns = np.arange(max(n_last, 0) + 1)
    p = (1 - r) * r**ns
    return ns, p / p.sum()


def _spin_apply(matrix, state):
    amps = np.einsum("ij,kjn->kin", matrix, state.amplitudes)
    return ProtocolState(amps, state.weights.copy())


def prepare_bell(state):
    """Apply the ideal entangling map; requires all spin population in |dd>."""
    pops = state.spin_populations()
    if abs(pops[DD] - 1.0) > 1e-12:
        raise PreconditionError(f"prepare_bell expects |dd> input, spin populations are {pops}")
    return _spin_apply(U_MS, state)


def unprepare_bell(state):
    return _spin_apply(U_MS.conj().T, state)


def _ladder(n_levels):
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), 1).astype(complex)


def _force_rate(crystal, delta_ex):
    """e dE x0 / (sqrt2 hbar) in rad/s."""
    return E_CHARGE * delta_ex * crystal.x0 / (np.sqrt(2.0) * HBAR)


def _step_generators(seq, kappa, n_levels, s_values, t1, t2, dt):
    """Hermitian K with exp(Omega) = exp(-i K) for one Magnus step, one per spin value."""
    a = _ladder(n_levels)
    ad = a.conj().T
    x = a + ad
    out = []
    for s in s_values:
        h1 = s * seq.g * (a * np.exp(1j * seq.delta * t1) + ad * np.exp(-1j * seq.delta * t1)) + kappa * x
        h2 = s * seq.g * (a * np.exp(1j * seq.delta * t2) + ad * np.exp(-1j * seq.delta * t2)) + kappa * x
        comm = h2 @ h1 - h1 @ h2
        # Omega = -i dt/2 (h1 + h2) - sqrt3/12 dt^2 [h2, h1]
        out.append(dt / 2 * (h1 + h2) - 1j * np.sqrt(3.0) / 12 * dt**2 * comm)
    return np.array(out)


def _propagate(state, seq, crystal, delta_ex, steps):
    amps = state.amplitudes.copy()
    n_levels = amps.shape[2]
    s_diag = _spin_diagonal()
    s_values, s_index = np.unique(s_diag, return_inverse=True)
    kappa = _force_rate(crystal, delta_ex)
    dt = seq.T / steps
    worst_leak = 0.0
    for k in range(steps):
        t0 = k * dt
        K = _step_generators(seq, kappa, n_levels, s_values, t0 + _C1 * dt, t0 + _C2 * dt, dt)
        K = 0.5 * (K + np.conj(np.swapaxes(K, 1, 2)))
        lam, vec = np.linalg.eigh(K)
        U = np.einsum("bij,bj,bkj->bik", vec, np.exp(-1j * lam), np.conj(vec))
        amps = np.einsum("sij,ksj->ksi", U[s_index], amps)
        leak = np.max(np.sum(np.abs(amps[:, :, -2:]) ** 2, axis=(1, 2)))
        worst_leak = max(worst_leak, leak)
        if leak > LEAKAGE_THRESHOLD:
            raise TruncationError(
                f"Fock leakage {leak:.2e} into the top two levels at t={t0 + dt:.3e} s "
                f"with n_max={n_levels - 1}; increase n_max",
                required_n_max=2 * (n_levels - 1),
            )
    return ProtocolState(amps, state.weights.copy()), worst_leak


def default_steps(seq):
    return 64 * seq.N + 64


def evolve_sdf(state, seq, crystal, delta_ex, steps=None, tol=CONVERGENCE_TOL, max_steps=2**16):
    """Evolve under H_sdf + H_ext for the sequence duration.

    Step count starts at `steps` and is doubled until halving the step
    changes every final amplitude by less than `tol`.
    """
    steps = steps or default_steps(seq)
    coarse, _ = _propagate(state, seq, crystal, delta_ex, steps)
    while True:
        fine, _ = _propagate(state, seq, crystal, delta_ex, 2 * steps)
        change = np.max(np.abs(fine.amplitudes - coarse.amplitudes))
        if change < tol:
            break
        steps *= 2
        if 2 * steps > max_steps:
            raise ConvergenceError(
                f"step-halving change {change:.2e} still above {tol:.0e} at {steps} steps"
            )
        coarse = fine
    drift = np.max(np.abs(fine.norms() - 1.0))
    if drift > NORM_TOL:
        raise ConvergenceError(f"norm drift {drift:.2e} exceeds {NORM_TOL:.0e}")
    fine.steps_used = 2 * steps
    return fine


def run_interrogation(seq, crystal, delta_ex, n_max=DEFAULT_N_MAX, thermal=True, steps=None):
    """Initialise, entangle and interrogate, escalating n_max on Fock leakage."""
    while True:
        try:
            start = ProtocolState.thermal(seq.nbar, n_max) if thermal else ProtocolState.ground(n_max)
            return evolve_sdf(prepare_bell(start), seq, crystal, delta_ex, steps=steps)
        except TruncationError as exc:
            needed = max(exc.required_n_max or 0, 2 * n_max)
            if needed > MAX_N_MAX:
                raise TruncationError(
                    f"{exc} (escalation capped at n_max={MAX_N_MAX})", required_n_max=needed
                ) from exc
            n_max = needed


@dataclass(frozen=True)
class ShotResult:
    bright: bool
    p_bright: float

    @property
    def outcome(self):
        return "bright" if self.bright else "dark"


@dataclass(frozen=True)
class PhaseEstimate:
    phi_hat: float
    std_error: float
    shots: int


def bright_probability(state, bias_phase=0.0):
    """P(dd) after an optional virtual phase on |du> and the inverse entangler."""
    amps = state.amplitudes.copy()
    amps[:, DU] *= np.exp(1j * bias_phase)
    analysed = unprepare_bell(ProtocolState(amps, state.weights))
    p = analysed.spin_populations()[DD]
    return float(np.clip(p, 0.0, 1.0))


def analyze_and_measure(state, rng_seed, bias_phase=0.0):
    """One fluorescence shot: bright with probability P(dd)."""
    p = bright_probability(state, bias_phase)
    rng = np.random.default_rng(rng_seed)
    return ShotResult(bool(rng.random() < p), p)


def sample_shots(state, shots, seed, bias_phase=0.0):
    """M shots from one seeded generator; the state is not re-simulated per shot."""
    p = bright_probability(state, bias_phase)
    outcomes = np.random.default_rng(seed).random(shots) < p
    return [ShotResult(bool(b), p) for b in outcomes]


def estimate_phase(shots, bias_phase=0.0, visibility=1.0):
    """Invert the fringe P = (1 + V cos(phi + bias)) / 2 for the shot record.

    Returns the phase with the bias removed. Near mid-fringe the standard
    error reduces to 1/sqrt(M).
    """
    outcomes = np.asarray([s.bright if isinstance(s, ShotResult) else bool(s) for s in shots])
    m = outcomes.size
    if m == 0:
        raise UnidentifiablePhaseError("no shots")
    k = int(outcomes.sum())
    if k == 0 or k == m:
        raise UnidentifiablePhaseError(f"{k}/{m} bright shots; fringe position is unidentifiable")
    p = k / m
    c = np.clip((2 * p - 1) / visibility, -1.0, 1.0)
    total = float(np.arccos(c))
    sin_t = np.sqrt(max(1.0 - c**2, 1e-300))
    std = 2 * np.sqrt(p * (1 - p) / m) / (visibility * sin_t)
    return PhaseEstimate(total - bias_phase, float(std), m)
