"""SNR, integration time, shot budgets, lock-in demodulation and sweeps."""

import itertools
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .electrostatics import (
    DipoleMoment,
    GradiometerGeometry,
    InterfaceKind,
    InterfaceModel,
    OrientationPolicy,
    c_eff,
    delta_ex,
    rms_signal,
)
from .constants import DEBYE, MICRON
from .errors import DomainError, InfeasibleError, InputError, SweepCapError
from .ion_crystal import TwoIonCrystal
from .noise_model import (
    GATE_SLOWDOWN,
    NoiseBudget,
    SampleNoiseModel,
    total_asd,
    differential_asd,
    slowdown_factor,
)

SECONDS_PER_DAY = 86400.0
DEFAULT_SWEEP_CAP = 10_000

SQUARE_GAIN = 2.0 / np.pi
SINE_GAIN = 0.5


class ZeroSignalWarning(UserWarning):
    pass


class EmptyShotBudgetWarning(UserWarning):
    pass


@dataclass(frozen=True)
class AveragingPlan:
    t_live: float
    t_dead: float = 0.0
    f0: float = 5.8

    def __post_init__(self):
        if not self.t_live > 0:
            raise DomainError("t_live must be > 0")
        if not self.t_dead >= 0:
            raise DomainError("t_dead must be >= 0")

    @classmethod
    def from_duty_cycle(cls, t_live, duty_cycle, f0=5.8):
        if not 0 < duty_cycle <= 1:
            raise DomainError("duty cycle must lie in (0, 1]")
        return cls(t_live, t_live * (1 / duty_cycle - 1), f0)

    @property
    def period(self):
        return self.t_live + self.t_dead

    @property
    def duty_cycle(self):
        return self.t_live / self.period


@dataclass(frozen=True)
class ThroughputBudget:
    """Per-site overheads in seconds and the number of averaged integrations."""

    t_setup: float = 0.0
    t_align: float = 0.0
    t_cal: float = 0.0
    n_avg: int = 1

    def __post_init__(self):
        if min(self.t_setup, self.t_align, self.t_cal) < 0:
            raise DomainError("overheads must be >= 0")
        if int(self.n_avg) != self.n_avg or self.n_avg < 1:
            raise DomainError("n_avg must be a positive integer")

    @property
    def overhead(self):
        return self.t_setup + self.t_align + self.t_cal


@dataclass(frozen=True)
class FeasibilityScenario:
    geometry: GradiometerGeometry
    dipole: DipoleMoment
    interface: InterfaceModel
    crystal: TwoIonCrystal
    budget: NoiseBudget
    plan: AveragingPlan
    orientation_policy: OrientationPolicy = OrientationPolicy.ISOTROPIC_RMS
    snr_target: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "orientation_policy", OrientationPolicy(self.orientation_policy))
        if not self.snr_target > 0:
            raise DomainError("snr_target must be > 0")

    @property
    def delta_ex_max(self):
        return delta_ex(self.geometry, self.dipole, self.interface)

    @property
    def signal_rms(self):
        return rms_signal(self.delta_ex_max, self.orientation_policy)

    @property
    def eval_frequency(self):
        return self.budget.evaluation_frequency(self.plan.t_live)

    @property
    def s_tot(self):
        return float(total_asd(self.budget, self.eval_frequency, self.geometry.d))

    @property
    def s_sample(self):
        return float(differential_asd(self.budget.sample, self.eval_frequency, self.geometry.d))

    @property
    def slowdown(self):
        return float(slowdown_factor(self.budget, self.eval_frequency, self.geometry.d))


def snr(scenario, t_tot):
    """(dE_rms / s_tot) sqrt(D T_tot). Zero signal gives 0 and a ZeroSignalWarning."""
    if not t_tot > 0:
        raise DomainError("t_tot must be > 0")
    sig = scenario.signal_rms
    if sig == 0:
        warnings.warn("scenario has zero signal", ZeroSignalWarning, stacklevel=2)
        return 0.0
    return sig / scenario.s_tot * math.sqrt(scenario.plan.duty_cycle * t_tot)


def integration_time(scenario):
    """Wall-clock time to reach scenario.snr_target, (SNR s_tot / dE)^2 / D."""
    sig = scenario.signal_rms
    if sig == 0:
        raise InfeasibleError("zero signal: no integration time reaches the SNR target")
    return (scenario.snr_target * scenario.s_tot / sig) ** 2 / scenario.plan.duty_cycle


@dataclass(frozen=True)
class ShotBudget:
    shots: int
    live_time: float


def shot_budget(plan, t_tot):
    if not t_tot > 0:
        raise DomainError("t_tot must be > 0")
    m = math.floor(t_tot / plan.period)
    if m == 0:
        warnings.warn(f"t_tot={t_tot} s is shorter than one shot period", EmptyShotBudgetWarning, stacklevel=2)
    return ShotBudget(m, m * plan.t_live)


def throughput(scenario, overheads):
    """Sites per day, 86400 / (T_setup + T_align + T_cal + N_avg tau)."""
    t_site = overheads.overhead + overheads.n_avg * integration_time(scenario)
    return SECONDS_PER_DAY / t_site


# -- lock-in -----------------------------------------------------------------


@dataclass(frozen=True)
class LockinReference:
    """Demodulation reference at f0.

    waveform "square" multiplies by sign(cos(2 pi f0 t + phase)), "sine" by
    cos(2 pi f0 t + phase). With phase cycling the stream is read as
    consecutive (y, -y) shot pairs whose half-difference is demodulated.
    """

    f0: float
    waveform: str = "square"
    phase: float = 0.0
    phase_cycling: bool = False
    pattern: np.ndarray = None

    def __post_init__(self):
        if self.waveform not in ("square", "sine"):
            raise DomainError(f"unknown reference waveform {self.waveform!r}")
        if not self.f0 > 0:
            raise DomainError("f0 must be > 0")

    @property
    def gain(self):
        """Response to a unit in-phase cosine tone at f0."""
        return SQUARE_GAIN if self.waveform == "square" else SINE_GAIN

    def signs(self, times):
        if self.pattern is not None:
            pat = np.asarray(self.pattern, dtype=float)
            if pat.shape != np.shape(times):
                raise InputError(
                    f"reference pattern length {pat.size} does not match stream length {np.size(times)}"
                )
            return pat
        arg = 2 * np.pi * self.f0 * np.asarray(times) + self.phase
        return np.sign(np.cos(arg)) if self.waveform == "square" else np.cos(arg)


@dataclass(frozen=True)
class LockinResult:
    estimate: float
    std_error: float
    snr: float
    samples: int


def lockin_demodulate(times, estimates, reference):
    """Multiply each shot estimate by the reference sign and average."""
    times = np.asarray(times, dtype=float)
    x = np.asarray(estimates, dtype=float)
    if times.shape != x.shape:
        raise InputError(f"{times.size} timestamps but {x.size} estimates")
    if times.size < 2 or (times[-1] - times[0]) * reference.f0 < 2:
        raise InputError("stream must span at least two reference cycles")
    w = reference.signs(times)
    if reference.phase_cycling:
        if x.size % 2:
            x, times, w = x[:-1], times[:-1], w[:-1]
        x = 0.5 * (x[0::2] - x[1::2])
        w = w[0::2]
    prod = w * x
    est = float(prod.mean())
    se = float(prod.std(ddof=1) / np.sqrt(prod.size))
    return LockinResult(est, se, abs(est) / se if se > 0 else math.inf, int(prod.size))


def cycled_stream(times, signal, noise=0.0, offset=0.0, phase_cycling=True):
    """Shot estimates for a sequence whose toggling sign alternates shot to shot.

    The in-band `signal` follows the toggling sign; `offset` and `noise` do not.
    """
    signal = np.asarray(signal, dtype=float) * np.ones_like(times, dtype=float)
    if phase_cycling:
        flip = np.where(np.arange(np.size(times)) % 2 == 0, 1.0, -1.0)
        signal = signal * flip
    return signal + noise + offset


# -- sweeps ------------------------------------------------------------------

SWEEP_AXES = ("h_um", "d_um", "delta_p_debye", "epsilon_r", "eta", "s_sample_mv", "snr_target")


def _apply_axis(scenario, name, value):
    if name == "h_um":
        return replace(scenario, geometry=GradiometerGeometry(value * MICRON, scenario.geometry.d))
    if name == "d_um":
        return replace(scenario, geometry=GradiometerGeometry(scenario.geometry.h, value * MICRON))
    if name == "delta_p_debye":
        return replace(scenario, dipole=DipoleMoment(value * DEBYE, scenario.dipole.orientation))
    if name == "epsilon_r":
        return replace(scenario, interface=InterfaceModel(InterfaceKind.PLANAR_DIELECTRIC, value))
    if name == "eta":
        # eta in (0, 1] maps onto an equivalent planar dielectric, eta = 2 onto a metal underlayer
        if value == 2:
            return replace(scenario, interface=InterfaceModel(InterfaceKind.METAL_UNDERLAYER))
        if value == 1:
            return replace(scenario, interface=InterfaceModel(InterfaceKind.VACUUM))
        if not 0 < value < 1:
            raise DomainError(f"eta must be in (0, 1] or exactly 2, got {value}")
        return replace(scenario, interface=InterfaceModel(InterfaceKind.PLANAR_DIELECTRIC, 2 / value - 1))
    if name == "s_sample_mv":
        sample = SampleNoiseModel.white_differential(value * 1e-3)
        return replace(scenario, budget=replace(scenario.budget, sample=sample))
    if name == "snr_target":
        return replace(scenario, snr_target=value)
    raise DomainError(f"unknown sweep axis {name!r}; choose from {', '.join(SWEEP_AXES)}")


def evaluate(scenario):
    """Derived quantities for one operating point, as an ordered dict."""
    dex = scenario.delta_ex_max
    sig = scenario.signal_rms
    row = {
        "h_um": scenario.geometry.h / MICRON,
        "d_um": scenario.geometry.d / MICRON,
        "delta_p_debye": scenario.dipole.magnitude / DEBYE,
        "eta": scenario.interface.eta,
        "c_eff": c_eff(scenario.geometry.ratio),
        "delta_ex_max_V_per_m": dex,
        "signal_rms_V_per_m": sig,
        "s_sample_V_per_m_rtHz": scenario.s_sample,
        "s_tot_V_per_m_rtHz": scenario.s_tot,
        "snr_1s": sig / scenario.s_tot * math.sqrt(scenario.plan.duty_cycle),
        "snr_target": scenario.snr_target,
        "tau_s": integration_time(scenario) if sig > 0 else math.inf,
        "slowdown": scenario.slowdown,
        "gate_pass": scenario.slowdown <= GATE_SLOWDOWN,
    }
    return row


def sweep(scenario, axes, cap=DEFAULT_SWEEP_CAP):
    """Evaluate the scenario on the Cartesian product of `axes`.

    `axes` maps axis names (see SWEEP_AXES) to value lists. Rows come out in
    lexicographic order of the axes as given, last axis fastest.
    """
    names = list(axes)
    grids = [list(np.atleast_1d(axes[n])) for n in names]
    if any(len(g) < 1 for g in grids):
        raise DomainError("every sweep axis needs at least one value")
    count = math.prod(len(g) for g in grids)
    if count > cap:
        raise SweepCapError(count, cap)
    rows = []
    for point in itertools.product(*grids):
        sc = scenario
        for name, value in zip(names, point):
            sc = _apply_axis(sc, name, float(value))
        row = {f"axis_{n}": float(v) for n, v in zip(names, point)}
        row.update(evaluate(sc))
        rows.append(row)
    return rows
