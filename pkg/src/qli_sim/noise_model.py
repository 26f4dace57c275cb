"""Sensor and sample field noise for the differential measurement.

PSDs are one-sided, in (V/m)^2/Hz; ASDs are their square roots in
V m^-1 / sqrt(Hz).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InputError, InsufficientDataError

GATE_RATIO = 0.45
GATE_SLOWDOWN = 1.0 + GATE_RATIO**2


class CorrelationShape(str, Enum):
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"
    NONE = "none"


class SensorMode(str, Enum):
    AC = "AC"
    DC = "DC"


@dataclass(frozen=True)
class SensorSensitivity:
    s_dc: float
    s_ac: float
    f0: float

    def __post_init__(self):
        for name in ("s_dc", "s_ac", "f0"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")


@dataclass(frozen=True)
class SampleNoiseModel:
    """Single-point field noise S_E(f) = A f^-alpha plus a spatial correlation kernel.

    The kernel is frequency independent: exp(-d/l) or exp(-d^2 / 2 l^2).
    """

    amplitude: float = 0.0
    alpha: float = 1.0
    correlation_length: float = 1.0
    correlation_shape: CorrelationShape = CorrelationShape.NONE

    def __post_init__(self):
        object.__setattr__(self, "correlation_shape", CorrelationShape(self.correlation_shape))
        if not self.amplitude >= 0:
            raise DomainError("sample noise amplitude must be >= 0")
        if not 0 <= self.alpha <= 3:
            raise DomainError(f"alpha must lie in [0, 3], got {self.alpha}")
        if self.correlation_shape is not CorrelationShape.NONE and not self.correlation_length > 0:
            raise DomainError("correlation length must be > 0")

    @classmethod
    def white_differential(cls, s_sample):
        """Uncorrelated white noise whose differential ASD is `s_sample`."""
        return cls(amplitude=s_sample**2 / 2, alpha=0.0)

    def single_point_psd(self, f):
        f = np.asarray(f, dtype=float)
        return self.amplitude * f ** (-self.alpha)

    def correlation(self, d):
        if self.correlation_shape is CorrelationShape.NONE:
            return 0.0
        ell = self.correlation_length
        if self.correlation_shape is CorrelationShape.EXPONENTIAL:
            return float(np.exp(-d / ell))
        return float(np.exp(-(d**2) / (2 * ell**2)))


@dataclass(frozen=True)
class NoiseBudget:
    sensor: SensorSensitivity
    sample: SampleNoiseModel = SampleNoiseModel()
    mode: SensorMode = SensorMode.AC

    def __post_init__(self):
        object.__setattr__(self, "mode", SensorMode(self.mode))

    @property
    def s_sens(self):
        return self.sensor.s_ac if self.mode is SensorMode.AC else self.sensor.s_dc

    def evaluation_frequency(self, t_live):
        """f0 for lock-in operation, 1/(2 T_live) as the DC echo band centre."""
        if self.mode is SensorMode.AC:
            return self.sensor.f0
        return 1.0 / (2.0 * t_live)


def differential_psd(sample, f, d):
    """2 S_E(f) [1 - C(d)]."""
    if np.any(np.asarray(f) <= 0):
        raise DomainError("frequency must be > 0")
    return 2.0 * sample.single_point_psd(f) * (1.0 - sample.correlation(d))


def differential_asd(sample, f, d):
    return np.sqrt(differential_psd(sample, f, d))


def total_asd(budget, f, d):
    s_sample = differential_asd(budget.sample, f, d)
    return np.sqrt(budget.s_sens**2 + s_sample**2)


def slowdown_factor(budget, f, d):
    """tau / tau_0 = 1 + (s_sample / s_sens)^2."""
    return 1.0 + differential_psd(budget.sample, f, d) / budget.s_sens**2


def gate_pass(budget, f, d):
    return bool(slowdown_factor(budget, f, d) <= GATE_SLOWDOWN)


def sample_noise_threshold(s_sens):
    """Largest differential sample ASD that keeps the slow-down under GATE_SLOWDOWN."""
    return GATE_RATIO * s_sens


def synthesize_timeseries(sample, duration, sample_rate, seed, d=None):
    """Zero-mean Gaussian series whose one-sided PSD is the target model.

    The target is the differential PSD at baseline `d`, or the single-point
    PSD when `d` is None. Built by shaping seeded complex white noise in the
    frequency domain; the DC bin is zeroed.
    """
    n = int(round(duration * sample_rate))
    if n < 2**10:
        raise InsufficientDataError(f"need at least 1024 samples, got {n}")
    if sample.amplitude == 0:
        return np.zeros(n)
    rng = np.random.default_rng(seed)
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    target = np.zeros_like(freqs)
    pos = freqs > 0
    if d is None:
        target[pos] = sample.single_point_psd(freqs[pos])
    else:
        target[pos] = differential_psd(sample, freqs[pos], d)
    # one-sided periodogram P_k = 2 |X_k|^2 / (fs n) away from DC and Nyquist
    scale = np.sqrt(target * sample_rate * n / 2.0)
    spec = scale * (rng.standard_normal(freqs.size) + 1j * rng.standard_normal(freqs.size)) / np.sqrt(2.0)
    if n % 2 == 0:
        spec[-1] = np.sqrt(target[-1] * sample_rate * n) * rng.standard_normal()
    spec[0] = 0.0
    return np.fft.irfft(spec, n=n)


def allan_deviation(series, taus, sample_rate):
    """Overlapping Allan deviation of evenly sampled field values.

    Each tau is rounded to a whole number of samples m >= 1 and must not
    exceed a quarter of the record.
    """
    y = np.asarray(series, dtype=float)
    n = y.size
    duration = n / sample_rate
    out = []
    csum = np.concatenate(([0.0], np.cumsum(y)))
    for tau in np.atleast_1d(taus):
        if tau > duration / 4:
            raise InsufficientDataError(f"tau={tau} s exceeds a quarter of the {duration} s record")
        m = int(round(tau * sample_rate))
        if m < 1:
            raise InsufficientDataError(f"tau={tau} s is shorter than one sample")
        means = (csum[m:] - csum[:-m]) / m
        diffs = means[m:] - means[:-m]
        out.append(np.sqrt(0.5 * np.mean(diffs**2)))
    return np.array(out)


def fit_loglog_slope(x, y):
    """Least-squares slope of log10(y) vs log10(x)."""
    return float(np.polyfit(np.log10(x), np.log10(y), 1)[0])


def write_timeseries(path, times, values):
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise InputError("time and value arrays differ in length")
    np.savetxt(path, np.column_stack([times, values]), delimiter=",",
               header="time_s,field_V_per_m", comments="", fmt="%.17g")


def read_timeseries(path):
    """Read a two-column (time_s, field_V_per_m) CSV with a one-line header."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise InputError(f"{path}: expected 2 columns, found {data.shape[1]}")
    return data[:, 0], data[:, 1]


def sample_rate_of(times):
    dt = np.diff(np.asarray(times, dtype=float))
    if dt.size == 0 or np.any(dt <= 0):
        raise InputError("time column must be strictly increasing")
    if np.ptp(dt) > 1e-6 * np.mean(dt):
        raise InputError("time column must be evenly sampled")
    return 1.0 / np.mean(dt)
