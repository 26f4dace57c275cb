import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.signal import welch

from qli_sim.errors import DomainError, InputError, InsufficientDataError
from qli_sim.noise_model import (
    GATE_RATIO,
    GATE_SLOWDOWN,
    CorrelationShape,
    NoiseBudget,
    SampleNoiseModel,
    SensorSensitivity,
    allan_deviation,
    differential_asd,
    differential_psd,
    fit_loglog_slope,
    gate_pass,
    read_timeseries,
    sample_noise_threshold,
    slowdown_factor,
    synthesize_timeseries,
    total_asd,
    write_timeseries,
)

SENSOR = SensorSensitivity(s_dc=1.97e-3, s_ac=0.96e-3, f0=5.8)
FS = 100.0


def band_psd(x, lo=0.1, hi=10.0):
    f, p = welch(x, fs=FS, nperseg=4096)
    keep = (f >= lo) & (f <= hi)
    return f[keep], p[keep]


class TestDifferentialPSD:
    def test_uncorrelated_limit(self):
        m = SampleNoiseModel(1e-8, 1.0)
        assert differential_psd(m, 2.0, 1e-6) == pytest.approx(2 * m.single_point_psd(2.0))
        assert differential_asd(m, 2.0, 1e-6) == pytest.approx(np.sqrt(2) * np.sqrt(m.single_point_psd(2.0)))

    def test_perfect_correlation_limit(self):
        m = SampleNoiseModel(1e-8, 1.0, 1.0, CorrelationShape.EXPONENTIAL)
        assert differential_psd(m, 2.0, 1e-12) == pytest.approx(0.0, abs=1e-19)

    def test_exponential_at_one_length(self):
        m = SampleNoiseModel(1e-8, 0.0, 5e-6, "exponential")
        assert differential_psd(m, 1.0, 5e-6) == pytest.approx(2e-8 * (1 - np.exp(-1)), rel=1e-12)

    def test_gaussian_kernel(self):
        m = SampleNoiseModel(1e-8, 0.0, 5e-6, "gaussian")
        assert m.correlation(5e-6) == pytest.approx(np.exp(-0.5))

    @given(st.floats(0, 1e-6), st.floats(0, 3), st.floats(1e-7, 1e-3), st.floats(1e-7, 1e-3), st.floats(1e-3, 1e3))
    def test_bounds(self, amp, alpha, ell, d, f):
        for shape in ("exponential", "gaussian"):
            m = SampleNoiseModel(amp, alpha, ell, shape)
            val = differential_psd(m, f, d)
            assert 0 <= val <= 2 * m.single_point_psd(f) * (1 + 1e-12)

    @given(st.floats(1e-7, 1e-4), st.floats(1.01, 10), st.floats(1e-7, 1e-4))
    def test_monotone_in_correlation_length(self, ell, k, d):
        a = SampleNoiseModel(1e-8, 1.0, ell, "exponential")
        b = SampleNoiseModel(1e-8, 1.0, k * ell, "exponential")
        assert differential_psd(b, 1.0, d) <= differential_psd(a, 1.0, d)

    @given(st.floats(0, 1e-6), st.floats(0.01, 100))
    def test_quadrature_bounds(self, amp, f):
        budget = NoiseBudget(SENSOR, SampleNoiseModel(amp, 1.0))
        tot = total_asd(budget, f, 3e-6)
        samp = differential_asd(budget.sample, f, 3e-6)
        assert max(budget.s_sens, samp) <= tot * (1 + 1e-12)
        assert tot <= (budget.s_sens + samp) * (1 + 1e-12)

    def test_zero_frequency_rejected(self):
        with pytest.raises(DomainError):
            differential_psd(SampleNoiseModel(1e-8), 0.0, 1e-6)

    def test_alpha_range(self):
        with pytest.raises(DomainError):
            SampleNoiseModel(1e-8, 3.5)


class TestGate:
    def test_threshold(self):
        assert sample_noise_threshold(SENSOR.s_ac) == pytest.approx(0.432e-3)
        assert sample_noise_threshold(SENSOR.s_dc) == pytest.approx(0.8865e-3)

    def test_slowdown_at_gate(self):
        budget = NoiseBudget(SENSOR, SampleNoiseModel.white_differential(GATE_RATIO * SENSOR.s_ac))
        assert slowdown_factor(budget, 5.8, 3e-6) == pytest.approx(1.2025, rel=1e-12)
        assert gate_pass(budget, 5.8, 3e-6)

    def test_gate_fails_above(self):
        budget = NoiseBudget(SENSOR, SampleNoiseModel.white_differential(1.01 * GATE_RATIO * SENSOR.s_ac))
        assert slowdown_factor(budget, 5.8, 3e-6) > GATE_SLOWDOWN
        assert not gate_pass(budget, 5.8, 3e-6)

    def test_noiseless_sample(self):
        assert slowdown_factor(NoiseBudget(SENSOR), 5.8, 3e-6) == 1.0

    def test_dc_evaluation_frequency(self):
        assert NoiseBudget(SENSOR, mode="DC").evaluation_frequency(0.172) == pytest.approx(1 / 0.344)
        assert NoiseBudget(SENSOR, mode="AC").evaluation_frequency(0.172) == 5.8


class TestSynthesis:
    def test_white_flat(self):
        m = SampleNoiseModel(1e-8, 0.0)
        x = synthesize_timeseries(m, 2**16 / FS, FS, seed=1)
        _, p = band_psd(x)
        db = 10 * np.log10(p.mean() / 1e-8)
        assert abs(db) < 1.0

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
    def test_slope(self, alpha):
        m = SampleNoiseModel(1e-8, alpha)
        x = synthesize_timeseries(m, 2**16 / FS, FS, seed=2)
        f, p = band_psd(x)
        assert fit_loglog_slope(f, p) == pytest.approx(-alpha, abs=0.1)

    def test_round_trip_differential(self):
        m = SampleNoiseModel(2e-9, 1.0, 10e-6, "exponential")
        x = synthesize_timeseries(m, 2**16 / FS, FS, seed=4, d=3.45e-6)
        f, p = band_psd(x)
        target = differential_psd(m, f, 3.45e-6)
        db = 10 * np.log10(np.mean(p / target))
        assert abs(db) < 1.5

    def test_zero_amplitude(self):
        assert not np.any(synthesize_timeseries(SampleNoiseModel(0.0), 20.48, FS, seed=0))

    def test_seed_reproducible(self):
        m = SampleNoiseModel(1e-8, 1.0)
        a = synthesize_timeseries(m, 20.48, FS, seed=7)
        assert np.array_equal(a, synthesize_timeseries(m, 20.48, FS, seed=7))
        assert not np.array_equal(a, synthesize_timeseries(m, 20.48, FS, seed=8))

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            synthesize_timeseries(SampleNoiseModel(1e-8), 1.0, FS, seed=0)


class TestAllan:
    def test_white_slope(self):
        x = np.random.default_rng(0).standard_normal(2**16)
        taus = np.logspace(-1.5, 1.5, 10)
        assert fit_loglog_slope(taus, allan_deviation(x, taus, FS)) == pytest.approx(-0.5, abs=0.05)

    def test_white_level(self):
        sigma = 2.0
        x = sigma * np.random.default_rng(1).standard_normal(2**16)
        assert allan_deviation(x, [1 / FS], FS)[0] == pytest.approx(sigma, rel=0.02)

    def test_constant(self):
        assert np.allclose(allan_deviation(np.full(4096, 3.0), [0.1, 1.0], FS), 0.0, atol=1e-12)

    def test_linear_drift(self):
        r = 0.25
        t = np.arange(8192) / FS
        taus = np.array([0.5, 2.0, 10.0])
        assert np.allclose(allan_deviation(r * t, taus, FS), r * taus / np.sqrt(2), rtol=1e-6)

    def test_insufficient(self):
        with pytest.raises(InsufficientDataError):
            allan_deviation(np.zeros(1000), [3.0], FS)


def test_timeseries_io(tmp_path):
    t = np.arange(100) / FS
    v = np.random.default_rng(0).standard_normal(100) * 1e-4
    write_timeseries(tmp_path / "x.csv", t, v)
    assert (tmp_path / "x.csv").read_text().splitlines()[0] == "time_s,field_V_per_m"
    t2, v2 = read_timeseries(tmp_path / "x.csv")
    assert np.array_equal(t, t2) and np.array_equal(v, v2)


def test_timeseries_length_mismatch(tmp_path):
    with pytest.raises(InputError):
        write_timeseries(tmp_path / "x.csv", np.arange(3), np.arange(4))
