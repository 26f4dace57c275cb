"""Acceptance criteria 1-11, one test each.

Every test appends a one-line PASS/FAIL verdict to the acceptance log, which
conftest prints in the terminal summary, then asserts on the same verdict.
"""

import time
from dataclasses import replace

import numpy as np
import pytest
from scipy.signal import welch

from qli_sim.cli import main
from qli_sim.constants import MICRON, MV_PER_M
from qli_sim.electrostatics import InterfaceKind, InterfaceModel, c_eff, delta_ex
from qli_sim.feasibility import LockinReference, cycled_stream, integration_time, lockin_demodulate
from qli_sim.golden import HOUR, DAY, with_geometry, with_mode
from qli_sim.ion_crystal import YB171, equilibrium_separation
from qli_sim.noise_model import (
    GATE_RATIO,
    CorrelationShape,
    NoiseBudget,
    SampleNoiseModel,
    allan_deviation,
    differential_asd,
    differential_psd,
    fit_loglog_slope,
    slowdown_factor,
    synthesize_timeseries,
)
from qli_sim.protocol_sim import estimate_phase, run_interrogation, sample_shots
from qli_sim.transduction import SDFSequence, contrast, gain, phase_from_field, visibility


def verdict(log, number, ok, detail):
    log.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


def rel(a, b):
    return abs(a / b - 1)


def test_criterion_01_signal_values(paper_scenario, acceptance_log):
    t0 = time.perf_counter()
    vac = delta_ex(paper_scenario.geometry, paper_scenario.dipole, InterfaceModel(InterfaceKind.VACUUM))
    eta = paper_scenario.delta_ex_max
    rms = paper_scenario.signal_rms
    dt = time.perf_counter() - t0
    ok = rel(vac, 5.7e-4) <= 0.02 and rel(eta, 2.9e-4) <= 0.02 and rel(rms, 1.55e-4) <= 0.15 and dt < 1
    verdict(acceptance_log, 1, ok,
            f"dE_vac={vac:.4g} ({rel(vac, 5.7e-4):.1%}), dE_eta={eta:.4g} ({rel(eta, 2.9e-4):.1%}), "
            f"dE_rms={rms:.4g} ({rel(rms, 1.55e-4):.1%}) V/m, {dt:.3f} s")


def test_criterion_02_integration_times(paper_scenario, acceptance_log):
    t0 = time.perf_counter()
    ac, dc = with_mode(paper_scenario, "AC"), with_mode(paper_scenario, "DC")
    tau_ac, tau_dc = integration_time(ac), integration_time(dc)
    r_snr = integration_time(replace(ac, snr_target=10.0)) / tau_ac
    r_d = integration_time(with_geometry(ac, d=10 * MICRON)) / tau_ac
    # baseline leverage: strip the geometry factor, which c_eff computes independently of delta_ex
    h = ac.geometry.h
    r_d_fixed = r_d / (c_eff(3.45 * MICRON / h) / c_eff(10 * MICRON / h)) ** 2
    h30_ac = integration_time(with_geometry(ac, h=30 * MICRON)) / HOUR
    h30_dc = integration_time(with_geometry(dc, h=30 * MICRON)) / DAY
    dt = time.perf_counter() - t0
    ok = (
        rel(tau_ac, 38) <= 0.15 and rel(tau_dc, 162) <= 0.15
        and abs(r_snr / 100 - 1) <= 1e-9
        and abs(r_d_fixed / (3.45 / 10) ** 2 - 1) <= 1e-9
        and rel(h30_ac, 63) <= 0.20 and rel(h30_dc, 11) <= 0.20 and dt < 1
    )
    verdict(acceptance_log, 2, ok,
            f"tau_AC={tau_ac:.1f} s ({rel(tau_ac, 38):.1%}), tau_DC={tau_dc:.1f} s ({rel(tau_dc, 162):.1%}), "
            f"SNR10 ratio dev {abs(r_snr / 100 - 1):.1e}, d-leverage ratio dev {abs(r_d_fixed / (3.45 / 10) ** 2 - 1):.1e} "
            f"(full geometry {r_d:.3f}), h30 {h30_ac:.1f} h / {h30_dc:.2f} d, {dt:.3f} s")


def test_criterion_03_crystal(acceptance_log):
    t0 = time.perf_counter()
    d = equilibrium_separation(YB171, 2 * np.pi * 1e6)
    dt = time.perf_counter() - t0
    ok = rel(d, 3.45e-6) <= 0.005 and dt < 1
    verdict(acceptance_log, 3, ok, f"d_eq={d / MICRON:.4f} um ({rel(d, 3.45e-6):.2%}), {dt:.3f} s")


@pytest.mark.slow
def test_criterion_04_transduction_oracle(yb_crystal, acceptance_log):
    t0 = time.perf_counter()
    worst_dev, worst_deficit, count = 0.0, 0.0, 0
    for n in (1, 2, 4):
        for ratio in (0.05, 0.1, 0.2):
            for f_delta in (5e3, 10e3, 20e3):
                delta = 2 * np.pi * f_delta
                seq = SDFSequence.closed(ratio * delta, delta, n)
                g = gain(seq, yb_crystal).value
                field = 0.05 / abs(g)  # 50 mrad of signal phase
                state = run_interrogation(seq, yb_crystal, field, thermal=False)
                expected = phase_from_field(gain(seq, yb_crystal), field)
                worst_dev = max(worst_dev, rel(state.relative_phase(), expected))
                worst_deficit = max(worst_deficit, 1 - state.overlap())
                count += 1
    dt = time.perf_counter() - t0
    ok = count >= 20 and worst_dev <= 0.01 and worst_deficit < 1e-6 and dt < 300
    verdict(acceptance_log, 4, ok,
            f"{count} sets, worst phase deviation {worst_dev:.1e}, worst overlap deficit {worst_deficit:.1e}, {dt:.1f} s")


@pytest.mark.slow
def test_criterion_05_contrast(yb_crystal, acceptance_log):
    t0 = time.perf_counter()
    delta = 2 * np.pi * 10e3
    g_over_delta = 0.5
    worst = 0.0
    cases = []
    for nbar in (0.0, 0.5, 2.0):
        for x in (0.02, 0.05, 0.1):
            eps = np.sqrt(x) / g_over_delta
            seq = SDFSequence.closed(g_over_delta * delta, delta, 1, nbar=nbar, epsilon=eps)
            state = run_interrogation(seq, yb_crystal, 0.0)
            numeric = state.overlap() ** 2
            formula = contrast(seq)
            worst = max(worst, rel(numeric, formula))
            cases.append(f"{nbar:g}/{x:g}:{numeric:.4f}v{formula:.4f}")
    dt = time.perf_counter() - t0
    ok = worst <= 0.05 and dt < 300
    verdict(acceptance_log, 5, ok, f"worst deviation {worst:.2%} over nbar/(g eps/delta)^2 {' '.join(cases)}, {dt:.1f} s")


def test_criterion_06_standard_quantum_limit(yb_crystal, paper_scenario, acceptance_log):
    t0 = time.perf_counter()
    seq = SDFSequence.closed(2 * np.pi * 2e3, 2 * np.pi * 10e3, 2)
    state = run_interrogation(seq, yb_crystal, 1e-3)
    bias = np.pi / 2 - state.relative_phase()
    scaled = []
    for m in (100, 1000, 10000):
        est = [estimate_phase(sample_shots(state, m, seed, bias), bias).phi_hat for seed in range(500)]
        scaled.append(np.std(est, ddof=1) * np.sqrt(m))
    spread = max(scaled) / min(scaled) - 1
    dt = time.perf_counter() - t0
    ok = spread <= 0.20 and dt < 120
    verdict(acceptance_log, 6, ok,
            "std*sqrt(M) = " + ", ".join(f"{s:.3f}" for s in scaled) + f" (spread {spread:.1%}), {dt:.1f} s")


def test_criterion_07_gate(paper_scenario, acceptance_log):
    t0 = time.perf_counter()
    sensor = paper_scenario.budget.sensor
    slow = [
        float(slowdown_factor(NoiseBudget(sensor, SampleNoiseModel.white_differential(GATE_RATIO * s), mode), 1.0, 3e-6))
        for s, mode in ((sensor.s_ac, "AC"), (sensor.s_dc, "DC"))
    ]
    th_ac = GATE_RATIO * sensor.s_ac / MV_PER_M
    th_dc = GATE_RATIO * sensor.s_dc / MV_PER_M
    dt = time.perf_counter() - t0
    ok = all(abs(s - 1.2025) <= 1e-12 for s in slow) and rel(th_ac, 0.43) <= 0.01 and rel(th_dc, 0.88) <= 0.01 and dt < 1
    verdict(acceptance_log, 7, ok,
            f"slowdown {slow[0]!r}/{slow[1]!r}, thresholds {th_ac:.4f}/{th_dc:.4f} mV/m/rtHz, {dt:.3f} s")


def test_criterion_08_differential_limits(acceptance_log):
    base = SampleNoiseModel(1e-8, 1.0)
    ratio = float(differential_asd(base, 3.0, 3.45e-6) / np.sqrt(base.single_point_psd(3.0)))
    corr = SampleNoiseModel(1e-8, 1.0, 1.0, CorrelationShape.EXPONENTIAL)
    near = [float(differential_psd(corr, 3.0, d) / (2 * corr.single_point_psd(3.0))) for d in (1e-3, 1e-6, 1e-9)]
    ok = abs(ratio - np.sqrt(2)) <= 1e-9 and near[0] > near[1] > near[2] and near[2] < 1e-8
    verdict(acceptance_log, 8, ok,
            f"C=0 ASD ratio {ratio!r}, relative PSD as C->1: " + ", ".join(f"{v:.1e}" for v in near))


def test_criterion_09_synthesis_round_trip(acceptance_log):
    t0 = time.perf_counter()
    fs = 100.0
    worst = {}
    for alpha in (0.0, 1.0, 2.0):
        model = SampleNoiseModel(1e-8, alpha)
        devs = []
        for seed in range(20):
            x = synthesize_timeseries(model, 2**16 / fs, fs, seed)
            f, p = welch(x, fs=fs, nperseg=4096)
            band = (f >= 0.1) & (f <= 10)
            devs.append(abs(fit_loglog_slope(f[band], p[band]) + alpha))
        worst[alpha] = max(devs)
    white = np.random.default_rng(0).standard_normal(2**16)
    taus = np.logspace(-1.5, 1.5, 12)
    adev_slope = fit_loglog_slope(taus, allan_deviation(white, taus, fs))
    dt = time.perf_counter() - t0
    ok = all(v <= 0.1 for v in worst.values()) and abs(adev_slope + 0.5) <= 0.05 and dt < 120
    verdict(acceptance_log, 9, ok,
            "worst |slope+alpha| " + ", ".join(f"a={a:g}:{v:.3f}" for a, v in worst.items())
            + f"; Allan slope {adev_slope:.3f}, {dt:.1f} s")


def test_criterion_10_lockin(acceptance_log):
    t0 = time.perf_counter()
    fs, f0, tone, sigma = 100.0, 5.8, 1e-3, 1e-2
    ref = LockinReference(f0, phase_cycling=True)

    def stream(duration, seed, offset=0.0, amp=tone, noise=sigma, cycling=True):
        t = np.arange(int(round(duration * fs))) / fs
        n = noise * np.random.default_rng(seed).standard_normal(t.size)
        return t, cycled_stream(t, amp * np.cos(2 * np.pi * f0 * t), n, offset, cycling)

    snrs = {}
    for duration in (60.0, 600.0):
        est = np.array([lockin_demodulate(*stream(duration, s), ref).estimate for s in range(100)])
        snrs[duration] = est.mean() / est.std(ddof=1)
    growth = snrs[600.0] / snrs[60.0]
    offset = 1e-2
    leak_on = abs(lockin_demodulate(*stream(600.0, 0, offset, 0.0, 0.0), ref).estimate)
    leak_off = abs(lockin_demodulate(*stream(600.0, 0, offset, 0.0, 0.0, cycling=False),
                                     LockinReference(f0)).estimate)
    suppression = 20 * np.log10(offset / max(leak_on, np.finfo(float).tiny))
    dt = time.perf_counter() - t0
    ok = rel(growth, np.sqrt(10)) <= 0.20 and suppression >= 40 and dt < 120
    verdict(acceptance_log, 10, ok,
            f"SNR(600 s)/SNR(60 s)={growth:.3f} vs sqrt10={np.sqrt(10):.3f}; offset residue with cycling {leak_on:.1e} "
            f"({suppression:.0f} dB), without {leak_off:.1e}; {dt:.1f} s")


def test_criterion_11_determinism(tmp_path, capsys, acceptance_log):
    identical = []
    for argv in (["simulate", "--shots", "5000", "--seed", "11"],
                 ["sweep", "--axis", "h_um=5,10,20,30", "--axis", "epsilon_r=1,3,10"]):
        blobs = []
        for k in range(2):
            out = tmp_path / f"{argv[0]}{k}"
            assert main(argv + ["--out", str(out), "--format", "csv"]) == 0
            blobs.append({p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.name != "manifest.txt"})
        identical.append(blobs[0] == blobs[1] and len(blobs[0]) >= 2)
    capsys.readouterr()
    verdict(acceptance_log, 11, all(identical),
            f"simulate data files identical: {identical[0]}, sweep data files identical: {identical[1]}")
