"""Where does sample noise start to cost integration time?

For each correlation length, find the single-point noise level that puts
the differential ASD at the gate, and check the synthesized series against
the model PSD.
"""

import argparse

import numpy as np
from scipy.signal import welch

from qli_sim import scenario as scn
from qli_sim.noise_model import (
    GATE_RATIO,
    SampleNoiseModel,
    differential_psd,
    synthesize_timeseries,
)

FS = 100.0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sc = scn.build_scenario(scn.defaults())
    d = sc.geometry.d
    f0 = sc.budget.sensor.f0
    s_gate = GATE_RATIO * sc.budget.s_sens
    print(f"baseline d = {d * 1e6:.2f} um, f0 = {f0} Hz, gate = {s_gate * 1e3:.3f} mV/m/rtHz")
    print(f"{'l_c (um)':>10} {'C(d)':>8} {'A at gate':>12} {'synth/model (dB)':>18}")
    for ell_um in (1, 3, 10, 30, 100, 300):
        probe = SampleNoiseModel(1.0, args.alpha, ell_um * 1e-6, "exponential")
        amp = s_gate**2 / float(differential_psd(probe, f0, d))
        model = SampleNoiseModel(amp, args.alpha, ell_um * 1e-6, "exponential")
        x = synthesize_timeseries(model, 2**16 / FS, FS, args.seed, d=d)
        f, p = welch(x, fs=FS, nperseg=4096)
        band = (f >= 0.1) & (f <= 10)
        db = 10 * np.log10(np.mean(p[band] / differential_psd(model, f[band], d)))
        print(f"{ell_um:>10} {model.correlation(d):>8.4f} {amp:>12.3e} {db:>18.2f}")


if __name__ == "__main__":
    main()
