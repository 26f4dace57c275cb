"""Command-line interface: ``qli field | feasibility | simulate | noise | sweep``.

Data files are comma-separated with a header row and full float precision;
console tables round to three significant figures. With ``--out DIR`` every
command also writes ``manifest.txt`` (flat ``key = value`` lines).

Errors exit non-zero with one line ``error: <ErrorClass>: <message>``.
"""

import argparse
import csv
import io
import math
import os
import sys
import time
import warnings

import numpy as np
from scipy import signal as sps

from . import __version__
from . import scenario as scn
from .errors import QLIError, ScenarioError
from .feasibility import (
    LockinReference,
    cycled_stream,
    lockin_demodulate,
    shot_budget,
    sweep,
    SWEEP_AXES,
)
from .golden import crystal_rows, feasibility_rows, field_rows
from .noise_model import (
    allan_deviation,
    differential_asd,
    differential_psd,
    fit_loglog_slope,
    read_timeseries,
    sample_noise_threshold,
    sample_rate_of,
    slowdown_factor,
    synthesize_timeseries,
    total_asd,
    write_timeseries,
)
from .protocol_sim import estimate_phase, run_interrogation, sample_shots
from .transduction import contrast, gain, phase_from_field

EXIT_USAGE = 2
EXIT_ERROR = 1


# -- output helpers -----------------------------------------------------------


def _cell(value, precise):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if precise:
            return repr(value)
        return f"{value:.3g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def rows_to_csv(rows):
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[k], True) for k in header])
    return buf.getvalue()


def rows_to_table(rows):
    if not rows:
        return ""
    header = list(rows[0])
    cells = [[_cell(row[k], False) for k in header] for row in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(line, widths)) for line in cells]
    return "\n".join(lines) + "\n"


class Output:
    """Collects data files for one invocation and writes the manifest."""

    def __init__(self, args, doc):
        self.args = args
        self.doc = doc
        self.files = []

    def emit(self, name, rows):
        fmt = self.args.format
        sys.stdout.write(rows_to_csv(rows) if fmt == "csv" else rows_to_table(rows))
        if self.args.out:
            self.write(name, rows_to_csv(rows))

    def write(self, name, text):
        os.makedirs(self.args.out, exist_ok=True)
        with open(os.path.join(self.args.out, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.files.append(name)

    def register(self, name):
        self.files.append(name)

    def finish(self):
        if not self.args.out:
            return
        manifest = {
            "tool": "qli_sim",
            "tool_version": __version__,
            "command": self.args.command + (f" {self.args.analysis}" if getattr(self.args, "analysis", None) else ""),
            "scenario_sha256": scn.scenario_hash(self.doc),
            "seed": self.args.seed,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "outputs": ",".join(self.files),
        }
        text = "".join(f"{k} = {v}\n" for k, v in manifest.items())
        with open(os.path.join(self.args.out, "manifest.txt"), "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(os.path.join(self.args.out, "scenario.ini"), "w", encoding="utf-8") as fh:
            fh.write(scn.emit(self.doc))


def _golden_dicts(rows):
    return [r.as_dict() for r in rows]


# -- commands -----------------------------------------------------------------


def cmd_field(args, doc, out):
    sc = scn.build_scenario(doc)
    out.emit("field.csv", _golden_dicts(field_rows(sc)))


def cmd_feasibility(args, doc, out):
    sc = scn.build_scenario(doc)
    rows = feasibility_rows(sc, scn.build_throughput(doc))
    rows += crystal_rows(sc.crystal)
    out.emit("feasibility.csv", _golden_dicts(rows))


def cmd_simulate(args, doc, out):
    crystal = scn.build_crystal(doc)
    seq = scn.build_sdf(doc)
    sim = doc["simulate"]
    shots = args.shots if args.shots is not None else sim["shots"]
    if shots < 1:
        raise ScenarioError("shot count must be >= 1")
    field = sim["delta_ex_v_per_m"]
    state = run_interrogation(seq, crystal, field, n_max=doc["sdf"]["n_max"])
    g = gain(seq, crystal)
    phi_true = phase_from_field(g, field)
    phi_sim = state.relative_phase()
    record = sample_shots(state, shots, args.seed, sim["bias_rad"])
    vis = state.overlap()
    try:
        est = estimate_phase(record, bias_phase=sim["bias_rad"], visibility=vis)
        phi_hat, std = est.phi_hat, est.std_error
    except QLIError as exc:
        warnings.warn(str(exc))
        phi_hat, std = math.nan, math.nan
    bright = sum(s.bright for s in record)
    summary = {
        "delta_ex_V_per_m": field,
        "gain_rad_per_V_per_m": g.value,
        "phi_analytic_rad": phi_true,
        "phi_oracle_rad": phi_sim,
        "oracle_gain_rel_dev": (phi_sim - phi_true) / phi_true if phi_true else phi_sim,
        "overlap_deficit": 1 - vis,
        "contrast_formula": contrast(seq),
        "contrast_oracle": vis**2,
        "epsilon_rad": seq.epsilon,
        "n_max": state.n_max,
        "steps": getattr(state, "steps_used", 0),
        "bias_rad": sim["bias_rad"],
        "shots": shots,
        "bright": bright,
        "phi_hat_rad": phi_hat,
        "phi_std_rad": std,
        "sql_1_over_sqrt_m": 1 / math.sqrt(shots),
        "seed": args.seed,
    }
    rows = [{"quantity": k, "value": v} for k, v in summary.items()]
    out.emit("simulate.csv", rows)
    if args.out:
        out.write("shots.csv", "shot,bright\n" + "".join(f"{i},{int(s.bright)}\n" for i, s in enumerate(record)))


def _noise_series(args, doc):
    sc = scn.build_scenario(doc)
    n = doc["noise"]
    if args.input:
        t, x = read_timeseries(args.input)
        return t, x, sample_rate_of(t)
    fs = n["sample_rate_hz"]
    x = synthesize_timeseries(sc.budget.sample, n["duration_s"], fs, args.seed, d=sc.geometry.d)
    return np.arange(x.size) / fs, x, fs


def cmd_noise(args, doc, out):
    sc = scn.build_scenario(doc)
    d = sc.geometry.d
    n = doc["noise"]
    if args.analysis == "psd":
        f0 = sc.budget.sensor.f0
        freqs = np.unique(np.concatenate([np.logspace(-2, 2, 9), [f0]]))
        rows = []
        for f in freqs:
            single = float(sc.budget.sample.single_point_psd(f))
            diff = float(differential_psd(sc.budget.sample, f, d))
            rows.append({
                "f_hz": float(f),
                "single_point_psd": single,
                "differential_psd": diff,
                "s_sample_V_per_m_rtHz": float(differential_asd(sc.budget.sample, f, d)),
                "asd_ratio_diff_over_single": math.sqrt(diff / single) if single > 0 else math.nan,
                "correlation": sc.budget.sample.correlation(d),
                "s_tot_V_per_m_rtHz": float(total_asd(sc.budget, f, d)),
                "slowdown": float(slowdown_factor(sc.budget, f, d)),
                "gate_threshold_V_per_m_rtHz": sample_noise_threshold(sc.budget.s_sens),
                "gate_pass": bool(slowdown_factor(sc.budget, f, d) <= 1.2025),
            })
        out.emit("noise_psd.csv", rows)
    elif args.analysis == "synth":
        t, x, fs = _noise_series(args, doc)
        rows = [{"samples": x.size, "sample_rate_hz": fs, "std_V_per_m": float(np.std(x))}]
        if np.any(x != 0):
            f, p = sps.welch(x, fs=fs, nperseg=min(4096, x.size // 4))
            band = (f > fs / x.size * 20) & (f < fs / 4)
            rows[0]["fitted_psd_slope"] = fit_loglog_slope(f[band], p[band])
            rows[0]["target_alpha"] = sc.budget.sample.alpha
        out.emit("synth_summary.csv", rows)
        if args.out:
            write_timeseries(os.path.join(args.out, "timeseries.csv"), t, x)
            out.register("timeseries.csv")
    elif args.analysis == "allan":
        t, x, fs = _noise_series(args, doc)
        duration = x.size / fs
        taus = np.unique(np.round(np.logspace(0, np.log10(duration / 4), 12) * fs) / fs)
        taus = taus[(taus >= 1 / fs) & (taus <= duration / 4)]
        adev = allan_deviation(x, taus, fs)
        rows = [{"tau_s": float(a), "allan_dev_V_per_m": float(b)} for a, b in zip(taus, adev)]
        out.emit("allan.csv", rows)
    elif args.analysis == "demod":
        fs = n["sample_rate_hz"]
        t = np.arange(int(round(n["duration_s"] * fs))) / fs
        f0 = sc.budget.sensor.f0
        sample_noise = synthesize_timeseries(sc.budget.sample, n["duration_s"], fs, args.seed, d=d)
        rng = np.random.default_rng([args.seed, 1])
        white = n["white_asd_mv_per_m_rthz"] * 1e-3 * math.sqrt(fs / 2) * rng.standard_normal(t.size)
        tone = n["tone_v_per_m"] * np.cos(2 * np.pi * f0 * t)
        rows = []
        for cycling in (False, True):
            x = cycled_stream(t, tone, sample_noise + white, n["offset_v_per_m"], phase_cycling=cycling)
            ref = LockinReference(f0, phase_cycling=cycling)
            res = lockin_demodulate(t, x, ref)
            rows.append({
                "phase_cycling": cycling,
                "estimate_V_per_m": res.estimate,
                "amplitude_V_per_m": res.estimate / ref.gain,
                "std_error_V_per_m": res.std_error,
                "snr": res.snr,
                "samples": res.samples,
            })
        plan = scn.build_scenario(doc).plan
        budget = shot_budget(plan, n["duration_s"])
        for r in rows:
            r["shots_at_plan"] = budget.shots
        out.emit("demod.csv", rows)


def _parse_axes(items):
    axes = {}
    for item in items or ():
        if "=" not in item:
            raise ScenarioError(f"axis {item!r}: expected name=v1,v2,...")
        name, values = item.split("=", 1)
        name = name.strip()
        if name not in SWEEP_AXES:
            raise ScenarioError(f"axis {name!r}: choose from {', '.join(SWEEP_AXES)}")
        try:
            axes[name] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise ScenarioError(f"axis {item!r}: values must be numbers") from None
    if not axes:
        raise ScenarioError("sweep needs at least one --axis name=v1,v2,...")
    return axes


def cmd_sweep(args, doc, out):
    sc = scn.build_scenario(doc)
    rows = sweep(sc, _parse_axes(args.axis), cap=args.cap)
    out.emit("sweep.csv", rows)


# -- entry point ----------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", default=scn.PAPER_DEFAULTS,
                        help="scenario INI file, or 'paper-defaults' (default)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="directory for data files and manifest")
    common.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
    common.add_argument("--format", choices=("table", "csv"), default="table")

    parser = argparse.ArgumentParser(prog="qli", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qli_sim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("field", parents=[common], help="signal magnitudes")
    sub.add_parser("feasibility", parents=[common], help="golden-number table")
    p = sub.add_parser("simulate", parents=[common], help="protocol oracle and shot Monte Carlo")
    p.add_argument("--shots", type=int, help="shot count M (default from scenario)")
    p = sub.add_parser("noise", parents=[common], help="noise analyses")
    p.add_argument("analysis", choices=("psd", "synth", "allan", "demod"))
    p.add_argument("--input", help="two-column time_s,field_V_per_m CSV (synth/allan)")
    p = sub.add_parser("sweep", parents=[common], help="grid sweep")
    p.add_argument("--axis", action="append", metavar="NAME=V1,V2,...",
                   help=f"axis over one of: {', '.join(SWEEP_AXES)}")
    p.add_argument("--cap", type=int, default=10_000)
    return parser


COMMANDS = {
    "field": cmd_field,
    "feasibility": cmd_feasibility,
    "simulate": cmd_simulate,
    "noise": cmd_noise,
    "sweep": cmd_sweep,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = scn.apply_overrides(scn.load(args.scenario), args.override)
        out = Output(args, doc)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            COMMANDS[args.command](args, doc, out)
        out.finish()
    except ScenarioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QLIError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
