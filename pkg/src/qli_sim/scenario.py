"""Scenario files: a flat INI document with unit-suffixed keys.

Every key has a documented default; unknown sections or keys are rejected.
``normalize`` returns the fully populated document and ``emit`` renders it
back to text, so parse -> emit -> parse is the identity.
"""

import configparser
import hashlib
import re
from dataclasses import dataclass

import numpy as np

from .constants import DEBYE, MICRON, MV_PER_M
from .electrostatics import DipoleMoment, GradiometerGeometry, InterfaceModel, OrientationPolicy
from .errors import ScenarioError
from .feasibility import AveragingPlan, FeasibilityScenario, ThroughputBudget
from .ion_crystal import SPECIES, IonSpecies, TwoIonCrystal
from .noise_model import NoiseBudget, SampleNoiseModel, SensorSensitivity
from .transduction import SDFSequence

PAPER_DEFAULTS = "paper-defaults"


@dataclass(frozen=True)
class Key:
    kind: type
    default: object
    choices: tuple = None
    doc: str = ""


def _choices(*names):
    return tuple(names)


SCHEMA = {
    "geometry": {
        "h_um": Key(float, 10.0, doc="ion height above the sample surface"),
        "d_um": Key(float, 3.45, doc="lateral ion-ion baseline"),
    },
    "dipole": {
        "delta_p_debye": Key(float, 20.0, doc="binding-induced dipole change"),
        "orientation_policy": Key(str, "isotropic-rms", _choices("fixed-normal", "isotropic-rms")),
    },
    "interface": {
        "kind": Key(str, "planar-dielectric", _choices("vacuum", "planar-dielectric", "metal-underlayer")),
        "epsilon_r": Key(float, 3.0, doc="relative permittivity (planar-dielectric only)"),
    },
    "crystal": {
        "species": Key(str, "171Yb+", tuple(SPECIES)),
        "omega_x_hz": Key(float, 1.0e6, doc="axial trap frequency omega_x / 2 pi"),
    },
    "sensor": {
        "mode": Key(str, "AC", _choices("AC", "DC")),
        "s_ac_mv_per_m_rthz": Key(float, 0.96),
        "s_dc_mv_per_m_rthz": Key(float, 1.97),
        "f0_hz": Key(float, 5.8, doc="demodulation frequency"),
    },
    "sample": {
        "amplitude_v2_per_m2_hz": Key(float, 0.0, doc="single-point PSD at 1 Hz"),
        "alpha": Key(float, 1.0, doc="spectral exponent of 1/f^alpha"),
        "correlation_length_um": Key(float, 100.0),
        "correlation_shape": Key(str, "none", _choices("none", "exponential", "gaussian")),
    },
    "plan": {
        "t_live_ms": Key(float, 172.0),
        "t_dead_ms": Key(float, 0.0),
        "snr_target": Key(float, 1.0),
    },
    "throughput": {
        "t_setup_min": Key(float, 15.0),
        "t_align_min": Key(float, 10.0),
        "t_cal_min": Key(float, 5.0),
        "n_avg": Key(int, 1),
    },
    "sdf": {
        "g_khz": Key(float, 2.0, doc="SDF coupling g / 2 pi"),
        "delta_khz": Key(float, 10.0, doc="detuning delta / 2 pi"),
        "loops": Key(int, 2),
        "epsilon_rad": Key(float, 0.0, doc="closure error delta T - 2 pi N"),
        "nbar": Key(float, 0.0),
        "n_max": Key(int, 24),
    },
    "simulate": {
        "delta_ex_v_per_m": Key(float, 1.0e-3, doc="differential field driving the oracle"),
        "bias_rad": Key(float, float(np.pi / 2), doc="readout bias, mid-fringe by default"),
        "shots": Key(int, 10000),
    },
    "noise": {
        "duration_s": Key(float, 600.0),
        "sample_rate_hz": Key(float, 100.0),
        "tone_v_per_m": Key(float, 1.0e-3, doc="in-band tone amplitude for demod"),
        "offset_v_per_m": Key(float, 0.0, doc="constant contaminant for demod"),
        "white_asd_mv_per_m_rthz": Key(float, 0.96, doc="sensor white noise added in demod"),
        "phase_cycling": Key(bool, True),
    },
}


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(section, key, raw, entry, line=None):
    where = f"[{section}] {key}" + (f" (line {line})" if line else "")
    text = str(raw).strip()
    try:
        if entry.kind is bool:
            low = text.lower()
            if low not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                raise ValueError(text)
            value = low in ("true", "yes", "1", "on")
        elif entry.kind is int:
            fv = float(text)
            if fv != int(fv):
                raise ValueError(text)
            value = int(fv)
        elif entry.kind is float:
            value = float(text)
        else:
            value = text
    except ValueError:
        raise ScenarioError(f"{where}: cannot read {text!r} as {entry.kind.__name__}") from None
    if entry.choices and value not in entry.choices:
        raise ScenarioError(f"{where}: {value!r} not one of {', '.join(entry.choices)}")
    return value


def _line_of(text, section, key):
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return i
    return None


def defaults():
    return {s: {k: entry.default for k, entry in keys.items()} for s, keys in SCHEMA.items()}


def parse_text(text, source="<string>"):
    """Parse scenario text into a normalized nested dict."""
    if not text.strip():
        raise ScenarioError(f"{source}: empty scenario file")
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        msg = " ".join(str(exc).split())
        raise ScenarioError(f"{source}: {msg}") from None
    if not cp.sections():
        raise ScenarioError(f"{source}: no sections found")
    doc = defaults()
    for section in cp.sections():
        if section not in SCHEMA:
            raise ScenarioError(f"{source}: unknown section [{section}]")
        for key, raw in cp.items(section):
            line = _line_of(text, section, key)
            if key not in SCHEMA[section]:
                raise ScenarioError(f"{source}: [{section}] {key} (line {line}): unknown key")
            doc[section][key] = _coerce(section, key, raw, SCHEMA[section][key], line)
    return doc


def load(path):
    if str(path) == PAPER_DEFAULTS:
        return defaults()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from None
    return parse_text(text, source=str(path))


def apply_overrides(doc, overrides):
    """Apply "section.key=value" strings to a copy of `doc`."""
    doc = {s: dict(v) for s, v in doc.items()}
    for item in overrides or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ScenarioError(f"override {item!r}: expected section.key=value")
        lhs, raw = item.split("=", 1)
        section, key = lhs.strip().split(".", 1)
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ScenarioError(f"override {item!r}: unknown key {section}.{key}")
        doc[section][key] = _coerce(section, key, raw, SCHEMA[section][key])
    return doc


def emit(doc):
    """Render a normalized document, every key present, in schema order."""
    lines = []
    for section, keys in SCHEMA.items():
        lines.append(f"[{section}]")
        for key in keys:
            lines.append(f"{key} = {_format(doc[section][key])}")
        lines.append("")
    return "\n".join(lines)


def scenario_hash(doc):
    return hashlib.sha256(emit(doc).encode()).hexdigest()


def build_scenario(doc):
    """FeasibilityScenario in SI units from a normalized document."""
    try:
        geo = GradiometerGeometry(doc["geometry"]["h_um"] * MICRON, doc["geometry"]["d_um"] * MICRON)
        dipole = DipoleMoment(doc["dipole"]["delta_p_debye"] * DEBYE)
        interface = InterfaceModel(doc["interface"]["kind"], doc["interface"]["epsilon_r"])
        crystal = build_crystal(doc)
        s = doc["sensor"]
        sensor = SensorSensitivity(
            s["s_dc_mv_per_m_rthz"] * MV_PER_M, s["s_ac_mv_per_m_rthz"] * MV_PER_M, s["f0_hz"]
        )
        sm = doc["sample"]
        sample = SampleNoiseModel(
            sm["amplitude_v2_per_m2_hz"], sm["alpha"], sm["correlation_length_um"] * MICRON,
            sm["correlation_shape"],
        )
        budget = NoiseBudget(sensor, sample, s["mode"])
        p = doc["plan"]
        plan = AveragingPlan(p["t_live_ms"] * 1e-3, p["t_dead_ms"] * 1e-3, s["f0_hz"])
        return FeasibilityScenario(
            geo, dipole, interface, crystal, budget, plan,
            OrientationPolicy(doc["dipole"]["orientation_policy"]), p["snr_target"],
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"invalid scenario: {exc}") from None


def build_crystal(doc):
    species: IonSpecies = SPECIES[doc["crystal"]["species"]]
    return TwoIonCrystal.from_frequency(species, doc["crystal"]["omega_x_hz"])


def build_sdf(doc):
    s = doc["sdf"]
    delta = 2 * np.pi * s["delta_khz"] * 1e3
    try:
        return SDFSequence.closed(2 * np.pi * s["g_khz"] * 1e3, delta, s["loops"], s["nbar"], s["epsilon_rad"])
    except ValueError as exc:
        raise ScenarioError(f"invalid [sdf] section: {exc}") from None


def build_throughput(doc):
    t = doc["throughput"]
    return ThroughputBudget(t["t_setup_min"] * 60, t["t_align_min"] * 60, t["t_cal_min"] * 60, t["n_avg"])
