"""Scenario configuration: schema, validation, unit conversion.

Configs are YAML documents with sections atom, ensemble, chirality, run and
io.  Every frequency key carries its unit in its name (``*_mhz``, ``*_us``,
``*_ns``, ``*_gauss``); the factor 2*pi and the SI scaling are applied here,
at the boundary, and nowhere else.  Unknown keys are rejected.  A manifest
JSON produced by a previous run is accepted wherever a config is (its
embedded ``config`` block is loaded), which makes any artifact reproducible
from its manifest alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import yaml

from .chirality import DirectionalOverlap, FieldEnvironment, SpinPreparation
from .errors import ConfigError
from .params import MHZ, LambdaParams
from .scenario import Scenario

_US = 1e-6
_NS = 1e-9

_SPINS = {"minus4": SpinPreparation.minus4,
          "plus4": SpinPreparation.plus4,
          "mixture": SpinPreparation.mixture}
_TUNING_REFERENCES = ("lambda_minus", "lambda_plus", "bare")
_RUN_MODES = ("dynamics", "bidirectional", "scan", "fit")
_SCAN_MODELS = ("analytic", "cascade")


@dataclass(frozen=True)
class ScanSpec:
    delta_min: float      # rad/s, common axis
    delta_max: float
    n_points: int
    model: str = "analytic"


@dataclass(frozen=True)
class EnsembleSpec:
    n_atoms: int
    t_min: float    # s
    t_max: float
    dt: float


@dataclass(frozen=True)
class TuningSpec:
    reference: str        # lambda_minus | lambda_plus | bare
    offset: float         # rad/s


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated, unit-resolved scenario configuration."""

    atom: LambdaParams            # delta_two_photon carries no meaning here
    ensemble: EnsembleSpec
    spin: SpinPreparation
    env: FieldEnvironment
    overlap: DirectionalOverlap
    tuning: TuningSpec
    mode: str
    window: tuple[float, float]   # s
    scan: ScanSpec | None
    out_dir: Path
    basename: str
    raw: dict                     # validated input document, MHz units

    def scenario(self) -> Scenario:
        sc = Scenario(base=self.atom, spin=self.spin, env=self.env,
                      overlap=self.overlap, n_atoms=self.ensemble.n_atoms)
        if self.tuning.reference == "bare":
            return sc.with_offset(self.tuning.offset)
        sign = -1 if self.tuning.reference == "lambda_minus" else +1
        return sc.tuned(sign, self.tuning.offset)


class _Section:
    """Strict key-checked access into one config section."""

    def __init__(self, name: str, data: dict, known: set[str]):
        if not isinstance(data, dict):
            raise ConfigError("section must be a mapping", key=name)
        self.name = name
        self.data = data
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown key(s) {sorted(unknown)}", key=name)

    def req(self, key: str, kind=float):
        if key not in self.data:
            raise ConfigError("required key missing", key=f"{self.name}.{key}")
        return self._coerce(key, self.data[key], kind)

    def opt(self, key: str, default, kind=float):
        if key not in self.data:
            return default
        return self._coerce(key, self.data[key], kind)

    def _coerce(self, key, value, kind):
        try:
            if kind is float:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise TypeError
                return float(value)
            if kind is int:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise TypeError
                return int(value)
            if kind is str:
                if not isinstance(value, str):
                    raise TypeError
                return value
            if kind is dict:
                if not isinstance(value, dict):
                    raise TypeError
                return value
            if kind is list:
                if not isinstance(value, (list, tuple)):
                    raise TypeError
                return list(value)
        except TypeError:
            raise ConfigError(f"expected {kind.__name__}, got {value!r}",
                              key=f"{self.name}.{key}") from None
        raise AssertionError(kind)


def _read_document(path: Path) -> dict:
    text = path.read_text()
    if path.suffix == ".json":
        doc = json.loads(text)
        if isinstance(doc, dict) and "config" in doc:  # run manifest
            doc = doc["config"]
    else:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            line = f" at line {mark.line + 1}" if mark is not None else ""
            raise ConfigError(f"YAML parse error{line}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    return doc


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a config dictionary and resolve units."""
    top_known = {"atom", "ensemble", "chirality", "run", "io"}
    unknown = set(doc) - top_known
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")
    for required in ("atom", "ensemble", "run"):
        if required not in doc:
            raise ConfigError("required section missing", key=required)

    atom = _Section("atom", doc["atom"], {
        "omega_s_mhz", "omega_p_mhz", "delta_mhz", "gamma_e_mhz",
        "gamma_ab_mhz", "od0", "branch_a", "branch_b"})
    try:
        params = LambdaParams.from_mhz(
            omega_s_mhz=atom.req("omega_s_mhz"),
            omega_p_mhz=atom.req("omega_p_mhz"),
            delta_mhz=atom.req("delta_mhz"),
            delta_two_photon_mhz=0.0,
            gamma_e_mhz=atom.req("gamma_e_mhz"),
            gamma_ab_mhz=atom.req("gamma_ab_mhz"),
            od0=atom.req("od0"),
            branch_a=atom.opt("branch_a", 0.5),
            branch_b=atom.opt("branch_b", 0.5),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), key="atom") from exc

    ens = _Section("ensemble", doc["ensemble"],
                   {"n_atoms", "t_min_us", "t_max_us", "dt_ns"})
    ensemble = EnsembleSpec(
        n_atoms=ens.req("n_atoms", int),
        t_min=ens.opt("t_min_us", -1.0) * _US,
        t_max=ens.opt("t_max_us", 15.0) * _US,
        dt=ens.opt("dt_ns", 2.0) * _NS,
    )
    if ensemble.n_atoms < 0:
        raise ConfigError("must be >= 0", key="ensemble.n_atoms")
    if not ensemble.t_max > ensemble.t_min:
        raise ConfigError("t_max_us must exceed t_min_us", key="ensemble")
    if ensemble.dt <= 0:
        raise ConfigError("must be > 0", key="ensemble.dt_ns")

    chi = _Section("chirality", doc.get("chirality", {}), {
        "f_minus", "spin", "b_gauss", "tls_coefficient_mhz", "tuning"})
    spin_name = chi.opt("spin", "minus4", str)
    if spin_name not in _SPINS:
        raise ConfigError(f"must be one of {sorted(_SPINS)}, got {spin_name!r}",
                          key="chirality.spin")
    try:
        overlap = DirectionalOverlap(f_minus=chi.opt("f_minus", 0.92))
        env = FieldEnvironment(
            b_gauss=chi.opt("b_gauss", 0.0),
            tls_coefficient=chi.opt("tls_coefficient_mhz", 0.0) * MHZ)
    except ValueError as exc:
        raise ConfigError(str(exc), key="chirality") from exc
    tun = _Section("chirality.tuning", chi.opt("tuning", {}, dict),
                   {"reference", "offset_mhz"})
    reference = tun.opt("reference", "lambda_minus", str)
    if reference not in _TUNING_REFERENCES:
        raise ConfigError(f"must be one of {_TUNING_REFERENCES}, got {reference!r}",
                          key="chirality.tuning.reference")
    tuning = TuningSpec(reference=reference,
                        offset=tun.opt("offset_mhz", 0.0) * MHZ)

    run = _Section("run", doc["run"], {"mode", "window_us", "scan"})
    mode = run.req("mode", str)
    if mode not in _RUN_MODES:
        raise ConfigError(f"must be one of {_RUN_MODES}, got {mode!r}",
                          key="run.mode")
    window_raw = run.opt("window_us", [0.7, 1.2], list)
    if len(window_raw) != 2 or not all(isinstance(v, (int, float)) for v in window_raw):
        raise ConfigError("must be [t1_us, t2_us]", key="run.window_us")
    window = (float(window_raw[0]) * _US, float(window_raw[1]) * _US)
    if not window[1] > window[0]:
        raise ConfigError("window end must exceed start", key="run.window_us")

    scan = None
    if mode == "scan":
        if "scan" not in run.data:
            raise ConfigError("required for scan mode", key="run.scan")
        sc = _Section("run.scan", run.req("scan", dict),
                      {"delta_min_mhz", "delta_max_mhz", "n_points", "model"})
        model = sc.opt("model", "analytic", str)
        if model not in _SCAN_MODELS:
            raise ConfigError(f"must be one of {_SCAN_MODELS}, got {model!r}",
                              key="run.scan.model")
        scan = ScanSpec(delta_min=sc.req("delta_min_mhz") * MHZ,
                        delta_max=sc.req("delta_max_mhz") * MHZ,
                        n_points=sc.req("n_points", int),
                        model=model)
        if scan.n_points < 2:
            raise ConfigError("need at least 2 points", key="run.scan.n_points")
        if not scan.delta_max > scan.delta_min:
            raise ConfigError("delta_max_mhz must exceed delta_min_mhz",
                              key="run.scan")

    io = _Section("io", doc.get("io", {}), {"out_dir", "basename"})
    out_dir = Path(io.opt("out_dir", ".", str))
    basename = io.opt("basename", "run", str)

    return ScenarioConfig(atom=params, ensemble=ensemble,
                          spin=_SPINS[spin_name](), env=env, overlap=overlap,
                          tuning=tuning, mode=mode, window=window, scan=scan,
                          out_dir=out_dir, basename=basename, raw=doc)


def load_config(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario config (YAML, or a run-manifest JSON)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(_read_document(path))
