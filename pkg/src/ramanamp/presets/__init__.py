"""Preset library: named scenario pipelines mirroring the benchmark runs."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .. import __version__
from ..cascade import EnsembleConfig, make_time_grid, propagate, quasi_steady_average
from ..chirality import Direction, SpinPreparation
from ..config import ScenarioConfig, load_config, parse_config
from ..errors import ConfigError
from ..io import (params_to_mhz_dict, sha256_of, write_bars_csv,
                  write_dynamics_csv, write_manifest, write_spectrum_csv)
from ..params import MHZ
from ..scenario import Scenario
from ..spectroscopy import fit_spectrum, resonance_separation, scan_spectrum

PRESET_NAMES = ("fig2b-dynamics", "figS2-longtime", "fig2cd-bars", "fig3b-tls",
                "specscan-7G", "specscan-B0", "bidirectional")

_US = 1e-6


@dataclass(frozen=True)
class RunArtifact:
    """Output files plus the manifest describing how they were produced."""

    outputs: tuple[Path, ...]
    manifest: dict
    manifest_path: Path


def preset_config_path(name: str) -> Path:
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; known: {PRESET_NAMES}")
    return Path(str(resources.files(__package__) / f"{name}.yaml"))


def load_preset(name: str) -> ScenarioConfig:
    return load_config(preset_config_path(name))


def _time_grid(cfg: ScenarioConfig) -> np.ndarray:
    e = cfg.ensemble
    return make_time_grid(e.t_min, e.t_max, e.dt)


def _trace(scenario: Scenario, direction: Direction, t_grid, rho0=None):
    species = scenario.species(direction)
    kwargs = {} if rho0 is None else {"rho0": rho0}
    cfg = EnsembleConfig(n_atoms=scenario.n_atoms, t_grid=t_grid,
                         species=species, **kwargs)
    return propagate(cfg)


def _effective_block(scenario: Scenario) -> dict:
    out = {}
    for direction in Direction:
        out[direction.value] = [
            {"weight": w, **params_to_mhz_dict(p)}
            for w, p in scenario.species(direction)
        ]
    return out


def _finalize(out_dir: Path, cfg: ScenarioConfig, preset: str | None,
              outputs: list[Path], results: dict, effective: dict,
              t_start: float) -> RunArtifact:
    manifest = {
        "tool": "ramanamp",
        "version": __version__,
        "preset": preset,
        "config": cfg.raw,
        "effective_parameters": effective,
        "results": results,
        "outputs": [{"path": p.name, "sha256": sha256_of(p)} for p in outputs],
        "wall_time_s": time.time() - t_start,
    }
    mpath = write_manifest(out_dir / f"{cfg.basename}_manifest.json", manifest)
    return RunArtifact(outputs=tuple(outputs), manifest=manifest,
                       manifest_path=mpath)


def run_dynamics(cfg: ScenarioConfig, out_dir: Path,
                 preset: str | None = None) -> RunArtifact:
    """Propagate both directions and emit the dynamics CSV."""
    t0 = time.time()
    scenario = cfg.scenario()
    grid = _time_grid(cfg)
    fwd = _trace(scenario, Direction.FORWARD, grid)
    bwd = _trace(scenario, Direction.BACKWARD, grid)
    csv_path = write_dynamics_csv(out_dir / f"{cfg.basename}_dynamics.csv",
                                  grid, fwd.transmission, bwd.transmission)
    i = int(np.argmax(fwd.transmission))
    results = {
        "max_T_12": float(fwd.transmission[i]),
        "t_at_max_T_12_us": float(grid[i] / _US),
        "max_T_21": float(np.max(bwd.transmission)),
        "window_mean_T_12": quasi_steady_average(fwd, cfg.window),
        "window_mean_T_21": quasi_steady_average(bwd, cfg.window),
    }
    return _finalize(out_dir, cfg, preset, [csv_path], results,
                     _effective_block(scenario), t0)


def run_scan(cfg: ScenarioConfig, out_dir: Path, preset: str | None = None,
             model: str | None = None, direction_overrides: dict | None = None,
             ) -> RunArtifact:
    """Scan both directions over the configured two-photon range, fit each
    spectrum, and emit the spectrum CSV.

    ``direction_overrides`` optionally maps a Direction to per-direction
    scenario replacements (used by presets that probe different spin
    preparations or decoherence rates per direction).
    """
    t0 = time.time()
    if cfg.scan is None:
        raise ConfigError("scan settings required", key="run.scan")
    model = model or cfg.scan.model
    axis = np.linspace(cfg.scan.delta_min, cfg.scan.delta_max, cfg.scan.n_points)
    base_scenario = cfg.scenario()
    overrides = direction_overrides or {}

    spectra, fits, fit_summaries = {}, {}, {}
    for direction in Direction:
        scenario = overrides.get(direction, base_scenario)
        spec = scan_spectrum(scenario, direction, axis, cfg.window, model=model,
                             t_grid=_time_grid(cfg) if model == "cascade" else None)
        spectra[direction] = spec
        fit = fit_spectrum(spec, omega_p=scenario.base.omega_p,
                           gamma_e=scenario.base.gamma_e,
                           delta_guess=scenario.base.delta)
        fits[direction] = fit
        fit_summaries[direction.value] = {
            "gamma_ab_mhz": fit.gamma_ab / MHZ,
            "od": fit.od,
            "delta_mhz": fit.delta / MHZ,
            "resonance_location_mhz": fit.resonance_location / MHZ,
            "converged": fit.converged,
            "degenerate": fit.degenerate,
        }

    csv_path = write_spectrum_csv(
        out_dir / f"{cfg.basename}_spectrum.csv", axis,
        spectra[Direction.FORWARD].transmission,
        spectra[Direction.BACKWARD].transmission)
    sep, b_inferred = resonance_separation(fits[Direction.FORWARD],
                                           fits[Direction.BACKWARD])
    results = {
        "fits": fit_summaries,
        "resonance_separation_mhz": sep / MHZ,
        "inferred_b_gauss": b_inferred,
    }
    effective = {"base": _effective_block(base_scenario)}
    for direction, scenario in overrides.items():
        effective[f"override_{direction.value}"] = _effective_block(scenario)
    return _finalize(out_dir, cfg, preset, [csv_path], results, effective, t0)


def _run_fig2cd(cfg: ScenarioConfig, out_dir: Path, preset: str) -> RunArtifact:
    t0 = time.time()
    grid = _time_grid(cfg)
    base = cfg.scenario()
    rows, results, effective = [], {}, {}
    for ref_sign, ref_label in ((-1, "lambda_minus"), (+1, "lambda_plus")):
        for spin_label in ("minus4", "plus4"):
            prep = getattr(SpinPreparation, spin_label)()
            scenario = replace(base, spin=prep).tuned(ref_sign)
            tbar = {}
            for direction in Direction:
                tr = _trace(scenario, direction, grid)
                tbar[direction] = quasi_steady_average(tr, cfg.window)
            rows.append((ref_label, spin_label,
                         tbar[Direction.FORWARD], tbar[Direction.BACKWARD]))
            results[f"{ref_label}/{spin_label}"] = {
                "T_12": tbar[Direction.FORWARD], "T_21": tbar[Direction.BACKWARD]}
            effective[f"{ref_label}/{spin_label}"] = _effective_block(scenario)
    csv_path = write_bars_csv(out_dir / f"{cfg.basename}_bars.csv",
                              ["tuning", "spin"], rows)
    return _finalize(out_dir, cfg, preset, [csv_path], results, effective, t0)


def _run_fig3b(cfg: ScenarioConfig, out_dir: Path, preset: str) -> RunArtifact:
    t0 = time.time()
    grid = _time_grid(cfg)
    base = cfg.scenario()
    rows, results, effective = [], {}, {}
    for prep_label in ("mixture", "minus4", "plus4"):
        scenario = replace(base, spin=getattr(SpinPreparation, prep_label)())
        tbar = {}
        for direction in Direction:
            tr = _trace(scenario, direction, grid)
            tbar[direction] = quasi_steady_average(tr, cfg.window)
        rows.append((prep_label, tbar[Direction.FORWARD], tbar[Direction.BACKWARD]))
        results[prep_label] = {"T_12": tbar[Direction.FORWARD],
                               "T_21": tbar[Direction.BACKWARD]}
        effective[prep_label] = _effective_block(scenario)
    csv_path = write_bars_csv(out_dir / f"{cfg.basename}_bars.csv",
                              ["preparation"], rows)
    return _finalize(out_dir, cfg, preset, [csv_path], results, effective, t0)


def _specscan_7g_overrides(cfg: ScenarioConfig) -> dict:
    base = cfg.scenario()
    return {
        Direction.FORWARD: replace(base, spin=SpinPreparation.minus4()),
        Direction.BACKWARD: replace(base, spin=SpinPreparation.plus4()),
    }


def _specscan_b0_overrides(cfg: ScenarioConfig) -> dict:
    base = cfg.scenario()
    gamma_fwd, gamma_bwd = 3.4 * MHZ, 2.6 * MHZ
    return {
        Direction.FORWARD: replace(base, base=base.base.with_(gamma_ab=gamma_fwd)),
        Direction.BACKWARD: replace(base, base=base.base.with_(gamma_ab=gamma_bwd)),
    }


def run_preset(name: str, out_dir: str | Path = ".",
               scan_model: str | None = None) -> RunArtifact:
    """Execute a named preset pipeline; writes CSV(s) and a manifest."""
    out = Path(out_dir)
    cfg = load_preset(name)
    if name in ("fig2b-dynamics", "figS2-longtime", "bidirectional"):
        return run_dynamics(cfg, out, preset=name)
    if name == "fig2cd-bars":
        return _run_fig2cd(cfg, out, preset=name)
    if name == "fig3b-tls":
        return _run_fig3b(cfg, out, preset=name)
    if name == "specscan-7G":
        return run_scan(cfg, out, preset=name, model=scan_model,
                        direction_overrides=_specscan_7g_overrides(cfg))
    if name == "specscan-B0":
        return run_scan(cfg, out, preset=name, model=scan_model,
                        direction_overrides=_specscan_b0_overrides(cfg))
    raise ConfigError(f"unknown preset {name!r}")
