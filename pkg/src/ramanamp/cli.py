"""Command-line driver.

Subcommands: ``simulate`` (dynamics, both directions), ``scan`` (spectrum
versus two-photon detuning), ``fit`` (model fit of a spectrum CSV), and
``preset`` (named pipelines).  Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, ModelError
from .io import write_manifest
from .params import MHZ
from .presets import PRESET_NAMES, run_dynamics, run_preset, run_scan
from .spectroscopy import fit_spectrum, load_spectrum_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramanamp",
        description="Direction-dependent Raman amplification simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="propagate both directions in time")
    sim.add_argument("--config", required=True, help="scenario config "
                     "(YAML, or a run-manifest JSON)")
    sim.add_argument("--out", default=None, help="output directory")

    scan = sub.add_parser("scan", help="quasi-steady spectrum vs two-photon detuning")
    scan.add_argument("--config", required=True)
    scan.add_argument("--out", default=None)
    scan.add_argument("--mode", choices=("analytic", "cascade"), default=None,
                      help="override the scan model")

    fit = sub.add_parser("fit", help="fit the steady-state model to a spectrum CSV")
    fit.add_argument("--config", required=True,
                     help="config supplying the fixed pump/decay parameters")
    fit.add_argument("--data", required=True, help="CSV: delta_MHz, T[, sigma_T]")
    fit.add_argument("--out", default=None)

    pre = sub.add_parser("preset", help="run a named pipeline")
    pre.add_argument("name", choices=PRESET_NAMES)
    pre.add_argument("--out", default=".")
    pre.add_argument("--mode", choices=("analytic", "cascade"), default=None,
                     help="override the scan model of scan presets")
    return parser


def _out_dir(args, cfg) -> Path:
    return Path(args.out) if args.out is not None else cfg.out_dir


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if cfg.mode not in ("dynamics", "bidirectional"):
        raise ConfigError(f"simulate requires mode dynamics|bidirectional, "
                          f"got {cfg.mode!r}", key="run.mode")
    artifact = run_dynamics(cfg, _out_dir(args, cfg))
    for p in artifact.outputs:
        print(p)
    print(artifact.manifest_path)
    return EXIT_OK


def _cmd_scan(args) -> int:
    cfg = load_config(args.config)
    if cfg.mode != "scan":
        raise ConfigError(f"scan requires mode scan, got {cfg.mode!r}",
                          key="run.mode")
    artifact = run_scan(cfg, _out_dir(args, cfg), model=args.mode)
    for p in artifact.outputs:
        print(p)
    print(artifact.manifest_path)
    return EXIT_OK


def _cmd_fit(args) -> int:
    cfg = load_config(args.config)
    spectrum = load_spectrum_csv(args.data)
    fit = fit_spectrum(spectrum, omega_p=cfg.atom.omega_p,
                       gamma_e=cfg.atom.gamma_e, delta_guess=cfg.atom.delta)
    out = {
        "data": str(args.data),
        "gamma_ab_mhz": fit.gamma_ab / MHZ,
        "od": fit.od,
        "delta_mhz": fit.delta / MHZ,
        "resonance_location_mhz": fit.resonance_location / MHZ,
        "residual_norm": fit.residual_norm,
        "converged": fit.converged,
        "degenerate": fit.degenerate,
        "covariance": fit.covariance.tolist(),
    }
    out_dir = _out_dir(args, cfg)
    path = write_manifest(out_dir / f"{cfg.basename}_fit.json", out)
    print(json.dumps({k: out[k] for k in
                      ("gamma_ab_mhz", "od", "delta_mhz",
                       "resonance_location_mhz", "converged", "degenerate")},
                     indent=2, sort_keys=True))
    print(path)
    return EXIT_OK


def _cmd_preset(args) -> int:
    artifact = run_preset(args.name, args.out, scan_model=args.mode)
    for p in artifact.outputs:
        print(p)
    print(artifact.manifest_path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"simulate": _cmd_simulate, "scan": _cmd_scan,
                "fit": _cmd_fit, "preset": _cmd_preset}
    try:
        return handlers[args.command](args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
