"""Result serialization: CSV payloads and the run manifest.

Float formatting is fixed to nine significant digits so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .params import MHZ, LambdaParams

_US = 1e-6


def fmt(x: float) -> str:
    return format(float(x), ".9g")


def _write_rows(path: Path, header: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell)
                              for cell in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_dynamics_csv(path: Path, t: np.ndarray, t12: np.ndarray,
                       t21: np.ndarray) -> Path:
    """Dynamics schema: t_us, T_12, T_21."""
    return _write_rows(path, ["t_us", "T_12", "T_21"],
                       zip(np.asarray(t) / _US, t12, t21))


def write_spectrum_csv(path: Path, delta_minus: np.ndarray, tss12: np.ndarray,
                       tss21: np.ndarray) -> Path:
    """Spectrum schema: delta_MHz (common axis), T_ss_12, T_ss_21."""
    return _write_rows(path, ["delta_MHz", "T_ss_12", "T_ss_21"],
                       zip(np.asarray(delta_minus) / MHZ, tss12, tss21))


def write_bars_csv(path: Path, label_columns: list[str], rows) -> Path:
    """Windowed-average schema: label columns followed by T_12, T_21."""
    return _write_rows(path, [*label_columns, "T_12", "T_21"], rows)


def params_to_mhz_dict(p: LambdaParams) -> dict:
    """Effective parameters in the config's boundary units."""
    return {
        "omega_s_mhz": p.omega_s / MHZ,
        "omega_p_mhz": p.omega_p / MHZ,
        "delta_mhz": p.delta / MHZ,
        "delta_two_photon_mhz": p.delta_two_photon / MHZ,
        "gamma_e_mhz": p.gamma_e / MHZ,
        "gamma_ab_mhz": p.gamma_ab / MHZ,
        "od0": p.od0,
        "branch_a": p.branch_a,
        "branch_b": p.branch_b,
    }


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def write_manifest(path: Path, manifest: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True,
                               default=float) + "\n")
    return path
