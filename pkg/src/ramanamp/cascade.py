"""Signal propagation through the atom array.

Each atom is driven by the launched field multiplied by the accumulated
complex transfer of all upstream atoms; its own transfer follows from the
instantaneous a<->e coherence.  Evaluation is necessarily sequential in the
atom index.  A site may carry several weighted spin species (statistical
mixtures): all species at a site see the same local field, and the site
transfer is the weight-exponentiated product of the species transfers, which
is the homogenized limit of a randomly interleaved array and keeps the
propagation exactly invariant under relabeling of equally weighted species.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import CascadeError
from .lindblad import (DEFAULT_ATOL, DEFAULT_RTOL, scattering_channels,
                       validate_density_matrix)
from .params import LambdaParams

EPS_DRIVE_REL = 1e-12


def make_time_grid(t_min: float, t_max: float, dt: float) -> np.ndarray:
    """Uniform grid over [t_min, t_max] with step dt (seconds)."""
    if not (t_max > t_min and dt > 0):
        raise ValueError("need t_max > t_min and dt > 0")
    n = int(round((t_max - t_min) / dt)) + 1
    return t_min + dt * np.arange(n)


def _default_rho0() -> np.ndarray:
    rho = np.zeros((3, 3), dtype=complex)
    rho[1, 1] = 1.0  # all population in |b>
    return rho


@dataclass(frozen=True)
class EnsembleConfig:
    """Resolved configuration of one directional propagation run.

    ``species`` holds the weighted effective parameters of the site (one
    entry for pure spin preparations).  The pump switches on at ``t_pump_on``;
    the launched signal is constant in time.
    """

    n_atoms: int
    t_grid: np.ndarray
    species: list[tuple[float, LambdaParams]]
    rho0: np.ndarray = field(default_factory=_default_rho0)
    t_pump_on: float = 0.0
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL

    def __post_init__(self):
        if self.n_atoms < 0:
            raise ValueError(f"n_atoms must be >= 0, got {self.n_atoms}")
        t = np.asarray(self.t_grid, dtype=float)
        if t.ndim != 1 or len(t) < 2 or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must be strictly increasing with >= 2 points")
        if not self.species:
            raise ValueError("species list must be nonempty")
        w = sum(wt for wt, _ in self.species)
        if abs(w - 1.0) > 1e-9:
            raise ValueError(f"species weights must sum to 1, got {w}")
        validate_density_matrix(np.asarray(self.rho0, dtype=complex))


@dataclass(frozen=True)
class TransmissionTrace:
    """Power transmission and output field factor on the shared grid."""

    t: np.ndarray
    transmission: np.ndarray
    field: np.ndarray  # cumulative complex amplitude factor (launch = 1)

    def __post_init__(self):
        if np.any(self.transmission < 0):
            raise ValueError("transmission must be nonnegative")


def propagate(cfg: EnsembleConfig) -> TransmissionTrace:
    """Run the cascade; returns T(t) = |prod_k h_k(t)|^2 at the output."""
    t_grid = np.asarray(cfg.t_grid, dtype=float)
    weights = np.array([w for w, _ in cfg.species], dtype=float)
    # kernels work with coupling matrix elements omega/2
    lam_s = np.array([p.omega_s / 2.0 for _, p in cfg.species], dtype=float)
    od = np.array([p.od0 for _, p in cfg.species], dtype=float)
    d_b = np.array([p.delta_two_photon for _, p in cfg.species], dtype=float)
    d_e = np.array([p.delta for _, p in cfg.species], dtype=float)
    lam_p = np.array([p.omega_p / 2.0 for _, p in cfg.species], dtype=complex)
    g_e = np.array([p.gamma_e for _, p in cfg.species], dtype=float)
    channels = [scattering_channels(p) for _, p in cfg.species]
    g_deph = np.array([c[0] for c in channels], dtype=float)
    g_pop = np.array([c[1] for c in channels], dtype=float)
    b_a = np.array([p.branch_a for _, p in cfg.species], dtype=float)

    if cfg.n_atoms == 0:
        ones = np.ones(len(t_grid))
        return TransmissionTrace(t=t_grid, transmission=ones,
                                 field=ones.astype(complex))

    y0 = np.asarray(cfg.rho0, dtype=complex).reshape(9).copy()
    status, atom, cum = _kernels.cascade_kernel(
        t_grid, weights, lam_s, od, d_b, d_e, lam_p, g_e, g_deph, g_pop, b_a,
        cfg.t_pump_on, cfg.n_atoms, y0, cfg.rtol, cfg.atol, EPS_DRIVE_REL)
    if status == _kernels.STATUS_STEP_UNDERFLOW:
        raise CascadeError("integrator step underflow", atom)
    if status != _kernels.STATUS_OK:
        raise CascadeError("integrator step budget exhausted", atom)
    return TransmissionTrace(t=t_grid, transmission=np.abs(cum) ** 2, field=cum)


def quasi_steady_average(trace: TransmissionTrace,
                         window: tuple[float, float]) -> float:
    """Arithmetic mean of T over grid samples inside [t1, t2]."""
    t1, t2 = window
    if not t2 > t1:
        raise ValueError(f"window must satisfy t2 > t1, got {window}")
    if t1 < trace.t[0] or t2 > trace.t[-1]:
        raise ValueError("window must lie within the trace span")
    mask = (trace.t >= t1) & (trace.t <= t2)
    if not mask.any():
        raise ValueError("window contains no grid samples")
    return float(trace.transmission[mask].mean())
