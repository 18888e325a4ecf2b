"""Single-atom Lindblad dynamics: generator, time evolution, steady state.

Conventions, pinned by requiring (i) the weak-probe steady state to reproduce
the closed-form susceptibility of :func:`ramanamp.response.chi_steady_analytic`
over a scan of detunings, pump strengths and decoherence rates, and (ii) the
transient gain dynamics to reproduce the transfer-chain benchmarks:

    H/hbar = delta_2p |b><b| + Delta |e><e|
             + [ (omega_s(t)/2) |e><a| + (omega_p(t)/2) |e><b| + h.c. ]

with both detunings signed as stored in :class:`LambdaParams` (the placement
puts the signal's optical coherence at detuning Delta and the ground
coherence at delta_2p, which is the frame in which the closed-form
susceptibility is exact).  Dissipators: decay e->a at branch_a*gamma_e and
e->b at branch_b*gamma_e, plus pure ground-state dephasing with Lindblad
operator sqrt(gamma_ab)|b><b|, under which the ground coherence rho_ab
decays at gamma_ab/2 -- the same full-rate bookkeeping as gamma_e, whose
optical coherences decay at gamma_e/2, and the unique diagonal-dephasing
calibration under which the closed-form susceptibility is reproduced with
the rates taken verbatim.  The dephasing models off-resonant scattering of
the pump and is gated off while the pump is off (it acts on no scenario
before pump turn-on, where the state is diagonal, but the gate keeps the
generator faithful for pump-free sanity cases).

Susceptibilities are ratios of rho_ae to the coupling matrix element
omega_s/2, normalized so a bare resonant absorber has chi = i (see
:mod:`ramanamp.response`); the kernels hand back rho_ae and callers divide
by the coupling they drove with.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from . import _kernels
from .errors import DegenerateSteadyStateError, IntegrationError
from .params import LambdaParams

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10

TRACE_TOL = 1e-9
HERMITICITY_TOL = 1e-12
POSITIVITY_FLOOR = -1e-9


@dataclass(frozen=True)
class DriveSample:
    """Instantaneous complex drive amplitudes (rad/s)."""

    omega_s: complex
    omega_p: complex


@dataclass(frozen=True)
class ConstantDrive:
    """Time-independent drive pair."""

    omega_s: complex
    omega_p: complex

    def sample(self, t: float) -> DriveSample:
        return DriveSample(self.omega_s, self.omega_p)


@dataclass(frozen=True)
class PumpTurnOnDrive:
    """Constant signal; pump switches on at ``t_on`` (exact step)."""

    omega_s: complex
    omega_p: complex
    t_on: float = 0.0

    def sample(self, t: float) -> DriveSample:
        return DriveSample(self.omega_s, self.omega_p if t >= self.t_on else 0.0)


@dataclass(frozen=True)
class SampledSignalDrive:
    """Signal sampled on the evolution grid (linear interpolation between
    samples); pump constant with optional turn-on."""

    omega_s: np.ndarray  # complex, one value per grid point
    omega_p: complex
    t_on: float = -np.inf

    def sample_at_index(self, i: int, t: float) -> DriveSample:
        return DriveSample(self.omega_s[i],
                           self.omega_p if t >= self.t_on else 0.0)


Drive = ConstantDrive | PumpTurnOnDrive | SampledSignalDrive


@dataclass(frozen=True)
class EvolutionResult:
    """Sampled evolution: state and a<->e coherence on the time grid."""

    t: np.ndarray
    rho: np.ndarray      # (n, 3, 3) complex
    rho_ae: np.ndarray   # (n,) complex

    def __post_init__(self):
        if len(self.t) == 0:
            raise ValueError("time grid must be nonempty")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if self.rho.shape[0] != self.t.shape[0]:
            raise ValueError("one state sample required per grid point")


def hamiltonian(p: LambdaParams, d: DriveSample) -> np.ndarray:
    """Rotating-frame Hamiltonian matrix (rad/s) in the (a, b, e) basis."""
    lam_s = complex(d.omega_s) / 2.0
    lam_p = complex(d.omega_p) / 2.0
    return np.array([
        [0.0, 0.0, np.conj(lam_s)],
        [0.0, p.delta_two_photon, np.conj(lam_p)],
        [lam_s, lam_p, p.delta],
    ], dtype=complex)


def scattering_channels(p: LambdaParams) -> tuple[float, float]:
    """(dephasing rate, b->a transfer rate) of the ground-state decoherence.

    Pure dephasing: the full rate gamma_ab sits on the |b><b| projector and
    the transfer channel is unused.  (The kernels support a b->a transfer
    component for sensitivity studies of the unspecified scattering channel;
    any split with g_deph + g_pop = gamma_ab leaves the weak-probe
    susceptibility unchanged.)
    """
    return p.gamma_ab, 0.0


def collapse_operators(p: LambdaParams, pump_on: bool = True) -> list[np.ndarray]:
    """Lindblad operators: branched decay of e plus, while the pump drives
    the atom, the ground-state dephasing."""
    ket = np.eye(3, dtype=complex)
    ops = []
    if p.branch_a > 0:
        ops.append(np.sqrt(p.branch_a * p.gamma_e) * np.outer(ket[0], ket[2]))
    if p.branch_b > 0:
        ops.append(np.sqrt(p.branch_b * p.gamma_e) * np.outer(ket[1], ket[2]))
    if pump_on and p.gamma_ab > 0:
        g_deph, g_pop = scattering_channels(p)
        if g_deph > 0:
            ops.append(np.sqrt(g_deph) * np.diag([0.0, 1.0, 0.0]).astype(complex))
        if g_pop > 0:
            ops.append(np.sqrt(g_pop) * np.outer(ket[0], ket[1]))
    return ops


def build_liouvillian(p: LambdaParams, d: DriveSample) -> np.ndarray:
    """Generator L (9x9, row-major vectorization) with d rho/dt = L vec(rho)."""
    H = hamiltonian(p, d)
    eye = np.eye(3, dtype=complex)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for c in collapse_operators(p, pump_on=(d.omega_p != 0)):
        cdc = c.conj().T @ c
        L += (np.kron(c, c.conj())
              - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T)))
    return L


def master_rhs(p: LambdaParams, d: DriveSample, rho: np.ndarray) -> np.ndarray:
    """d rho/dt for a 3x3 state (reference path through the generator)."""
    return (build_liouvillian(p, d) @ rho.reshape(9)).reshape(3, 3)


def validate_density_matrix(rho: np.ndarray,
                            trace_tol: float = TRACE_TOL,
                            herm_tol: float = HERMITICITY_TOL,
                            positivity_floor: float = POSITIVITY_FLOOR) -> None:
    """Check Hermiticity, unit trace and positivity; raise ValueError if not."""
    if rho.shape != (3, 3):
        raise ValueError(f"density matrix must be 3x3, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"state not Hermitian: max|rho - rho^+| = {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"state trace {tr!r} deviates from 1")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.min() < positivity_floor:
        raise ValueError(f"state not positive: min eigenvalue {w.min():.3e}")


def _kernel_drive_args(drive: Drive, t_grid: np.ndarray):
    # kernels work with coupling matrix elements omega/2
    if isinstance(drive, ConstantDrive):
        os_arr = np.array([drive.omega_s / 2.0], dtype=complex)
        lp = complex(drive.omega_p) / 2.0
        return os_arr, lp, lp, -np.inf
    if isinstance(drive, PumpTurnOnDrive):
        os_arr = np.array([drive.omega_s / 2.0], dtype=complex)
        return os_arr, 0.0j, complex(drive.omega_p) / 2.0, drive.t_on
    if isinstance(drive, SampledSignalDrive):
        os_arr = np.asarray(drive.omega_s, dtype=complex) / 2.0
        if os_arr.shape != t_grid.shape:
            raise ValueError("sampled signal drive must match the time grid")
        lp = complex(drive.omega_p) / 2.0
        if np.isfinite(drive.t_on):
            return os_arr, 0.0j, lp, drive.t_on
        return os_arr, lp, lp, -np.inf
    raise TypeError(f"unsupported drive type {type(drive).__name__}")


def evolve(p: LambdaParams, drive: Drive, rho0: np.ndarray, t_grid: np.ndarray,
           rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
           method: str = "adaptive", n_sub: int = 1) -> EvolutionResult:
    """Evolve rho0 under the master equation, sampled on t_grid.

    ``method`` is "adaptive" (embedded RK 5(4) pair with dense output, the
    default) or "fixed" (classical RK4 with ``n_sub`` substeps per grid
    interval, provided for cross-checks against grid-bound propagators).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if len(t_grid) > 1 and np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    rho0 = np.asarray(rho0, dtype=complex)
    validate_density_matrix(rho0)

    os_arr, lp_before, lp_after, t_on = _kernel_drive_args(drive, t_grid)
    g_deph, g_pop = scattering_channels(p)
    out = np.empty((len(t_grid), 9), dtype=complex)
    y0 = rho0.reshape(9).copy()
    if method == "adaptive":
        status, t_fail = _kernels.integrate_adaptive(
            t_grid, os_arr, lp_before, lp_after, t_on,
            p.delta_two_photon, p.delta, p.gamma_e, g_deph, g_pop, p.branch_a,
            y0, rtol, atol, out)
    elif method == "fixed":
        status, t_fail = _kernels.integrate_fixed_rk4(
            t_grid, os_arr, lp_before, lp_after, t_on,
            p.delta_two_photon, p.delta, p.gamma_e, g_deph, g_pop, p.branch_a,
            y0, n_sub, out)
    else:
        raise ValueError(f"unknown method {method!r}")
    if status == _kernels.STATUS_STEP_UNDERFLOW:
        raise IntegrationError("step size underflow", t_fail)
    if status != _kernels.STATUS_OK:
        raise IntegrationError("step budget exhausted", t_fail)
    rho = out.reshape(len(t_grid), 3, 3)
    return EvolutionResult(t=t_grid, rho=rho, rho_ae=rho[:, 0, 2].copy())


def steady_state(p: LambdaParams, d: DriveSample | ConstantDrive,
                 null_tol: float = 1e-10) -> np.ndarray:
    """Stationary state of the generator via null-space extraction.

    Raises :class:`DegenerateSteadyStateError` unless the kernel of the
    vectorized generator is one-dimensional.
    """
    if isinstance(d, ConstantDrive):
        d = DriveSample(d.omega_s, d.omega_p)
    L = build_liouvillian(p, d)
    scale = np.max(np.abs(L))
    if scale == 0.0:
        raise DegenerateSteadyStateError("generator vanishes; no unique steady state")
    ns = null_space(L, rcond=null_tol)
    if ns.shape[1] != 1:
        raise DegenerateSteadyStateError(
            f"generator kernel is {ns.shape[1]}-dimensional; steady state not unique")
    rho = ns[:, 0].reshape(3, 3)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise DegenerateSteadyStateError("null vector is traceless")
    rho = rho / tr  # fixes the arbitrary complex phase of the null vector
    rho = 0.5 * (rho + rho.conj().T)
    validate_density_matrix(rho, trace_tol=1e-9, herm_tol=1e-9)
    return rho
