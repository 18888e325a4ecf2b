"""Quasi-steady-state transmission spectra and model fits.

Spectra are generated against the two-photon detuning, either from the
closed-form weak-probe susceptibility (fast, the default) or from full
cascade runs averaged over a quasi-steady window.  Fitting extracts the
ground-state decoherence rate, the total optical depth and the one-photon
detuning from a measured or synthetic spectrum.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .cascade import EnsembleConfig, make_time_grid, propagate, quasi_steady_average
from .chirality import Direction, infer_field_from_separation
from .errors import FitConvergenceError
from .params import MHZ, LambdaParams, pump_light_shift
from .response import chi_steady_analytic, transfer
from .scenario import Scenario


@dataclass(frozen=True)
class Spectrum:
    """Quasi-steady transmission versus two-photon detuning.

    ``delta`` is the two-photon detuning of the probed (dominant) species;
    ``axis_offset`` locates this local origin on the common reporting axis,
    so common-axis values are ``delta + axis_offset``.
    """

    delta: np.ndarray
    transmission: np.ndarray
    sigma: np.ndarray | None = None
    axis_offset: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=float)
        if d.ndim != 1 or len(d) < 2 or np.any(np.diff(d) <= 0):
            raise ValueError("detunings must be strictly increasing")
        if np.any(np.asarray(self.transmission) < 0):
            raise ValueError("transmission must be nonnegative")
        if self.sigma is not None and np.any(np.asarray(self.sigma) <= 0):
            raise ValueError("uncertainties must be positive")

    def __len__(self) -> int:
        return len(self.delta)


@dataclass(frozen=True)
class SpectrumFit:
    """Fitted decoherence rate, optical depth and one-photon detuning."""

    gamma_ab: float
    od: float
    delta: float
    resonance_location: float  # dip position + light shift, common axis
    covariance: np.ndarray     # 3x3, order (gamma_ab, od, delta)
    residual_norm: float
    converged: bool
    degenerate: bool
    message: str = ""

    def __post_init__(self):
        if self.gamma_ab < 0 or self.od < 0:
            raise ValueError("fitted rates must be nonnegative")
        c = np.asarray(self.covariance)
        if c.shape != (3, 3) or np.max(np.abs(c - c.T)) > 1e-6 * (1 + np.max(np.abs(c))):
            raise ValueError("covariance must be a symmetric 3x3 matrix")


def model_transmission(delta, gamma_ab: float, od: float, delta_one_photon: float,
                       omega_p: float, gamma_e: float) -> np.ndarray:
    """Steady-state transmission |exp(i od/2 chi)|^2 on the local axis."""
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    out = np.empty(len(delta))
    p = LambdaParams(omega_s=0.0, omega_p=omega_p, delta=delta_one_photon,
                     delta_two_photon=0.0, gamma_e=gamma_e, gamma_ab=gamma_ab,
                     od0=0.0)
    for i, d in enumerate(delta):
        chi = chi_steady_analytic(p.with_(delta_two_photon=d))
        out[i] = transfer(chi, od).transmission
    return out


def scan_spectrum(scenario: Scenario, direction: Direction,
                  delta_minus: np.ndarray, window: tuple[float, float],
                  model: str = "analytic",
                  t_grid: np.ndarray | None = None) -> Spectrum:
    """Quasi-steady transmission spectrum over the given common-axis values.

    ``model="analytic"`` evaluates the weak-probe steady state with the total
    optical depth n_atoms * od_eff; ``model="cascade"`` runs the full
    propagation for every point and averages T over ``window``.
    """
    delta_minus = np.asarray(delta_minus, dtype=float)
    if delta_minus.ndim != 1 or len(delta_minus) < 2:
        raise ValueError("need at least two scan points")
    if model not in ("analytic", "cascade"):
        raise ValueError(f"unknown spectrum model {model!r}")
    if model == "cascade" and t_grid is None:
        t_grid = make_time_grid(-0.5e-6, window[1] + 2e-6, 4e-9)

    t_ss = np.empty(len(delta_minus))
    for i, dm in enumerate(delta_minus):
        sc = scenario.with_delta_minus(dm)
        species = sc.species(direction)
        if model == "analytic":
            exponent = 0.0j
            for w, p in species:
                exponent += w * 0.5j * scenario.n_atoms * p.od0 * chi_steady_analytic(p)
            t_ss[i] = abs(np.exp(exponent)) ** 2
        else:
            cfg = EnsembleConfig(n_atoms=scenario.n_atoms, t_grid=t_grid,
                                 species=species)
            t_ss[i] = quasi_steady_average(propagate(cfg), window)

    # express the spectrum on the dominant species' own two-photon axis
    ref = scenario.with_delta_minus(delta_minus[0]).species(direction)
    i_dom = int(np.argmax([w * p.od0 for w, p in ref]))
    axis_offset = delta_minus[0] - ref[i_dom][1].delta_two_photon
    return Spectrum(delta=delta_minus - axis_offset, transmission=t_ss,
                    axis_offset=axis_offset)


def _guess_gamma_ab(delta: np.ndarray, t: np.ndarray) -> float:
    """Half-depth full width of the transmission dip."""
    i_min = int(np.argmin(t))
    baseline = np.median(np.concatenate([t[: max(2, len(t) // 10)],
                                         t[-max(2, len(t) // 10):]]))
    half = 0.5 * (baseline + t[i_min])
    below = np.nonzero(t <= half)[0]
    if len(below) < 2:
        return 0.05 * (delta[-1] - delta[0])
    return max(delta[below[-1]] - delta[below[0]], delta[1] - delta[0])


def _guess_od(t: np.ndarray) -> float:
    t_min = max(float(np.min(t)), 1e-12)
    return max(-np.log(t_min), 1e-3)


def fit_spectrum(s: Spectrum, omega_p: float, gamma_e: float,
                 delta_guess: float, gamma_ab_guess: float | None = None,
                 od_guess: float | None = None,
                 max_nfev: int = 2000) -> SpectrumFit:
    """Least-squares fit of the steady-state model to a spectrum.

    Free parameters: (gamma_ab, od, delta); the pump Rabi frequency and the
    excited-state decay rate are held fixed.  Weights are inverse-variance
    when the spectrum carries uncertainties, else uniform.  The reported
    resonance location is the fitted model's transmission minimum plus the
    pump light shift of the fitted one-photon detuning, mapped onto the
    spectrum's common axis; with this convention a dip at the dressed
    two-photon resonance reports a location of zero (plus the axis offset).
    """
    if len(s) < 5:
        raise ValueError("need at least 5 data points to fit 3 parameters")
    if not np.isfinite(delta_guess):
        raise ValueError("initial guess must be finite")
    delta = np.asarray(s.delta, dtype=float)
    data = np.asarray(s.transmission, dtype=float)
    w = 1.0 / np.asarray(s.sigma) if s.sigma is not None else np.ones_like(data)

    g0 = gamma_ab_guess if gamma_ab_guess is not None else _guess_gamma_ab(delta, data)
    od0 = od_guess if od_guess is not None else _guess_od(data)
    x0 = np.array([g0, od0, delta_guess])

    def residuals(x):
        return w * (model_transmission(delta, x[0], x[1], x[2], omega_p, gamma_e)
                    - data)

    # scales and generous detuning bounds keep the poorly identified
    # one-photon direction from running away on shallow spectra
    delta_cap = 50.0 * max(abs(delta_guess), 10 * MHZ)
    res = least_squares(residuals, x0,
                        bounds=([0.0, 0.0, -delta_cap], [np.inf, np.inf, delta_cap]),
                        method="trf", max_nfev=max_nfev,
                        x_scale=[MHZ, 1.0, 10 * MHZ])
    if not res.success:
        raise FitConvergenceError(
            f"fit did not converge: {res.message}", best_params=tuple(res.x))

    gamma_ab, od, delta_fit = res.x
    m, n = len(data), 3
    jtj = res.jac.T @ res.jac
    dof = max(m - n, 1)
    s2 = 2.0 * res.cost / dof
    degenerate = False
    try:
        # identifiability measured on unit-normalized parameter directions
        col = np.sqrt(np.diag(jtj))
        if np.any(col == 0) or np.any(~np.isfinite(col)):
            degenerate = True
            cond = np.inf
        else:
            cond = np.linalg.cond(jtj / np.outer(col, col))
            if not np.isfinite(cond) or cond > 1e8:
                degenerate = True
        cov = s2 * np.linalg.inv(jtj)
        cov = 0.5 * (cov + cov.T)
    except np.linalg.LinAlgError:
        degenerate = True
        cov = np.full((3, 3), np.inf)
        cov[~np.eye(3, dtype=bool)] = 0.0

    # locate the fitted model's dip: grid seed, then local refinement
    # (the dip can be far narrower than the scan range)
    def t_model(d):
        return model_transmission(np.array([d]), gamma_ab, od, delta_fit,
                                  omega_p, gamma_e)[0]

    model_on_grid = model_transmission(delta, gamma_ab, od, delta_fit,
                                       omega_p, gamma_e)
    i0 = int(np.argmin(model_on_grid))
    lo = delta[max(i0 - 1, 0)]
    hi = delta[min(i0 + 1, len(delta) - 1)]
    if hi > lo:
        opt = minimize_scalar(t_model, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-6 * max(abs(lo), abs(hi), 1.0)})
        dip = float(opt.x)
    else:
        dip = float(delta[i0])
    p_fit = LambdaParams(omega_s=0.0, omega_p=omega_p, delta=delta_fit,
                         delta_two_photon=0.0, gamma_e=gamma_e,
                         gamma_ab=gamma_ab, od0=0.0)
    location = s.axis_offset + dip + pump_light_shift(p_fit)
    return SpectrumFit(gamma_ab=float(gamma_ab), od=float(od),
                       delta=float(delta_fit), resonance_location=location,
                       covariance=cov, residual_norm=float(np.sqrt(2.0 * res.cost)),
                       converged=True, degenerate=degenerate,
                       message=str(res.message))


def resonance_separation(fit_a: SpectrumFit, fit_b: SpectrumFit,
                         ) -> tuple[float, float]:
    """Signed separation of two fitted resonances and the inferred field.

    Returns (location_b - location_a, field in gauss).
    """
    for f in (fit_a, fit_b):
        if not f.converged:
            raise FitConvergenceError("separation requires converged fits",
                                      best_params=(f.gamma_ab, f.od, f.delta))
    sep = fit_b.resonance_location - fit_a.resonance_location
    return sep, infer_field_from_separation(sep)


def load_spectrum_csv(path: str | Path) -> Spectrum:
    """Read a spectrum from CSV with columns delta_MHz, T[, sigma_T]."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        if "delta_MHz" not in cols or "T" not in cols:
            raise ValueError(f"{path}: expected columns delta_MHz, T"
                             f"[, sigma_T], got {cols}")
        delta, t, sig = [], [], []
        for row in reader:
            delta.append(float(row["delta_MHz"]) * MHZ)
            t.append(float(row["T"]))
            if "sigma_T" in cols and row.get("sigma_T") not in (None, ""):
                sig.append(float(row["sigma_T"]))
    sigma = np.array(sig) if len(sig) == len(t) and sig else None
    return Spectrum(delta=np.array(delta), transmission=np.array(t), sigma=sigma)
