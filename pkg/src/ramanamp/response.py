"""Optical response: susceptibility, per-atom transfer function, transmission.

The dimensionless susceptibility is normalized so that a bare resonant
two-level absorber has chi = i, which makes the single-pass power
transmission of one atom T = exp(-od0) on resonance.  Gain corresponds to
Im(chi) < 0.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import DegenerateDriveError, SingularParameterError
from .params import LambdaParams


@dataclass(frozen=True)
class TransferSample:
    """Complex amplitude transfer of one atom and its power transmission."""

    h: complex
    transmission: float


def chi_from_rho(rho_ae: complex, omega_s: complex, gamma_e: float,
                 eps_drive: float = 0.0) -> complex:
    """Susceptibility gamma_e * rho_ae / (2 * omega_s) from the a-e coherence.

    ``omega_s`` is the instantaneous complex drive amplitude at the atom; in a
    cascade it carries the accumulated phase of all upstream transfers.
    """
    if abs(omega_s) <= eps_drive or omega_s == 0:
        raise DegenerateDriveError(
            f"signal drive {omega_s!r} below regularization threshold")
    return gamma_e * rho_ae / (2.0 * omega_s)


def chi_steady_analytic(p: LambdaParams) -> complex:
    """Closed-form weak-probe steady-state susceptibility.

    Atoms pumped into |a>, strong pump on b<->e, weak signal probing a<->e.
    Evaluated with the signed detunings stored in ``p``; delta is the
    two-photon detuning of this atom's Lambda system.  The transparency point
    sits at exact two-photon resonance; the absorption resonance is displaced
    by the pump light shift.
    """
    delta = p.delta_two_photon
    den_c = p.omega_p**2 + (p.gamma_e + 2j * p.delta) * (p.gamma_ab + 2j * delta)
    den = abs(den_c) ** 2
    if den == 0.0:
        raise SingularParameterError(
            "susceptibility denominator vanishes for these parameters")
    re = 4 * delta * (p.omega_p**2 - 4 * delta * p.delta) - 4 * p.delta * p.gamma_ab**2
    im = 8 * delta**2 * p.gamma_e + 2 * p.gamma_ab * (p.omega_p**2 + p.gamma_ab * p.gamma_e)
    return (p.gamma_e / 2.0) * (re + 1j * im) / den


def transfer(chi: complex, od: float) -> TransferSample:
    """Single-atom transfer h = exp(i od/2 chi); transmission |h|^2.

    For od >= 0, T > 1 exactly when Im(chi) < 0 (gain); Re(chi) only rotates
    the phase of h.
    """
    if od < 0:
        raise ValueError(f"optical depth must be >= 0, got {od}")
    h = cmath.exp(0.5j * od * chi)
    return TransferSample(h=h, transmission=abs(h) ** 2)
