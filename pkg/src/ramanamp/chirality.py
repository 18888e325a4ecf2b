"""Direction-, spin- and field-dependent coupling of atoms to the guided mode.

The guided signal mode has direction-locked local polarization: propagating
1->2 its intensity overlap with sigma- (sigma+) polarization at the atoms is
f_minus (1 - f_minus); the overlaps interchange for 2->1.  Atoms prepared in
the stretched state m_F = -4 (+4) couple to the signal through their sigma-
(sigma+) transition only, so the coupled intensity fraction f depends on both
the spin and the propagation direction.  The Rabi frequency scales as sqrt(f)
and the single-atom optical depth scales as f.

A magnetic field along +z splits the two-photon resonances of the two mirror
Lambda systems; a tensor light shift proportional to m_F^2 shifts both
equally and leaves them degenerate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .params import TWO_PI, LambdaParams

# Bohr magneton over Planck constant; standard value, MHz per gauss.
MU_B_OVER_H_MHZ_PER_GAUSS = 1.399624
# |g_F=4 * (+-4) - g_F=3 * (+-3)| doubles between the two mirror systems:
# g factors +-1/4 give a resonance separation of 3.5 * (mu_B/h) * B.
ZEEMAN_SEPARATION_FACTOR = 3.5
# TLS acts on the F=4 manifold; b is a stretched m_F = +-4 state.
_M_F_B_SQUARED = 16.0
_M_F_STRETCHED_SQ = 16.0
_M_F_NEIGHBOR_SQ = 9.0


class Direction(enum.Enum):
    """Signal propagation direction through the waveguide."""

    FORWARD = "1->2"
    BACKWARD = "2->1"

    @property
    def reverse(self) -> "Direction":
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


@dataclass(frozen=True)
class DirectionalOverlap:
    """Intensity overlap fractions of the guided signal with sigma-+ light.

    ``f_minus`` is the sigma- fraction for 1->2 propagation (default 0.92);
    the sigma+ fraction is its complement, and both swap under direction
    reversal.
    """

    f_minus: float = 0.92

    def __post_init__(self):
        if not 0.0 <= self.f_minus <= 1.0:
            raise ValueError(f"f_minus must lie in [0, 1], got {self.f_minus}")

    @property
    def f_plus(self) -> float:
        return 1.0 - self.f_minus

    def fraction(self, spin_sign: int, direction: Direction) -> float:
        """Coupled intensity fraction for atoms of the given spin sign.

        Spin -4 atoms couple through sigma-, spin +4 through sigma+.
        """
        sigma_minus = self.f_minus if direction is Direction.FORWARD else self.f_plus
        return sigma_minus if spin_sign < 0 else 1.0 - sigma_minus


@dataclass(frozen=True)
class SpinPreparation:
    """Statistical weights of the two stretched-state preparations."""

    weight_minus: float
    weight_plus: float

    def __post_init__(self):
        if self.weight_minus < 0 or self.weight_plus < 0:
            raise ValueError("spin weights must be >= 0")
        if abs(self.weight_minus + self.weight_plus - 1.0) > 1e-12:
            raise ValueError("spin weights must sum to 1, got "
                             f"{self.weight_minus} + {self.weight_plus}")

    @classmethod
    def minus4(cls) -> "SpinPreparation":
        return cls(1.0, 0.0)

    @classmethod
    def plus4(cls) -> "SpinPreparation":
        return cls(0.0, 1.0)

    @classmethod
    def mixture(cls) -> "SpinPreparation":
        return cls(0.5, 0.5)

    def species(self) -> list[tuple[int, float]]:
        """(spin sign, weight) for each populated species, minus first."""
        out = []
        if self.weight_minus > 0:
            out.append((-1, self.weight_minus))
        if self.weight_plus > 0:
            out.append((+1, self.weight_plus))
        return out


@dataclass(frozen=True)
class FieldEnvironment:
    """Magnetic field along +z and tensor-light-shift curvature.

    ``tls_coefficient`` is the curvature C of the m_F^2-proportional shift
    (rad/s per unit m_F^2), applied to the F=4 ground manifold only.
    """

    b_gauss: float = 0.0
    tls_coefficient: float = 0.0

    def __post_init__(self):
        if self.b_gauss < 0:
            raise ValueError(f"b_gauss must be >= 0, got {self.b_gauss}")
        if self.tls_coefficient < 0:
            raise ValueError(
                f"tls_coefficient must be >= 0, got {self.tls_coefficient}")


def zeeman_two_photon_separation(b_gauss: float) -> float:
    """Separation (rad/s) of the mirror two-photon resonances at field B.

    Linear in B: 2*pi x 3.5 x 1.399624 MHz/G x B, from the ground-state g
    factors +-1/4 acting on the stretched states (m = +-4, +-3).
    """
    if b_gauss < 0:
        raise ValueError(f"b_gauss must be >= 0, got {b_gauss}")
    return TWO_PI * ZEEMAN_SEPARATION_FACTOR * MU_B_OVER_H_MHZ_PER_GAUSS * 1e6 * b_gauss


def infer_field_from_separation(separation: float) -> float:
    """Inverse of :func:`zeeman_two_photon_separation`; returns gauss."""
    return abs(separation) / (
        TWO_PI * ZEEMAN_SEPARATION_FACTOR * MU_B_OVER_H_MHZ_PER_GAUSS * 1e6)


def tls_differential_shift(tls_coefficient: float) -> float:
    """Differential shift C*(16 - 9) between m_F = +-4 and m_F = +-3.

    This is the barrier stabilizing the stretched states; it is identical for
    both spin signs because the shift is proportional to m_F^2.
    """
    if tls_coefficient < 0:
        raise ValueError("tls_coefficient must be >= 0")
    return (_M_F_STRETCHED_SQ - _M_F_NEIGHBOR_SQ) * tls_coefficient


def species_two_photon_detuning(signal_detuning_offset: float, spin_sign: int,
                                env: FieldEnvironment) -> float:
    """Effective two-photon detuning of the spin_sign species.

    ``signal_detuning_offset`` is the laser-difference knob referenced to the
    zero-field, zero-TLS resonance.  The Zeeman term moves the two mirror
    systems apart symmetrically; the TLS term shifts both alike (m_F^2
    symmetry) and therefore cancels in their difference.
    """
    sep = zeeman_two_photon_separation(env.b_gauss)
    return (signal_detuning_offset - spin_sign * 0.5 * sep
            - _M_F_B_SQUARED * env.tls_coefficient)


def delta_minus_axis(signal_detuning_offset: float, env: FieldEnvironment) -> float:
    """Two-photon detuning on the Lambda-minus reference axis.

    Spectra are reported against the spin -4 system's two-photon detuning;
    this converts the bare laser knob to that axis.
    """
    return species_two_photon_detuning(signal_detuning_offset, -1, env)


def offset_from_delta_minus(delta_minus: float, env: FieldEnvironment) -> float:
    """Inverse of :func:`delta_minus_axis`."""
    sep = zeeman_two_photon_separation(env.b_gauss)
    return delta_minus - 0.5 * sep + _M_F_B_SQUARED * env.tls_coefficient


def resolve_scenario(spin: SpinPreparation, direction: Direction,
                     env: FieldEnvironment, base: LambdaParams,
                     overlap: DirectionalOverlap,
                     signal_detuning_offset: float,
                     ) -> list[tuple[float, LambdaParams]]:
    """Resolve a physical scenario into weighted effective atom parameters.

    For each populated spin species: the signal Rabi frequency scales with
    the square root of the coupled intensity fraction, the single-atom
    optical depth scales linearly with it, and the two-photon detuning
    acquires the species' Zeeman and TLS shifts.  The pump is a free-space
    field and couples identically in both directions.
    """
    out = []
    for spin_sign, weight in spin.species():
        f = overlap.fraction(spin_sign, direction)
        eff = base.with_(
            omega_s=base.omega_s * math.sqrt(f),
            od0=base.od0 * f,
            delta_two_photon=species_two_photon_detuning(
                signal_detuning_offset, spin_sign, env),
        )
        out.append((weight, eff))
    return out
