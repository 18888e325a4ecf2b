"""Parameter set of one driven three-level Lambda atom and its derived scalars.

Level scheme: two ground states ``a`` and ``b`` coupled to one excited state
``e``.  The signal field drives a<->e, the pump field drives b<->e.  All
frequencies and rates are angular (rad/s) throughout the package; ordinary
frequencies in MHz appear only at the configuration boundary (``from_mhz``,
config files, CSV output).

Sign conventions: the one-photon pump detuning ``delta`` is stored signed
(red detuning negative).  The two-photon detuning ``delta_two_photon`` is the
detuning of the signal-pump frequency difference from the a<->b splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum

from .errors import AdiabaticEliminationError

TWO_PI = 2.0 * math.pi
MHZ = TWO_PI * 1e6  # ordinary MHz -> rad/s


class AtomState(IntEnum):
    """Basis indices of the three-level system.

    The mapping to physical Zeeman states is metadata: for the spin -4
    (spin +4) configuration, ``A`` is |F=3, mF=-3> (|F=3, mF=+3>), ``B`` is
    |F=4, mF=-4> (|F=4, mF=+4>) and ``E`` is |F'=4, mF'=-4> (|F'=4, mF'=+4>).
    """

    A = 0
    B = 1
    E = 2


ZEEMAN_LABELS = {
    -1: {AtomState.A: "6S1/2 F=3 mF=-3", AtomState.B: "6S1/2 F=4 mF=-4",
         AtomState.E: "6P3/2 F'=4 mF'=-4"},
    +1: {AtomState.A: "6S1/2 F=3 mF=+3", AtomState.B: "6S1/2 F=4 mF=+4",
         AtomState.E: "6P3/2 F'=4 mF'=+4"},
}


@dataclass(frozen=True)
class LambdaParams:
    """Full parameter set of one driven Lambda atom (angular units, rad/s).

    Attributes
    ----------
    omega_s : signal Rabi frequency on a<->e (>= 0; phases live on drives)
    omega_p : pump Rabi frequency on b<->e (>= 0)
    delta : one-photon pump detuning, signed
    delta_two_photon : two-photon detuning, signed
    gamma_e : excited-state population decay rate (> 0)
    gamma_ab : ground-state decoherence rate (>= 0)
    od0 : resonant single-atom optical depth on a->e at zero pump (>= 0)
    branch_a, branch_b : branching fractions of gamma_e into a and b
    """

    omega_s: float
    omega_p: float
    delta: float
    delta_two_photon: float
    gamma_e: float
    gamma_ab: float
    od0: float
    branch_a: float = 0.5
    branch_b: float = 0.5

    def __post_init__(self):
        if self.gamma_e <= 0:
            raise ValueError(f"gamma_e must be > 0, got {self.gamma_e}")
        if self.gamma_ab < 0:
            raise ValueError(f"gamma_ab must be >= 0, got {self.gamma_ab}")
        if self.od0 < 0:
            raise ValueError(f"od0 must be >= 0, got {self.od0}")
        if self.omega_s < 0 or self.omega_p < 0:
            raise ValueError("Rabi frequencies must be >= 0 "
                             f"(omega_s={self.omega_s}, omega_p={self.omega_p})")
        for name in ("branch_a", "branch_b"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.branch_a + self.branch_b - 1.0) > 1e-12:
            raise ValueError("branch_a + branch_b must equal 1, got "
                             f"{self.branch_a} + {self.branch_b}")

    @classmethod
    def from_mhz(cls, omega_s_mhz: float, omega_p_mhz: float, delta_mhz: float,
                 delta_two_photon_mhz: float, gamma_e_mhz: float,
                 gamma_ab_mhz: float, od0: float,
                 branch_a: float = 0.5, branch_b: float = 0.5) -> "LambdaParams":
        """Build from ordinary frequencies in MHz (factor 2*pi applied here)."""
        return cls(
            omega_s=omega_s_mhz * MHZ,
            omega_p=omega_p_mhz * MHZ,
            delta=delta_mhz * MHZ,
            delta_two_photon=delta_two_photon_mhz * MHZ,
            gamma_e=gamma_e_mhz * MHZ,
            gamma_ab=gamma_ab_mhz * MHZ,
            od0=od0,
            branch_a=branch_a,
            branch_b=branch_b,
        )

    def with_(self, **kwargs) -> "LambdaParams":
        """Copy with selected fields replaced."""
        return replace(self, **kwargs)


def two_photon_rabi(p: LambdaParams) -> float:
    """Resonant two-photon Rabi frequency omega_s * omega_p / (2 |delta|).

    Valid when the excited state can be adiabatically eliminated, i.e. the
    one-photon detuning dominates.  Returned as a magnitude.
    """
    if p.delta == 0.0:
        raise AdiabaticEliminationError(
            "two-photon Rabi frequency undefined at zero one-photon detuning "
            "(adiabatic elimination invalid)")
    return p.omega_s * p.omega_p / (2.0 * abs(p.delta))


def pump_light_shift(p: LambdaParams) -> float:
    """Pump-induced light shift [(omega_p^2 + delta^2)^1/2 - |delta|] / 2.

    Shift of the dressed two-photon resonance produced by the strong pump on
    b<->e; equals the dressed-state eigenvalue shift of the pump-coupled pair
    and tends to omega_p^2 / (4 |delta|) for weak pumping.  Always >= 0.
    """
    return 0.5 * (math.hypot(p.omega_p, p.delta) - abs(p.delta))
