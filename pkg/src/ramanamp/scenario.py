"""Bundled physical scenario: atom parameters plus chirality context.

A scenario fixes everything except the propagation direction; resolving it
for a direction yields the weighted effective parameters the cascade and the
spectrum scan consume.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .chirality import (Direction, DirectionalOverlap, FieldEnvironment,
                        SpinPreparation, offset_from_delta_minus,
                        resolve_scenario, species_two_photon_detuning,
                        zeeman_two_photon_separation)
from .params import LambdaParams, pump_light_shift


@dataclass(frozen=True)
class Scenario:
    """A spin preparation in a field environment probed through the waveguide.

    ``signal_detuning_offset`` is the bare two-photon laser knob (rad/s);
    the ``delta_two_photon`` field of ``base`` is ignored and replaced per
    species on resolution.
    """

    base: LambdaParams
    spin: SpinPreparation
    env: FieldEnvironment
    overlap: DirectionalOverlap
    n_atoms: int
    signal_detuning_offset: float = 0.0

    def species(self, direction: Direction) -> list[tuple[float, LambdaParams]]:
        return resolve_scenario(self.spin, direction, self.env, self.base,
                                self.overlap, self.signal_detuning_offset)

    def with_offset(self, signal_detuning_offset: float) -> "Scenario":
        return replace(self, signal_detuning_offset=signal_detuning_offset)

    def with_delta_minus(self, delta_minus: float) -> "Scenario":
        """Set the knob via the Lambda-minus reference axis value."""
        return self.with_offset(offset_from_delta_minus(delta_minus, self.env))

    def tuned(self, reference_spin_sign: int, detuning_from_resonance: float = 0.0,
              ) -> "Scenario":
        """Tune the knob so the reference species sits at its dressed
        two-photon resonance, optionally displaced by a given detuning."""
        target = -pump_light_shift(self.base) + detuning_from_resonance
        # invert species_two_photon_detuning(x, s, env) = target for x
        x0 = species_two_photon_detuning(0.0, reference_spin_sign, self.env)
        return self.with_offset(target - x0)

    def delta_minus_axis_value(self) -> float:
        """Current knob position on the Lambda-minus reference axis."""
        return species_two_photon_detuning(self.signal_detuning_offset, -1, self.env)
