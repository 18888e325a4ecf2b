"""Simulator and analysis toolkit for direction-dependent Raman amplification
of waveguide-guided light by spin-polarized three-level atoms."""

from .params import TWO_PI, MHZ, AtomState, LambdaParams, pump_light_shift, two_photon_rabi
from .response import TransferSample, chi_from_rho, chi_steady_analytic, transfer
from .chirality import (Direction, DirectionalOverlap, FieldEnvironment,
                        SpinPreparation, infer_field_from_separation,
                        resolve_scenario, tls_differential_shift,
                        zeeman_two_photon_separation)
from .lindblad import (ConstantDrive, DriveSample, EvolutionResult,
                       PumpTurnOnDrive, SampledSignalDrive, build_liouvillian,
                       evolve, hamiltonian, steady_state)
from .cascade import (EnsembleConfig, TransmissionTrace, make_time_grid,
                      propagate, quasi_steady_average)
from .scenario import Scenario

__version__ = "0.1.0"
