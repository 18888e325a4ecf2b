"""Shared fixtures: the benchmark parameter set and derived scenarios."""

import numpy as np
import pytest

from ramanamp import LambdaParams, pump_light_shift
from ramanamp.chirality import DirectionalOverlap, FieldEnvironment, SpinPreparation
from ramanamp.scenario import Scenario


@pytest.fixture(scope="session")
def tab1() -> LambdaParams:
    """Benchmark model parameters (one-photon detuning stored signed)."""
    return LambdaParams.from_mhz(0.95, 20.7, -82.0, 0.0, 5.225, 0.29, 0.0131)


@pytest.fixture(scope="session")
def tab1_resonant(tab1) -> LambdaParams:
    """Benchmark parameters tuned to the dressed two-photon resonance."""
    return tab1.with_(delta_two_photon=-pump_light_shift(tab1))


@pytest.fixture(scope="session")
def fig2b_scenario(tab1) -> Scenario:
    """Spin -4 preparation at 7 G, tuned to the sigma--coupled resonance."""
    sc = Scenario(base=tab1, spin=SpinPreparation.minus4(),
                  env=FieldEnvironment(b_gauss=7.0),
                  overlap=DirectionalOverlap(), n_atoms=1420)
    return sc.tuned(-1)


def rho_b() -> np.ndarray:
    rho = np.zeros((3, 3), dtype=complex)
    rho[1, 1] = 1.0
    return rho


def rho_a() -> np.ndarray:
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = 1.0
    return rho
