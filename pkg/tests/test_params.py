import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ramanamp import LambdaParams, pump_light_shift, two_photon_rabi
from ramanamp.errors import AdiabaticEliminationError
from ramanamp.params import MHZ


def params(omega_s=1.0, omega_p=20.0, delta=-82.0, gamma_ab=0.29, **kw):
    return LambdaParams.from_mhz(omega_s, omega_p, delta, 0.0, 5.225,
                                 gamma_ab, 0.0131, **kw)


class TestTwoPhotonRabi:
    def test_published_estimate(self):
        # quoted as "about 2 pi x 200 kHz" for the independent estimates
        val = two_photon_rabi(params(omega_s=1.6, omega_p=20.0))
        assert val == pytest.approx(0.195 * MHZ, rel=5e-3)

    def test_zero_signal(self):
        assert two_photon_rabi(params(omega_s=0.0)) == 0.0

    def test_model_column(self):
        val = two_photon_rabi(params(omega_s=0.95, omega_p=20.7))
        assert val == pytest.approx(0.1199 * MHZ, rel=1e-3)

    def test_zero_detuning_rejected(self):
        with pytest.raises(AdiabaticEliminationError):
            two_photon_rabi(params(delta=0.0))

    def test_sign_of_detuning_irrelevant(self):
        assert two_photon_rabi(params(delta=-82.0)) == two_photon_rabi(params(delta=82.0))

    @given(a=st.floats(0.1, 10), b=st.floats(0.1, 10))
    def test_bilinear_and_inverse_in_detuning(self, a, b):
        base = two_photon_rabi(params())
        scaled = two_photon_rabi(params(omega_s=a * 1.0, omega_p=b * 20.0))
        assert scaled == pytest.approx(a * b * base, rel=1e-12)
        stretched = two_photon_rabi(params(delta=-82.0 * a))
        assert stretched == pytest.approx(base / a, rel=1e-12)


class TestPumpLightShift:
    def dressed_oracle(self, p):
        """Shift of the pump-coupled dressed eigenvalue continuing from b."""
        h = np.array([[0.0, p.omega_p / 2], [p.omega_p / 2, p.delta]])
        evals = np.linalg.eigvalsh(h)
        # the b-like branch is the one adiabatically connected to 0
        b_like = evals[np.argmin(np.abs(evals))]
        return abs(b_like)

    @pytest.mark.parametrize("omega_p_mhz, delta_mhz, expect_mhz", [
        (20.0, -82.0, 1.2019),
        (20.7, -82.0, 1.28622),
        (20.7, 82.0, 1.28622),
    ])
    def test_against_dressed_eigenvalues(self, omega_p_mhz, delta_mhz, expect_mhz):
        p = params(omega_p=omega_p_mhz, delta=delta_mhz)
        val = pump_light_shift(p)
        assert val == pytest.approx(self.dressed_oracle(p), rel=1e-12)
        assert val == pytest.approx(expect_mhz * MHZ, rel=1e-4)

    def test_zero_pump(self):
        assert pump_light_shift(params(omega_p=0.0)) == 0.0

    def test_monotone_in_pump(self):
        vals = [pump_light_shift(params(omega_p=o)) for o in (1, 5, 10, 20, 40)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_weak_pump_asymptote(self):
        p = params(omega_p=0.05 * 82.0)
        asymptote = p.omega_p**2 / (4 * abs(p.delta))
        assert abs(pump_light_shift(p) - asymptote) / pump_light_shift(p) < 0.01


class TestInvariants:
    def test_branching_must_sum_to_one(self):
        with pytest.raises(ValueError, match="branch"):
            params(branch_a=0.6, branch_b=0.6)

    def test_negative_rates_rejected(self):
        with pytest.raises(ValueError):
            params(gamma_ab=-0.1)
        with pytest.raises(ValueError):
            LambdaParams.from_mhz(1, 20, -82, 0, -5.0, 0.29, 0.0131)
        with pytest.raises(ValueError):
            LambdaParams.from_mhz(-1, 20, -82, 0, 5.225, 0.29, 0.0131)

    def test_mhz_boundary_conversion(self):
        p = params()
        assert p.omega_p == pytest.approx(2 * math.pi * 20.0e6)
        assert p.delta == pytest.approx(-2 * math.pi * 82.0e6)

    def test_with_replaces_fields(self):
        p = params().with_(od0=0.5)
        assert p.od0 == 0.5 and p.omega_p == params().omega_p
