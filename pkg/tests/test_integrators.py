import math

import numpy as np
import pytest

from motorgym.errors import ConfigError, NumericsError
from motorgym.integrators import IntegratorChoice, integrate_horizon, step_ode
from motorgym.motors import DcMotorParams, LoadParams, build_motor

# excitation circuit of the example machine: di/dt = (u - R i) / L
R_E, L_E, U_E = 1.0, 1.6e-3, 1.0
TAU = 1e-4


def excitation_rhs(y):
    return np.array([(U_E - R_E * y[0]) / L_E])


def analytic(t):
    return (U_E / R_E) * (1.0 - math.exp(-t * R_E / L_E))


class TestBasics:
    def test_single_euler_step(self):
        # from rest one step is tau * u / L = 1e-4 / 1.6e-3
        choice = IntegratorChoice("euler", TAU)
        out = step_ode(choice, excitation_rhs, [0.0])
        assert out[0] == pytest.approx(0.0625, rel=1e-15)

    @pytest.mark.parametrize("method", ["euler", "rk4", "dopri45"])
    def test_zero_rhs_keeps_state(self, method):
        choice = IntegratorChoice(method, TAU)
        state = np.array([1.5, -2.0])
        out = step_ode(choice, lambda y: np.zeros_like(y), state)
        assert np.all(out == state)

    def test_method_aliases(self):
        assert IntegratorChoice("explicit-euler", TAU).method == "euler"
        assert IntegratorChoice("adaptive-dormand-prince", TAU).method == "dopri45"
        assert IntegratorChoice("dopri5", TAU).method == "dopri45"

    def test_validation(self):
        with pytest.raises(ConfigError):
            IntegratorChoice("leapfrog", TAU)
        with pytest.raises(ConfigError):
            IntegratorChoice("euler", -1.0)
        with pytest.raises(ConfigError):
            IntegratorChoice("dopri45", TAU, rel_tol=0.0)


class TestAccuracy:
    def test_rk4_matches_analytic_step_response(self):
        """Five electrical time constants; end-point relative error versus
        the closed-form exponential (oracle value 4.5e-9)."""
        horizon = 5 * L_E / R_E
        n = round(horizon / TAU)
        out = integrate_horizon(IntegratorChoice("rk4", TAU), excitation_rhs,
                                [0.0], n)
        rel = abs(out[0] - analytic(horizon)) / analytic(horizon)
        assert rel < 1e-8

    def test_adaptive_matches_analytic_step_response(self):
        horizon = 5 * L_E / R_E
        n = round(horizon / TAU)
        out = integrate_horizon(IntegratorChoice("dopri45", TAU), excitation_rhs,
                                [0.0], n)
        rel = abs(out[0] - analytic(horizon)) / analytic(horizon)
        assert rel < 1e-6

    def test_euler_error_scale(self):
        horizon = 5 * L_E / R_E
        n = round(horizon / TAU)
        out = integrate_horizon(IntegratorChoice("euler", TAU), excitation_rhs,
                                [0.0], n)
        rel = abs(out[0] - analytic(horizon)) / analytic(horizon)
        assert rel < 1e-2

    def test_all_methods_agree_on_series_drive(self):
        """Series drive, constant 100 V over 0.1 s; the adaptive method at
        tight tolerance is the oracle for the fixed-step methods.

        The run starts marginally above standstill: the constant term of the
        load torque makes the speed equation non-smooth at exactly zero
        speed, which is ill-posed for step-size control at 1e-12 tolerances.
        """
        params = DcMotorParams(r_a=2.78, r_e=1.0, l_a=6.3e-3, l_e=1.6e-3,
                               l_e_prime=0.5e-3, j_rotor=17e-3)
        load = LoadParams(a=0.01, b=0.12, c=0.1, j_load=1.0)
        motor = build_motor("series", params)
        rhs = lambda y: motor.derivative(y, (100.0,), load)
        start = [0.0, 1.0]
        n = round(0.1 / TAU)
        oracle = integrate_horizon(
            IntegratorChoice("dopri45", TAU, rel_tol=1e-10, abs_tol=1e-12),
            rhs, start, n)
        for method in ("euler", "rk4", "dopri45"):
            out = integrate_horizon(IntegratorChoice(method, TAU), rhs, start, n)
            rel = np.linalg.norm(out - oracle) / np.linalg.norm(oracle)
            assert rel < 1e-3, (method, rel)


class TestDeterminism:
    @pytest.mark.parametrize("method", ["euler", "rk4", "dopri45"])
    def test_bit_identical_repeats(self, method):
        choice = IntegratorChoice(method, TAU)
        a = integrate_horizon(choice, excitation_rhs, [0.0], 50)
        b = integrate_horizon(choice, excitation_rhs, [0.0], 50)
        assert np.array_equal(a, b)


class TestFailureModes:
    def test_non_finite_result_raises(self):
        choice = IntegratorChoice("euler", TAU)
        with pytest.raises(NumericsError):
            step_ode(choice, lambda y: np.array([math.inf]), [0.0])

    def test_adaptive_rejects_blowup(self):
        # 1/y singularity reached inside the step: the controller shrinks h
        # to the floor and reports a diagnostic
        choice = IntegratorChoice("dopri45", 1.0)
        with pytest.raises(NumericsError):
            step_ode(choice, lambda y: np.array([y[0] ** 2]), [3.0])
