import numpy as np
import pytest

import motorgym as mg
from motorgym.config import config_from_dict
from motorgym.controllers import HysteresisController, PiCascade, PiGains, tune_pi
from motorgym.envs import MotorEnv
from motorgym.errors import ConfigError
from motorgym.presets import speed_benchmark_dict


def bench_env(**overrides):
    cfg = speed_benchmark_dict()
    cfg.update(overrides)
    return MotorEnv(config_from_dict(cfg))


class TestTunePi:
    def test_inner_loop_cancels_electrical_pole(self):
        env = bench_env()
        gains = tune_pi(env)
        # T_n = L/R: ki/kp must equal R/L = 1/2.09 ms
        tau_e = (6.3e-3 + 1.6e-3) / (2.78 + 1.0)
        assert tau_e == pytest.approx(2.0899e-3, rel=1e-3)
        assert gains.ki_current / gains.kp_current == pytest.approx(1 / tau_e,
                                                                    rel=1e-12)

    def test_doubling_resistance(self):
        """Doubling R at fixed L halves the electrical time constant; by the
        magnitude-optimum rule kp = L / (2 u_sup sigma) stays put while ki
        doubles."""
        env = bench_env()
        params = dict(r_a=2 * 2.78, r_e=2 * 1.0, l_a=6.3e-3, l_e=1.6e-3,
                      l_e_prime=0.5e-3, j_rotor=1.5e-4)
        env2 = bench_env(motor_params=params)
        g1, g2 = tune_pi(env), tune_pi(env2)
        assert g2.kp_current == pytest.approx(g1.kp_current, rel=1e-12)
        assert g2.ki_current == pytest.approx(2 * g1.ki_current, rel=1e-12)

    def test_gains_positive_and_reference_independent(self):
        a = tune_pi(bench_env(seed=1))
        b = tune_pi(bench_env(seed=99))
        assert a == b
        for v in (a.kp_speed, a.ki_speed, a.kp_current, a.ki_current):
            assert v > 0

    def test_gain_validation(self):
        with pytest.raises(ConfigError):
            PiGains(kp_speed=0.0, ki_speed=1.0, kp_current=1.0, ki_current=1.0)

    def test_pmsm_unsupported(self):
        env = mg.make("pmsm-cont-v0", {"episode_length": 10,
                                       "reward_weights": {"omega": 1.0}})
        with pytest.raises(ConfigError):
            tune_pi(env)


class TestPiCascade:
    def test_zero_error_zero_action(self):
        env = bench_env()
        env.reset(seed=0)
        pi = PiCascade(env)
        obs = np.zeros(len(env.observation_space.low))
        assert pi.act(obs) == 0.0

    def test_setpoint_clamps_at_nominal_current(self):
        """With the speed loop railed and the measured current already at its
        nominal value, the current error must be ~0: the set-point saturates
        at the nominal level, not at the safety-scaled limit."""
        env = bench_env()
        env.reset(seed=0)
        pi = PiCascade(env)
        xi = env.config.safety_margin
        obs = np.zeros(len(env.observation_space.low))
        obs[env.entries.index("omega")] = 0.0
        obs[-1] = 1.0 / xi                      # speed reference at maximum
        obs[env.entries.index("i")] = 1.0 / xi  # current at nominal
        duty = pi.act(obs)
        assert duty == pytest.approx(0.0, abs=1e-9)

    def test_requires_continuous_actions(self):
        env = mg.make("series-disc-v0", {"episode_length": 10})
        with pytest.raises(ConfigError):
            PiCascade(env)

    def test_requires_tracked_speed(self):
        env = bench_env(reward_weights={"i": 1.0})
        with pytest.raises(ConfigError):
            PiCascade(env)

    def test_steady_state_error_vanishes(self):
        """Constant achievable speed reference: integral action drives the
        tracking error to zero within one simulated second."""
        env = bench_env(seed=None)
        env.reset(seed=3)
        env.trajectory.values["omega"][:] = 0.5
        pi = PiCascade(env)
        pi.reset()
        obs = env._observe()
        err = None
        for _ in range(10_000):
            obs, _, done, info = env.step(pi.act(obs))
            err = info["state_norm"][0] - 0.5
            assert not done or info["violation"] is None
            if done:
                break
        assert abs(err) < 1e-3

    def test_anti_windup_recovery(self):
        """After 1000 saturated steps the integrator must not have wound up:
        reversing the error sign frees the output within a few steps."""
        env = bench_env()
        env.reset(seed=0)
        pi = PiCascade(env)
        n_obs = len(env.observation_space.low)
        high = np.zeros(n_obs)
        high[-1] = 0.769  # large speed reference, drive pinned at standstill
        for _ in range(1000):
            duty = pi.act(high)
        assert duty == pytest.approx(env.action_space.high[0])
        reversed_obs = np.zeros(n_obs)
        reversed_obs[env.entries.index("omega")] = 0.769  # now above the ref
        for k in range(5):
            duty = pi.act(reversed_obs)
            if duty < env.action_space.high[0] - 1e-9:
                break
        assert duty < env.action_space.high[0] - 1e-9
        assert k <= 1

    def test_extex_holds_field_duty(self):
        env = mg.make("extex-cont-v0", {"episode_length": 10, "seed": 0})
        env.reset(seed=0)
        pi = PiCascade(env)
        obs = np.zeros(len(env.observation_space.low))
        action = pi.act(obs)
        assert action.shape == (2,)
        # field channel pinned at r_e * i_e_nominal / u_sup
        assert action[1] == pytest.approx(200.0 * 2.0 / 420.0, rel=1e-12)


class TestHysteresis:
    def obs_for(self, env, value, ref):
        obs = np.zeros(len(env.observation_space.low))
        obs[env.entries.index("omega")] = value
        obs[-1] = ref
        return obs

    def test_switching_logic(self):
        env = mg.make("series-disc-v0", {"episode_length": 10})
        h = HysteresisController(env, band=0.05)
        assert h.act(self.obs_for(env, 0.0, 0.5)) == 1   # far below -> on
        assert h.act(self.obs_for(env, 0.9, 0.5)) == 0   # far above -> off
        h.reset()
        h.act(self.obs_for(env, 0.0, 0.5))               # on
        assert h.act(self.obs_for(env, 0.49, 0.5)) == 1  # inside band: hold
        h.act(self.obs_for(env, 0.9, 0.5))               # off
        assert h.act(self.obs_for(env, 0.51, 0.5)) == 0  # inside band: hold

    def test_band_validation(self):
        env = mg.make("series-disc-v0", {"episode_length": 10})
        with pytest.raises(ConfigError):
            HysteresisController(env, band=0.0)

    def test_continuous_env_rejected(self):
        env = bench_env()
        with pytest.raises(ConfigError):
            HysteresisController(env)

    def test_commands_always_admissible(self):
        cfg = speed_benchmark_dict()
        cfg["converter"]["mode"] = "discrete"
        env = MotorEnv(config_from_dict(cfg))
        h = HysteresisController(env, band=0.05)
        obs = env.reset(seed=7)
        for _ in range(500):
            cmd = h.act(obs)
            assert env.action_space.contains(cmd)
            obs, _, done, _ = env.step(cmd)
            if done:
                break

    def test_closed_loop_error_bounded_by_band_plus_ripple(self):
        """Current control with a constant reference: after the approach
        transient the error stays within the band plus the per-step switching
        ripple (full supply voltage over one sampling period)."""
        cfg = speed_benchmark_dict()
        cfg["converter"]["mode"] = "discrete"
        cfg["reward_weights"] = {"i": 1.0}
        env = MotorEnv(config_from_dict(cfg))
        env.reset(seed=11)
        env.trajectory.values["i"][:] = 0.4
        h = HysteresisController(env, band=0.05)
        h.reset()
        obs = env._observe()
        i_idx = env.entries.index("i")
        # worst-case current slew over one step in normalized units
        params = env.config.motor_params
        ripple = (420.0 / (params.l_a + params.l_e)) * env.config.tau \
            / env.limits[i_idx]
        errors = []
        for k in range(4000):
            obs, _, done, info = env.step(h.act(obs))
            if k > 1000:
                errors.append(abs(info["state_norm"][i_idx] - 0.4))
            assert not done
        assert max(errors) < 0.05 + ripple
