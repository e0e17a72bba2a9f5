import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import motorgym as mg
from motorgym.envs import add_noise, limit_check, normalize, reward, violation_penalty
from motorgym.errors import ConfigError, EpisodeError, InputError


def series_env(**overrides):
    base = {"episode_length": 200, "seed": 11}
    base.update(overrides)
    return mg.make("series-cont-v0", base)


class TestNormalize:
    def test_half_scale(self):
        assert normalize(239.2, 368.0, 1.3) == pytest.approx(0.5, rel=1e-12)

    def test_at_limit(self):
        assert normalize(1.3 * 368.0, 368.0, 1.3) == pytest.approx(1.0, rel=1e-15)

    def test_zero(self):
        assert normalize(0.0, 368.0, 1.3) == 0.0


class TestReward:
    def test_perfect_tracking(self):
        s = np.array([0.2, -0.4])
        w = np.array([0.5, 0.5])
        widths = np.array([2.0, 1.0])
        assert reward(s, s, w, widths, "wsae") == 0.0
        assert reward(s, s, w, widths, "wsse") == 0.0
        assert reward(s, s, w, widths, "swsae") == 1.0
        assert reward(s, s, w, widths, "swsse") == 1.0

    def test_maximum_bipolar_error(self):
        # worst case on a bipolar entry: error 2, width 2 -> reward -1
        assert reward([1.0], [-1.0], [1.0], [2.0], "wsae") == pytest.approx(-1.0)

    def test_squared_error_value(self):
        # width-scaled errors (0.5, 0): -(0.5 * 0.25) = -0.125
        r = reward([0.5, 0.3], [0.0, 0.3], [0.5, 0.5], [1.0, 1.0], "wsse")
        assert r == pytest.approx(-0.125, rel=1e-12)

    @given(st.integers(1, 5), st.data())
    @settings(max_examples=200, deadline=None)
    def test_bounds_and_shift_identity(self, n, data):
        lows = np.array(data.draw(st.lists(st.sampled_from([-1.0, 0.0]),
                                           min_size=n, max_size=n)))
        widths = 1.0 - lows
        raw_w = np.array(data.draw(st.lists(st.floats(0.0, 1.0), min_size=n,
                                            max_size=n)))
        total = raw_w.sum()
        w = raw_w / total if total > 0 else np.full(n, 1.0 / n)
        s = np.array([data.draw(st.floats(lo, 1.0)) for lo in lows])
        ref = np.array([data.draw(st.floats(lo, 1.0)) for lo in lows])
        wsae = reward(s, ref, w, widths, "wsae")
        wsse = reward(s, ref, w, widths, "wsse")
        assert -1.0 - 1e-9 <= wsae <= 0.0
        assert -1.0 - 1e-9 <= wsse <= 0.0
        assert reward(s, ref, w, widths, "swsae") == pytest.approx(wsae + 1.0)
        assert reward(s, ref, w, widths, "swsse") == pytest.approx(wsse + 1.0)

    def test_zero_weight_entries_ignored(self):
        w = np.array([1.0, 0.0])
        widths = np.array([2.0, 2.0])
        r1 = reward([0.5, 0.9], [0.5, -0.9], w, widths, "wsae")
        assert r1 == 0.0

    def test_monotone_in_error(self):
        errors = np.linspace(0.0, 2.0, 9)
        rewards = [reward([e], [0.0], [1.0], [2.0], "swsae") for e in errors]
        assert all(a > b for a, b in zip(rewards, rewards[1:]))


class TestLimitCheck:
    LIMITS = np.array([478.4, 325.0, 60.0, 546.0, 546.0])
    EXEMPT = np.array([False, False, False, False, True])

    def test_violation_above_limit(self):
        raw = np.array([0.0, 0.0, 60.1, 0.0, 420.0])
        assert limit_check(raw, self.LIMITS, self.EXEMPT) == 2

    def test_exactly_at_limit_ok(self):
        raw = np.array([478.4, 325.0, 60.0, 546.0, 420.0])
        assert limit_check(raw, self.LIMITS, self.EXEMPT) is None

    def test_negative_violation(self):
        raw = np.array([-478.5, 0.0, 0.0, 0.0, 420.0])
        assert limit_check(raw, self.LIMITS, self.EXEMPT) == 0

    def test_exempt_entry_never_violates(self):
        raw = np.array([0.0, 0.0, 0.0, 0.0, 1e6])
        assert limit_check(raw, self.LIMITS, self.EXEMPT) is None


class TestViolationPenalty:
    def test_q_based_values(self):
        assert violation_penalty("q-based", gamma=0.9) == pytest.approx(-10.0)
        assert violation_penalty("q-based", gamma=0.5) == pytest.approx(-2.0)
        assert violation_penalty("q-based", gamma=0.99) == pytest.approx(-100.0)

    def test_zero_mode(self):
        assert violation_penalty("zero") == 0.0

    def test_constant_mode(self):
        assert violation_penalty("constant", constant=-3.5) == -3.5

    def test_invalid_gamma(self):
        with pytest.raises(ConfigError):
            violation_penalty("q-based", gamma=1.0)


class TestNoise:
    def test_zero_levels_unchanged(self):
        rng = np.random.default_rng(0)
        v = np.array([0.1, -0.5, 0.9])
        out = add_noise(v, np.zeros(3), 1.3, rng)
        assert out is v or np.array_equal(out, v)

    def test_statistics(self):
        # rho = 0.06, xi = 1 -> variance 0.01, std 0.1
        rng = np.random.default_rng(1)
        n = 1_000_000
        out = add_noise(np.zeros(n), np.full(n, 0.06), 1.0, rng)
        assert out.std() == pytest.approx(0.1, rel=0.01)

    def test_margin_scaling(self):
        # xi = 2 quarters the variance
        rng = np.random.default_rng(2)
        n = 500_000
        out = add_noise(np.zeros(n), np.full(n, 0.06), 2.0, rng)
        assert out.var() == pytest.approx(0.0025, rel=0.02)


class TestResetContract:
    def test_same_seed_same_observation(self):
        env = series_env()
        a = env.reset(seed=123)
        b = env.reset(seed=123)
        assert np.array_equal(a, b)

    def test_same_seed_same_references(self):
        env = series_env()
        env.reset(seed=5)
        ref_a = {k: v.copy() for k, v in env.trajectory.values.items()}
        env.reset(seed=5)
        assert all(np.array_equal(ref_a[k], env.trajectory.values[k])
                   for k in ref_a)

    def test_observation_in_unit_box(self):
        env = series_env()
        for seed in range(10):
            obs = env.reset(seed=seed)
            assert np.all(obs <= 1.0 + 1e-12)
            assert np.all(obs >= -1.0 - 1e-12)

    def test_pmsm_observation_length(self):
        # 10 state entries + 3 tracked currents * horizon 2
        env = mg.make("pmsm-cont-v0", {"episode_length": 50, "seed": 0})
        assert env.config.prediction_horizon == 2
        assert len(env.reset(seed=0)) == 16
        assert len(env.observation_space.low) == 16

    def test_pmsm_reference_window_is_entry_major(self):
        # trailing slots are (ia_t, ia_t+1, ib_t, ib_t+1, ic_t, ic_t+1)
        env = mg.make("pmsm-cont-v0", {"episode_length": 50})
        obs = env.reset(seed=1)
        traj = env.trajectory
        expected = [traj.values[n][t] for n in ("i_a", "i_b", "i_c")
                    for t in (0, 1)]
        assert np.array_equal(obs[10:], expected)


class TestStepPipeline:
    def test_equilibrium_gives_unit_reward(self):
        """Zero state, zero action, zero references and a coasting load keep
        the drive at rest; the shifted absolute-error reward is exactly 1."""
        env = series_env(load_params={"a": 0.0, "b": 0.0, "c": 0.0, "j_load": 0.0},
                         zero_references=["omega"])
        env.reset(seed=0)
        env._state = np.zeros(2)  # pin the random start at rest
        obs, r, done, info = env.step(0.0)
        assert r == 1.0
        assert not done
        assert np.all(info["state_raw"][:-1] == 0.0)

    def test_violation_penalty_same_step(self):
        env = series_env(limit_penalty="q-based", penalty_gamma=0.9)
        env.reset(seed=0)
        env._state = np.array([0.0, 500.0])  # beyond the 478.4 rad/s limit
        obs, r, done, info = env.step(0.0)
        assert done and r == pytest.approx(-10.0)
        assert info["violation"] == "omega"

    def test_step_after_done_raises(self):
        env = series_env(episode_length=2)
        env.reset(seed=1)
        env.step(0.1)
        _, _, done, _ = env.step(0.1)
        assert done
        with pytest.raises(EpisodeError):
            env.step(0.1)

    def test_step_before_reset_raises(self):
        env = series_env()
        with pytest.raises(EpisodeError):
            env.step(0.0)

    def test_episode_ends_after_exact_length(self):
        env = series_env(episode_length=7)
        env.reset(seed=2)
        for k in range(7):
            _, _, done, info = env.step(0.0)
            assert info["step"] == k + 1
        assert done

    def test_invalid_action_rejected(self):
        env = mg.make("series-disc-v0", {"episode_length": 10, "seed": 0})
        env.reset(seed=0)
        with pytest.raises(InputError):
            env.step(5)
        cont = series_env()
        cont.reset(seed=0)
        with pytest.raises(InputError):
            cont.step(math.nan)

    def test_out_of_range_duty_flagged_not_rejected(self):
        env = series_env()
        env.reset(seed=3)
        _, _, _, info = env.step(1.7)
        assert info["action_clamped"]
        assert info["u_in"][0] == pytest.approx(420.0)

    def test_deterministic_given_seed_and_actions(self):
        a, b = series_env(), series_env()
        obs_a, obs_b = a.reset(seed=9), b.reset(seed=9)
        assert np.array_equal(obs_a, obs_b)
        rng = np.random.default_rng(0)
        for _ in range(50):
            action = float(rng.uniform(0, 1))
            ra, rb = a.step(action), b.step(action)
            assert np.array_equal(ra.observation, rb.observation)
            assert ra.reward == rb.reward and ra.done == rb.done

    def test_dead_time_delays_first_voltage(self):
        env = series_env(converter={"topology": "1QC", "mode": "continuous",
                                    "u_sup": 420.0, "dead_time": True})
        env.reset(seed=4)
        _, _, _, info = env.step(1.0)
        assert info["u_in"][0] == 0.0       # zero action still queued
        _, _, _, info = env.step(0.0)
        assert info["u_in"][0] == pytest.approx(420.0)

    def test_reward_ignores_measurement_noise(self):
        env = series_env(noise_levels={"omega": 0.05, "i": 0.05})
        env.reset(seed=5)
        res = env.step(0.2)
        norm = res.info["state_norm"]
        k = env.entries.index("omega")
        ref = res.info["reference"][0]
        expected = 1.0 - abs(norm[k] - ref)  # unipolar speed, width 1
        assert res.reward == pytest.approx(expected, rel=1e-12)

    def test_input_noise_perturbs_dynamics(self):
        clean = series_env()
        noisy = series_env(noise_levels={"u": 0.01})
        clean.reset(seed=6)
        noisy.reset(seed=6)
        rc = clean.step(0.5)
        rn = noisy.step(0.5)
        assert rn.info["u_in"][0] != rc.info["u_in"][0]
        assert rn.info["state_raw"][2] != rc.info["state_raw"][2]

    def test_measurement_noise_leaves_state_clean(self):
        clean = series_env()
        noisy = series_env(noise_levels={"omega": 0.01})
        clean.reset(seed=7)
        noisy.reset(seed=7)
        rc = clean.step(0.5)
        rn = noisy.step(0.5)
        assert np.array_equal(rn.info["state_raw"], rc.info["state_raw"])
        assert not np.array_equal(rn.observation, rc.observation)


class TestConfigValidation:
    def test_weights_should_sum_to_one(self):
        with pytest.warns(UserWarning, match="sum"):
            series_env(reward_weights={"omega": 0.5})

    def test_unknown_weight_entry(self):
        with pytest.raises(ConfigError):
            series_env(reward_weights={"i_d": 1.0})

    def test_all_zero_weights_rejected(self):
        with pytest.warns(UserWarning), pytest.raises(ConfigError):
            series_env(reward_weights={"omega": 0.0})

    def test_motor_converter_compatibility(self):
        with pytest.raises(ConfigError):
            mg.make("series-cont-v0", {"converter": {"topology": "B6"}})
        with pytest.raises(ConfigError):
            mg.make("pmsm-cont-v0", {"converter": {"topology": "4QC"}})

    def test_interlock_must_be_below_tau(self):
        with pytest.raises(ConfigError):
            series_env(converter={"topology": "1QC", "mode": "continuous",
                                  "u_sup": 420.0, "interlocking_time": 2e-4})

    def test_bad_gamma(self):
        with pytest.raises(ConfigError):
            series_env(limit_penalty="q-based", penalty_gamma=1.5)

    def test_safety_margin_below_one(self):
        with pytest.raises(ConfigError):
            series_env(safety_margin=0.9)

    def test_unknown_config_key_named(self):
        with pytest.raises(ConfigError, match="predicton_horizon"):
            series_env(predicton_horizon=3)

    def test_unknown_env_id(self):
        with pytest.raises(ConfigError):
            mg.make("induction-cont-v0")


class TestEnvIds:
    def test_registry_covers_all_motors_and_modes(self):
        ids = mg.env_ids()
        assert len(ids) == 10
        assert "series-cont-v0" in ids and "pmsm-disc-v0" in ids

    def test_discrete_pmsm_has_eight_commands(self):
        env = mg.make("pmsm-disc-v0", {"episode_length": 20, "seed": 0})
        assert env.action_space.cardinalities == (8,)


def test_warning_free_default_construction():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for env_id in mg.env_ids():
            mg.make(env_id, {"episode_length": 10})
