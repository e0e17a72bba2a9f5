"""Bridge protocol tests: the stdio server must mirror native environment
behavior exactly and fail cleanly across the boundary."""

import json
import subprocess
import sys

import numpy as np
import pytest

from motorgym.bridge import BridgeServer
from motorgym.registry import make
from motorgym.rollout import run_rollout

OVERRIDES = {"episode_length": 120, "reference": {"fourier_cutoff_divisor": 10}}


class TestServerInProcess:
    def make_env(self, server, env_id="series-cont-v0", config=OVERRIDES):
        res = server.handle_request({"op": "make", "env_id": env_id,
                                     "config": config})
        assert res["ok"]
        return res

    def test_make_exposes_spaces(self):
        server = BridgeServer()
        res = self.make_env(server)
        assert res["action_space"] == {"kind": "continuous", "channels": 1,
                                       "low": [0.0], "high": [1.0]}
        assert res["observation_space"]["kind"] == "box"
        assert len(res["observation_space"]["low"]) == 6

    def test_discrete_pmsm_cardinality(self):
        server = BridgeServer()
        res = self.make_env(server, "pmsm-disc-v0", {"episode_length": 10})
        assert res["action_space"]["cardinalities"] == [8]

    def test_reset_step_loop(self):
        server = BridgeServer()
        h = self.make_env(server)["handle"]
        obs = server.handle_request({"op": "reset", "handle": h, "seed": 1})
        assert len(obs["observation"]) == 6
        res = server.handle_request({"op": "step", "handle": h, "action": 0.4})
        assert res["ok"] and isinstance(res["reward"], float)
        assert res["info"]["step"] == 1

    def test_boundary_matches_native_calls(self):
        """The bridge adds no arithmetic: a scripted rollout through the
        server equals the same rollout on a native environment bit for bit."""
        actions = [0.1 + 0.005 * k for k in range(100)]
        native_env = make("series-cont-v0", OVERRIDES)
        native = [native_env.reset(seed=11).tolist()]
        native_rewards = []
        for a in actions:
            obs, r, done, _ = native_env.step(a)
            native.append(obs.tolist())
            native_rewards.append(r)

        server = BridgeServer()
        h = self.make_env(server)["handle"]
        bridged = [server.handle_request({"op": "reset", "handle": h,
                                          "seed": 11})["observation"]]
        bridged_rewards = []
        for a in actions:
            res = server.handle_request({"op": "step", "handle": h, "action": a})
            bridged.append(res["observation"])
            bridged_rewards.append(res["reward"])
        assert bridged == native
        assert bridged_rewards == native_rewards

    def test_close_is_idempotent_and_invalidates(self):
        server = BridgeServer()
        h = self.make_env(server)["handle"]
        assert server.handle_request({"op": "close", "handle": h})["ok"]
        assert server.handle_request({"op": "close", "handle": h})["ok"]
        with pytest.raises(Exception, match="closed"):
            server.handle_request({"op": "reset", "handle": h})

    def test_bad_config_key_named_in_error(self):
        server = BridgeServer()
        with pytest.raises(Exception, match="episod_length"):
            server.handle_request({"op": "make", "env_id": "series-cont-v0",
                                   "config": {"episod_length": 10}})


class TestSubprocessProtocol:
    def run_lines(self, requests):
        proc = subprocess.run(
            [sys.executable, "-m", "motorgym.bridge"],
            input="\n".join(json.dumps(r) for r in requests) + "\n",
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stderr
        return [json.loads(line) for line in proc.stdout.splitlines()]

    def test_full_session(self):
        responses = self.run_lines([
            {"op": "make", "env_id": "series-cont-v0", "config": OVERRIDES},
            {"op": "reset", "handle": 1, "seed": 2},
            {"op": "step", "handle": 1, "action": 0.3},
            {"op": "step", "handle": 1, "action": 2.5},
            {"op": "close", "handle": 1},
            {"op": "step", "handle": 1, "action": 0.0},
            {"op": "shutdown"},
        ])
        assert [r["ok"] for r in responses] == [True, True, True, True, True,
                                                False, True]
        assert responses[3]["info"]["action_clamped"] is True
        assert responses[5]["error"]["type"] == "InputError"

    def test_errors_keep_serving(self):
        responses = self.run_lines([
            {"op": "bogus"},
            {"op": "make", "env_id": "nope-cont-v0"},
            {"op": "make", "env_id": "permex-disc-v0",
             "config": {"episode_length": 5}},
            {"op": "shutdown"},
        ])
        assert [r["ok"] for r in responses] == [False, False, True, True]


class TestRollout:
    def test_run_rollout_matches_bridge(self):
        actions = [0.25] * 60
        native = run_rollout("series-cont-v0", 7, actions, OVERRIDES)
        server = BridgeServer()
        h = server.handle_request({"op": "make", "env_id": "series-cont-v0",
                                   "config": OVERRIDES})["handle"]
        obs0 = server.handle_request({"op": "reset", "handle": h,
                                      "seed": 7})["observation"]
        assert obs0 == native["observations"][0]
        for k, a in enumerate(actions):
            res = server.handle_request({"op": "step", "handle": h, "action": a})
            assert res["observation"] == native["observations"][k + 1]
            assert res["reward"] == native["rewards"][k]

    def test_rollout_stops_at_done(self):
        out = run_rollout("series-cont-v0", 0, [0.0] * 500,
                          {"episode_length": 50})
        assert len(out["rewards"]) == 50
        assert out["dones"][-1] is True

    def test_discrete_action_lists(self):
        out = run_rollout("extex-disc-v0", 1, [[1, 1], [0, 1]],
                          {"episode_length": 10})
        assert len(out["rewards"]) == 2
