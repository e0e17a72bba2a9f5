"""Line-delimited JSON bridge exposing the environments to other runtimes.

Run ``python -m motorgym.bridge``; each request is one JSON object on stdin,
each response one JSON object on stdout.  Floats are serialized in shortest
round-trip form, so values survive the boundary bit-exactly.

Requests::

    {"op": "make", "env_id": "series-cont-v0", "config": {...overrides}}
        -> {"ok": true, "handle": 1, "action_space": {...},
            "observation_space": {...}}
    {"op": "reset", "handle": 1, "seed": 42}
        -> {"ok": true, "observation": [...]}
    {"op": "step", "handle": 1, "action": 0.5}
        -> {"ok": true, "observation": [...], "reward": r, "done": false,
            "info": {...}}
    {"op": "close", "handle": 1}   -> {"ok": true}   (idempotent)
    {"op": "shutdown"}             -> {"ok": true}, then the process exits

Errors are reported as ``{"ok": false, "error": {"type", "message"}}`` and
the bridge keeps serving.
"""

from __future__ import annotations

import json
import sys

import numpy as np

from . import __version__
from .envs import MotorEnv
from .errors import InputError, MotorGymError
from .registry import make


def _json_safe(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _space_payload(space) -> dict:
    if hasattr(space, "kind"):  # action space
        payload = {"kind": space.kind, "channels": space.channels}
        if space.kind == "discrete":
            payload["cardinalities"] = list(space.cardinalities)
        else:
            payload["low"] = list(space.low)
            payload["high"] = list(space.high)
        return payload
    return {"kind": "box", "low": list(space.low), "high": list(space.high)}


class BridgeServer:
    """Owns the handle table; one instance per process."""

    def __init__(self):
        self._envs: dict[int, MotorEnv] = {}
        self._next = 1

    def handle_request(self, req: dict) -> dict:
        op = req.get("op")
        if op == "make":
            env = make(req["env_id"], req.get("config"))
            handle = self._next
            self._next += 1
            self._envs[handle] = env
            return {"ok": True, "handle": handle,
                    "version": __version__,
                    "action_space": _space_payload(env.action_space),
                    "observation_space": _space_payload(env.observation_space)}
        if op == "shutdown":
            return {"ok": True, "shutdown": True}
        handle = req.get("handle")
        if op == "close":
            self._envs.pop(handle, None)  # double close is a no-op
            return {"ok": True}
        env = self._envs.get(handle)
        if env is None:
            raise InputError(f"unknown or closed handle {handle!r}")
        if op == "reset":
            obs = env.reset(seed=req.get("seed"))
            return {"ok": True, "observation": obs.tolist()}
        if op == "step":
            action = req["action"]
            if isinstance(action, list) and env.action_space.kind == "discrete":
                action = tuple(action)
            obs, reward, done, info = env.step(action)
            return {"ok": True, "observation": obs.tolist(),
                    "reward": reward, "done": done, "info": _json_safe(info)}
        raise InputError(f"unknown op {op!r}")


def serve(stdin=None, stdout=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    server = BridgeServer()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            response = server.handle_request(json.loads(line))
        except (MotorGymError, KeyError, ValueError, TypeError) as exc:
            response = {"ok": False,
                        "error": {"type": type(exc).__name__, "message": str(exc)}}
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
        if response.get("shutdown"):
            break


if __name__ == "__main__":
    serve()
