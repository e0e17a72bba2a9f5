"""Scripted native rollout: replay an action list against an environment and
dump every transition as JSON.  Counterpart of the bridge for equivalence
checks and for driving the simulation from external tools.

    python -m motorgym.rollout --env-id series-cont-v0 --seed 7 \
        --actions actions.json [--overrides overrides.json] [--out out.json]
"""

from __future__ import annotations

import argparse
import json
import sys

from .registry import make


def run_rollout(env_id: str, seed, actions, overrides=None) -> dict:
    env = make(env_id, overrides)
    obs = env.reset(seed=seed)
    out = {"observations": [obs.tolist()], "rewards": [], "dones": []}
    for action in actions:
        if isinstance(action, list) and env.action_space.kind == "discrete":
            action = tuple(action)
        obs, reward, done, _ = env.step(action)
        out["observations"].append(obs.tolist())
        out["rewards"].append(reward)
        out["dones"].append(done)
        if done:
            break
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="motorgym.rollout")
    parser.add_argument("--env-id", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--actions", required=True,
                        help="JSON file: list of actions, one per step")
    parser.add_argument("--overrides", default=None,
                        help="JSON file with configuration overrides")
    parser.add_argument("--out", default="-", help="output path or - for stdout")
    args = parser.parse_args(argv)

    with open(args.actions) as fh:
        actions = json.load(fh)
    overrides = None
    if args.overrides:
        with open(args.overrides) as fh:
            overrides = json.load(fh)
    result = run_rollout(args.env_id, args.seed, actions, overrides)
    text = json.dumps(result)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
