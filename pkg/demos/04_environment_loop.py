"""The agent/environment loop from the outside: a random agent on the series
drive, then the same environment stepped twice with one seed to show the
determinism contract, and a violation episode with the value-based penalty."""

import numpy as np

import motorgym as mg

env = mg.make("series-cont-v0", {"episode_length": 2000, "seed": 0})
rng = np.random.default_rng(3)

obs = env.reset(seed=8)
print(f"observation layout: {env.entries} + references {env.tracked} "
      f"(horizon {env.config.prediction_horizon}) -> {len(obs)} values")

total, steps = 0.0, 0
while True:
    obs, reward, done, info = env.step(env.action_space.sample(rng))
    total += reward
    steps += 1
    if done:
        break
print(f"random agent: {steps} steps, return {total:.1f}, "
      f"violation: {info['violation']}")

a = mg.make("series-cont-v0", {"episode_length": 50})
b = mg.make("series-cont-v0", {"episode_length": 50})
obs_a, obs_b = a.reset(seed=5), b.reset(seed=5)
rewards_a = [a.step(0.4).reward for _ in range(50)]
rewards_b = [b.step(0.4).reward for _ in range(50)]
print("determinism: same seed + same actions ->",
      "identical rewards" if rewards_a == rewards_b else "MISMATCH")

punished = mg.make("series-cont-v0", {
    "episode_length": 2000,
    "limit_penalty": "q-based", "penalty_gamma": 0.9,
})
punished.reset(seed=1)
k = 0
while True:
    _, reward, done, info = punished.step(1.0)  # full voltage, no control
    k += 1
    if done:
        break
print(f"full-voltage episode ends after {k} steps on {info['violation']} "
      f"violation with penalty reward {reward}")
