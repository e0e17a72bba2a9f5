"""Closed-loop speed control with the cascaded PI baseline: one dashboard
episode plus a small seeded benchmark (run the full 100-episode version
through the CLI: motorgym bench --episodes 100)."""

import pathlib

from motorgym.benchmark import benchmark, export_csv, plot_record, run_episode
from motorgym.config import config_from_dict, config_to_dict
from motorgym.controllers import PiCascade
from motorgym.envs import MotorEnv
from motorgym.presets import speed_benchmark_dict

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

cfg_dict = speed_benchmark_dict()
cfg = config_from_dict(cfg_dict)
env = MotorEnv(cfg)

record = run_episode(env, PiCascade(env), seed=(123, 0),
                     config_dict=config_to_dict(cfg))
print(f"episode: {len(record)} steps, shape {env.trajectory.shape}, "
      f"MAE {record.mae:.5f}")
export_csv(record, OUT / "pi_episode.csv")
plot_record(record, ["omega", "i", "u"], OUT / "pi_dashboard.png")
print(f"wrote {OUT / 'pi_episode.csv'} and {OUT / 'pi_dashboard.png'}")

report = benchmark(env, lambda e: PiCascade(e), n_episodes=10, seed=123,
                   config_dict=cfg_dict)
print(f"10 episodes: MAE min {report.mae_min:.5f} / mean {report.mae_mean:.5f} "
      f"/ max {report.mae_max:.5f}, violations {report.violations}")
(OUT / "pi_report.json").write_text(report.to_json() + "\n")
print(f"wrote {OUT / 'pi_report.json'}")
