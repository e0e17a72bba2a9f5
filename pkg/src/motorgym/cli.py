"""Command-line front end.

Subcommands::

    motorgym run    --config cfg.json --controller pi --seed 0 --out traj.csv
    motorgym bench  --config cfg.json --controller pi --episodes 100 --seed 0 \
                    --out report.json [--csv-dir DIR]
    motorgym export --report report.json --out report.csv
    motorgym plot   --record traj.csv --entries omega,i --out fig.png

Exit codes: 0 on success, 1 on configuration errors, 2 on runtime or
numerical errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .benchmark import (BenchmarkReport, benchmark, export_csv,
                        export_report_csv, import_csv, plot_record,
                        run_episode)
from .config import config_to_dict, load_config
from .controllers import (ConstantController, HysteresisController, PiCascade,
                          PiGains)
from .envs import MotorEnv
from .errors import ConfigError, MotorGymError


class _ScriptedController:
    """Replays a list of external actions (the CLI's hook for agents driving
    the environment from outside)."""

    def __init__(self, actions):
        self.actions = actions
        self._k = 0

    def reset(self):
        self._k = 0

    def act(self, obs):
        if self._k >= len(self.actions):
            raise ConfigError("external action script exhausted before episode end")
        a = self.actions[self._k]
        self._k += 1
        return tuple(a) if isinstance(a, list) else a


def _build_controller(name: str, env: MotorEnv, args):
    if name == "pi":
        gains = None
        if args.pi_gains:
            parts = [float(v) for v in args.pi_gains.split(",")]
            if len(parts) != 4:
                raise ConfigError("--pi-gains expects "
                                  "kp_speed,ki_speed,kp_current,ki_current")
            gains = PiGains(*parts)
        return PiCascade(env, gains=gains)
    if name == "hysteresis":
        return HysteresisController(env, band=args.band)
    if name == "external":
        if args.actions is None:
            raise ConfigError("--controller external requires --actions FILE "
                              "(JSON list, one action per step)")
        with open(args.actions) as fh:
            return _ScriptedController(json.load(fh))
    if name == "zero":
        return ConstantController(env.zero_action())
    raise ConfigError(f"unknown controller {name!r}")


def _add_common(sub):
    sub.add_argument("--config", required=True, help="JSON configuration file")
    sub.add_argument("--controller", default="pi",
                     choices=("pi", "hysteresis", "external", "zero"))
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", required=True, help="output path")
    sub.add_argument("--actions", default=None,
                     help="action script for --controller external")
    sub.add_argument("--pi-gains", default=None, metavar="KPW,KIW,KPI,KII",
                     help="override the tuned cascade gains (normalized units)")
    sub.add_argument("--band", type=float, default=0.05,
                     help="hysteresis band half-width (normalized)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motorgym",
        description="Closed-loop drive benchmarks: run episodes, aggregate "
                    "tracking-error statistics, export CSV, draw dashboards.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one episode -> trajectory CSV")
    _add_common(p_run)
    p_run.add_argument("--plot", default=None, help="also draw a dashboard PNG")

    p_bench = sub.add_parser("bench", help="n episodes -> statistics report")
    _add_common(p_bench)
    p_bench.add_argument("--episodes", type=int, default=100)
    p_bench.add_argument("--csv-dir", default=None,
                         help="also export every episode as CSV into this directory")

    p_export = sub.add_parser("export", help="report JSON -> per-episode CSV")
    p_export.add_argument("--report", required=True)
    p_export.add_argument("--out", required=True)

    p_plot = sub.add_parser("plot", help="trajectory CSV -> dashboard image")
    p_plot.add_argument("--record", required=True)
    p_plot.add_argument("--entries", required=True,
                        help="comma-separated entry names, e.g. omega,i,u")
    p_plot.add_argument("--out", required=True)
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    env = MotorEnv(cfg)
    controller = _build_controller(args.controller, env, args)
    record = run_episode(env, controller, seed=args.seed,
                                   config_dict=config_to_dict(cfg))
    export_csv(record, args.out)
    if args.plot:
        plot_record(record, list(record.tracked) or list(record.entries),
                              args.plot)
    print(f"episode: {len(record)} steps, MAE {record.mae:.6f}, "
          f"violation {record.violation or 'none'} -> {args.out}")
    return 0


def _cmd_bench(args) -> int:
    cfg = load_config(args.config)
    env = MotorEnv(cfg)
    csv_dir = Path(args.csv_dir) if args.csv_dir else None
    if csv_dir:
        csv_dir.mkdir(parents=True, exist_ok=True)

    def hook(i, record):
        if csv_dir:
            export_csv(record, csv_dir / f"episode_{i:04d}.csv")

    report = benchmark(
        env, lambda e: _build_controller(args.controller, e, args),
        n_episodes=args.episodes, seed=args.seed,
        config_dict=config_to_dict(cfg), record_hook=hook)
    Path(args.out).write_text(report.to_json() + "\n")
    print(f"{args.episodes} episodes: MAE min {report.mae_min:.6f} / "
          f"mean {report.mae_mean:.6f} / max {report.mae_max:.6f}, "
          f"violations {report.violations} -> {args.out}")
    return 0


def _cmd_export(args) -> int:
    report = BenchmarkReport.from_json(Path(args.report).read_text())
    export_report_csv(report, args.out)
    print(f"{report.n_episodes} episodes -> {args.out}")
    return 0


def _cmd_plot(args) -> int:
    record = import_csv(args.record)
    entries = [e.strip() for e in args.entries.split(",") if e.strip()]
    plot_record(record, entries, args.out)
    print(f"plotted {entries} -> {args.out}")
    return 0


_COMMANDS = {"run": _cmd_run, "bench": _cmd_bench,
             "export": _cmd_export, "plot": _cmd_plot}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (MotorGymError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
