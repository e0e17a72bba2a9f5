"""Closed-loop rollouts, tracking-error statistics, CSV export and plots.

The benchmark metric is the mean absolute tracking error per step (MAE):
the weighted sum of normalized absolute errors over the tracked quantities,
divided by each entry's normalized range width, averaged over the episode.
A perfect controller scores 0.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .envs import MotorEnv
from .errors import InputError

_META_PREFIX = "# motorgym-record "


def config_digest(config_dict: dict) -> str:
    """Stable short fingerprint of a configuration dictionary."""
    blob = json.dumps(config_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class TrajectoryRecord:
    """Per-step time series of one episode.

    Arrays are aligned: row ``t`` holds the state reached after step ``t+1``,
    the reference it was compared against, the action that produced it and
    the reward received.
    """

    entries: tuple
    tracked: tuple
    steps: np.ndarray
    time_s: np.ndarray
    raw: np.ndarray
    norm: np.ndarray
    refs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    done: np.ndarray
    weights: np.ndarray | None = None
    widths: np.ndarray | None = None
    xi: float = 1.0
    seed: object = None
    digest: str = ""
    violation: str | None = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def mae(self) -> float:
        """Mean weighted absolute normalized tracking error per step."""
        if self.weights is None or self.widths is None:
            raise InputError("record carries no weight metadata; MAE undefined")
        tracked_idx = [self.entries.index(n) for n in self.tracked]
        err = np.abs(self.norm[:, tracked_idx] - self.refs) / self.widths
        return float(np.mean(err @ self.weights))


@dataclass
class BenchmarkReport:
    """Aggregate of n independent seeded episodes."""

    maes: tuple
    episode_lengths: tuple
    violations: int
    n_episodes: int
    seed: object
    digest: str
    mae_min: float = field(init=False)
    mae_mean: float = field(init=False)
    mae_max: float = field(init=False)

    def __post_init__(self):
        self.mae_min = float(min(self.maes))
        self.mae_mean = float(np.mean(self.maes))
        self.mae_max = float(max(self.maes))

    def to_json(self) -> str:
        payload = {
            "n_episodes": self.n_episodes,
            "seed": self.seed,
            "config_digest": self.digest,
            "mae": {"min": self.mae_min, "mean": self.mae_mean,
                    "max": self.mae_max},
            "violations": self.violations,
            "episode_maes": list(self.maes),
            "episode_lengths": list(self.episode_lengths),
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    @staticmethod
    def from_json(text: str) -> "BenchmarkReport":
        d = json.loads(text)
        return BenchmarkReport(
            maes=tuple(d["episode_maes"]),
            episode_lengths=tuple(d["episode_lengths"]),
            violations=d["violations"], n_episodes=d["n_episodes"],
            seed=d["seed"], digest=d["config_digest"])


def run_episode(env: MotorEnv, controller, seed=None,
                config_dict: dict | None = None) -> TrajectoryRecord:
    """One full closed-loop rollout (until violation or episode end)."""
    obs = env.reset(seed=seed)
    controller.reset()
    tau = env.config.tau
    rows_raw, rows_norm, rows_ref, acts, rewards, dones = [], [], [], [], [], []
    violation = None
    while True:
        action = controller.act(obs)
        obs, r, done, info = env.step(action)
        rows_raw.append(info["state_raw"])
        rows_norm.append(info["state_norm"])
        rows_ref.append(info["reference"])
        acts.append(np.atleast_1d(np.asarray(action, dtype=float)))
        rewards.append(r)
        dones.append(done)
        if info["violation"] is not None:
            violation = info["violation"]
        if done:
            break
    n = len(rewards)
    return TrajectoryRecord(
        entries=env.entries, tracked=env.tracked,
        steps=np.arange(1, n + 1),
        time_s=tau * np.arange(1, n + 1),
        raw=np.vstack(rows_raw), norm=np.vstack(rows_norm),
        refs=np.vstack(rows_ref) if env.tracked else np.zeros((n, 0)),
        actions=np.vstack(acts), rewards=np.asarray(rewards),
        done=np.asarray(dones, dtype=bool),
        weights=env.tracked_weights, widths=env.tracked_widths,
        xi=env.config.safety_margin, seed=seed,
        digest=config_digest(config_dict) if config_dict else "",
        violation=violation)


def benchmark(env: MotorEnv, controller_factory, n_episodes: int, seed: int,
              config_dict: dict | None = None,
              record_hook=None) -> BenchmarkReport:
    """``n_episodes`` independent episodes, seeded ``(seed, 0..n-1)``.

    ``controller_factory(env)`` builds the controller once; it is reset per
    episode.  ``record_hook(index, record)`` optionally receives every
    episode record (e.g. for CSV export).  Episodes run sequentially, so the
    report is a pure function of (config, seed).
    """
    if n_episodes < 1:
        raise InputError("n_episodes must be >= 1")
    controller = controller_factory(env)
    maes, lengths, violations = [], [], 0
    for i in range(n_episodes):
        record = run_episode(env, controller, seed=(seed, i),
                             config_dict=config_dict)
        maes.append(record.mae)
        lengths.append(len(record))
        violations += int(record.violation is not None)
        if record_hook is not None:
            record_hook(i, record)
    return BenchmarkReport(
        maes=tuple(maes), episode_lengths=tuple(lengths),
        violations=violations, n_episodes=n_episodes, seed=seed,
        digest=config_digest(config_dict) if config_dict else "")


# -- CSV export / import ----------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def export_csv(record: TrajectoryRecord, path):
    """Write a record with header
    ``step,time_s,<entry>_raw,<entry>_norm,<entry>_ref,action_<ch>,reward,done``
    (reference columns exist for tracked entries only).  Floats are written
    in shortest round-trip form, so re-importing is exact for finite values.
    """
    header = ["step", "time_s"]
    for name in record.entries:
        header += [f"{name}_raw", f"{name}_norm"]
    header += [f"{name}_ref" for name in record.tracked]
    header += [f"action_{c}" for c in range(record.actions.shape[1])]
    header += ["reward", "done"]
    meta = {"xi": record.xi, "seed": record.seed, "config": record.digest,
            "violation": record.violation}
    with open(path, "w", newline="") as fh:
        fh.write(_META_PREFIX + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in range(len(record)):
            row = [int(record.steps[t]), _fmt(record.time_s[t])]
            for k in range(len(record.entries)):
                row += [_fmt(record.raw[t, k]), _fmt(record.norm[t, k])]
            row += [_fmt(v) for v in record.refs[t]]
            row += [_fmt(v) for v in record.actions[t]]
            row += [_fmt(record.rewards[t]), int(record.done[t])]
            writer.writerow(row)


def import_csv(path) -> TrajectoryRecord:
    """Re-read an exported record.  Weight metadata is not stored in the
    file, so the MAE of an imported record is undefined."""
    with open(path, newline="") as fh:
        first = fh.readline()
        meta = {}
        if first.startswith(_META_PREFIX):
            meta = json.loads(first[len(_META_PREFIX):])
            header = next(csv.reader([fh.readline()]))
        else:
            header = next(csv.reader([first]))
        rows = list(csv.reader(fh))
    entries = tuple(h[:-4] for h in header if h.endswith("_raw"))
    tracked = tuple(h[:-4] for h in header if h.endswith("_ref"))
    n_actions = sum(h.startswith("action_") for h in header)
    data = np.array([[float(v) for v in row] for row in rows])
    col = {name: i for i, name in enumerate(header)}
    raw = np.column_stack([data[:, col[f"{n}_raw"]] for n in entries])
    norm = np.column_stack([data[:, col[f"{n}_norm"]] for n in entries])
    refs = (np.column_stack([data[:, col[f"{n}_ref"]] for n in tracked])
            if tracked else np.zeros((len(rows), 0)))
    actions = (np.column_stack([data[:, col[f"action_{c}"]]
                                for c in range(n_actions)])
               if n_actions else np.zeros((len(rows), 0)))
    return TrajectoryRecord(
        entries=entries, tracked=tracked,
        steps=data[:, col["step"]].astype(int),
        time_s=data[:, col["time_s"]],
        raw=raw, norm=norm, refs=refs, actions=actions,
        rewards=data[:, col["reward"]],
        done=data[:, col["done"]].astype(bool),
        xi=float(meta.get("xi", 1.0)), seed=meta.get("seed"),
        digest=meta.get("config", ""), violation=meta.get("violation"))


def export_report_csv(report: BenchmarkReport, path):
    """Per-episode table of a benchmark report."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "mae", "steps"])
        for i, (mae, n) in enumerate(zip(report.maes, report.episode_lengths)):
            writer.writerow([i, _fmt(mae), n])


def plot_record(record: TrajectoryRecord, entries, path):
    """Static dashboard: normalized quantity, its reference where tracked,
    nominal band (dotted) and hard limits (dashed) over time."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = [n for n in entries if n]
    for name in names:
        if name not in record.entries:
            raise InputError(f"unknown entry {name!r}; record has {record.entries}")
    fig, axes = plt.subplots(len(names), 1, sharex=True,
                             figsize=(8, 2.2 * len(names)), squeeze=False)
    xi = record.xi if record.xi else 1.0
    for ax, name in zip(axes[:, 0], names):
        k = record.entries.index(name)
        ax.plot(record.time_s, record.norm[:, k], lw=0.9, label=name)
        if name in record.tracked:
            j = record.tracked.index(name)
            ax.plot(record.time_s, record.refs[:, j], lw=0.9, ls="-",
                    color="tab:green", alpha=0.8, label="reference")
        lo = float(record.norm[:, k].min())
        for level, style in ((1.0, "--"), (1.0 / xi, ":")):
            ax.axhline(level, color="red" if style == "--" else "orange",
                       ls=style, lw=0.8)
            if lo < 0:
                ax.axhline(-level, color="red" if style == "--" else "orange",
                           ls=style, lw=0.8)
        ax.set_ylabel(name)
        ax.legend(loc="upper right", fontsize=8)
    axes[-1, 0].set_xlabel("time [s]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
