"""Sweep orchestration and CSV persistence.

A sweep cell is one (policy, vehicle count, seed) triple: fresh topology,
fresh agents, a fixed number of training episodes. Cells are seeded
independently from their coordinates so any subset of the sweep reproduces
the same numbers. All floats are written with 9 significant digits, which
makes reruns byte-identical.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .baselines import POLICY_NAMES, make_policy
from .config import ExperimentConfig
from .dqn import epsilon_by_step
from .env import PlatoonEnv, run_episode
from .topology import derive_links, generate_topology

SCHEMA_LINE = "# schema=1"

METRICS_COLUMNS = ("policy", "vehicle_count", "seed", "episode", "mean_reward",
                   "zeta_v2v", "zeta_v2i", "network_efficiency",
                   "mean_secrecy_rate", "mean_loss")
SUMMARY_COLUMNS = ("policy", "vehicle_count", "seed", "episodes", "window",
                   "mean_reward", "zeta_v2v", "zeta_v2i", "network_efficiency",
                   "mean_secrecy_rate", "mean_loss")
SUBFRAME_COLUMNS = ("policy", "vehicle_count", "seed", "episode", "subframe",
                    "reward", "objective", "zeta_v2v", "zeta_v2i",
                    "min_secrecy", "secrecy_ok")


def format_float(x: float) -> str:
    """The one float-to-text rule used in every CSV."""
    return f"{float(x):.9g}"


def _format_cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format_float(x)


def write_csv(path, columns: tuple, rows: list) -> None:
    """Write header + rows atomically (tmp file then rename)."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write(SCHEMA_LINE + "\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_format_cell(x) for x in row) + "\n")
    os.replace(tmp, path)


def final_window(episodes: int) -> int:
    """Size of the trailing episode window used for summary averages (10%)."""
    return max(1, episodes // 10)


def _window_mean(values: list) -> float:
    finite = [v for v in values if not math.isnan(v)]
    return float(np.mean(finite)) if finite else float("nan")


@dataclass
class CellResult:
    policy: str
    vehicle_count: int
    seed: int
    metric_rows: list = field(default_factory=list)
    subframe_rows: list = field(default_factory=list)
    losses: list = field(default_factory=list)     # per gradient step, in order
    checkpoint_paths: list = field(default_factory=list)

    def summary_row(self, episodes: int) -> tuple:
        w = final_window(episodes)
        tail = self.metric_rows[-w:]
        means = [_window_mean([row[i] for row in tail]) for i in range(4, 10)]
        return (self.policy, self.vehicle_count, self.seed, episodes, w, *means)


def build_cell(config: ExperimentConfig, policy_name: str, vehicle_count: int,
               seed: int):
    """Deterministically seeded (env, policy) pair for one sweep cell."""
    policy_index = POLICY_NAMES.index(policy_name)
    root = np.random.SeedSequence([seed, vehicle_count, policy_index])
    topo_seq, env_seq, policy_seq = root.spawn(3)
    topology = generate_topology(vehicle_count, np.random.default_rng(topo_seq),
                                 config.topology)
    derive_links(topology, config.comm.num_subchannels)
    env = PlatoonEnv(topology, config.comm, config.channel, config.env,
                     np.random.default_rng(env_seq))
    policy = make_policy(policy_name, env, config.dqn, policy_seq)
    return env, policy


def run_cell(config: ExperimentConfig, policy_name: str, vehicle_count: int,
             seed: int, checkpoint_dir: str | None = None) -> CellResult:
    env, policy = build_cell(config, policy_name, vehicle_count, seed)
    run = config.run
    learning = policy_name != "random"
    total_steps = run.episodes * config.env.subframes_per_episode
    result = CellResult(policy_name, vehicle_count, seed)

    for ep in range(run.episodes):
        eps = epsilon_by_step(ep * config.env.subframes_per_episode,
                              total_steps, config.dqn) if learning else 1.0
        m = run_episode(env, policy, eps, train=learning,
                        train_every=run.train_every,
                        log_subframes=run.log_subframes, episode_index=ep)
        result.metric_rows.append((policy_name, vehicle_count, seed, ep,
                                   m.mean_reward, m.mean_zeta_v2v,
                                   m.mean_zeta_v2i, m.mean_objective,
                                   m.mean_secrecy, m.mean_loss))
        result.losses.extend(m.losses)
        for sub_row in m.subframe_log:
            result.subframe_rows.append((policy_name, vehicle_count, seed, *sub_row))

    if checkpoint_dir is not None and run.save_checkpoints:
        prefix = f"{policy_name}_v{vehicle_count}_s{seed}"
        result.checkpoint_paths = policy.save_checkpoints(checkpoint_dir, prefix)
    return result


def run_sweep(config: ExperimentConfig, progress=None) -> dict:
    """Run every (policy, count, seed) cell and write the output CSVs.

    Returns the paths written. Fails before any simulation if the output
    directory cannot be created or written.
    """
    config.validate()
    run = config.run
    out_dir = run.out_dir
    os.makedirs(out_dir, exist_ok=True)
    probe = os.path.join(out_dir, ".write_probe")
    with open(probe, "w") as f:
        f.write("ok")
    os.remove(probe)
    checkpoint_dir = os.path.join(out_dir, "checkpoints")

    metric_rows: list = []
    summary_rows: list = []
    subframe_rows: list = []
    for policy_name in run.policies:
        for vehicle_count in run.vehicle_counts:
            for seed in run.seeds:
                if progress is not None:
                    progress(f"cell policy={policy_name} vehicles={vehicle_count} "
                             f"seed={seed}")
                cell = run_cell(config, policy_name, vehicle_count, seed,
                                checkpoint_dir=checkpoint_dir)
                metric_rows.extend(cell.metric_rows)
                summary_rows.append(cell.summary_row(run.episodes))
                subframe_rows.extend(cell.subframe_rows)

    paths = {
        "metrics": os.path.join(out_dir, "metrics.csv"),
        "summary": os.path.join(out_dir, "summary.csv"),
    }
    write_csv(paths["metrics"], METRICS_COLUMNS, metric_rows)
    write_csv(paths["summary"], SUMMARY_COLUMNS, summary_rows)
    if run.log_subframes:
        paths["subframes"] = os.path.join(out_dir, "subframes.csv")
        write_csv(paths["subframes"], SUBFRAME_COLUMNS, subframe_rows)
    return paths
