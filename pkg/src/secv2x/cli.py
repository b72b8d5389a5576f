"""Command line entry point.

Subcommands:
    run              full sweep -> metrics.csv / summary.csv
    oracle           exhaustive search on a tiny generated instance
    validate-config  echo the fully resolved configuration
    demo             one short episode with per-subframe text output
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .baselines import POLICY_NAMES, make_policy
from .channel import ShadowState, compute_gains
from .config import ExperimentConfig, dump_config, load_config, set_key
from .env import PlatoonEnv, run_episode
from .experiment import format_float, run_sweep
from .oracle import exhaustive_best
from .topology import derive_links, generate_topology


def _parse_int_list(text: str) -> tuple:
    return tuple(int(p) for p in text.split(",") if p.strip())


def _load(args) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config is not None:
        config = load_config(args.config)
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        config = set_key(config, key.strip(), value)
    if getattr(args, "out", None) is not None:
        config = replace(config, run=replace(config.run, out_dir=args.out))
    if getattr(args, "seed", None) is not None:
        config = replace(config, run=replace(config.run, seeds=(args.seed,)))
    if getattr(args, "policy", None) is not None:
        config = replace(config, run=replace(config.run, policies=(args.policy,)))
    if getattr(args, "vehicles", None) is not None:
        config = replace(config, run=replace(
            config.run, vehicle_counts=_parse_int_list(args.vehicles)))
    if getattr(args, "episodes", None) is not None:
        config = replace(config, run=replace(config.run, episodes=args.episodes))
    return config.validate()


def _cmd_run(args) -> int:
    config = _load(args)
    paths = run_sweep(config, progress=lambda msg: print(msg, flush=True))
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return 0


def _cmd_validate_config(args) -> int:
    config = _load(args)
    sys.stdout.write(dump_config(config))
    return 0


def _cmd_oracle(args) -> int:
    config = _load(args)
    if args.m < 2:
        raise ValueError("--m must be >= 2 (one platoon of that size)")
    if args.n < 1:
        raise ValueError("--n must be >= 1")
    levels = config.comm.v2v_power_levels_dbm[:args.levels]
    if len(levels) < args.levels:
        raise ValueError("--levels exceeds the configured power table")
    comm = replace(config.comm, num_subchannels=args.n,
                   v2v_power_levels_dbm=tuple(levels))
    topo_params = replace(config.topology, platoon_size=args.m)
    num_vehicles = args.m + max(0, args.n - 1)

    root = np.random.SeedSequence([args.seed, args.m, args.n])
    topo_rng, shadow_rng = (np.random.default_rng(s) for s in root.spawn(2))
    topology = generate_topology(num_vehicles, topo_rng, topo_params)
    derive_links(topology, comm.num_subchannels)
    gains = compute_gains(topology, ShadowState(params=config.channel,
                                                rng=shadow_rng), config.channel)

    joint, best = exhaustive_best(gains, topology, comm, config.channel.noise_mw)
    print(f"links: {topology.num_v2v_links}  subchannels: {comm.num_subchannels}  "
          f"power levels: {len(levels)}")
    for m, (sub, lvl) in enumerate(joint):
        print(f"agent {m}: subchannel={sub} power_dbm={levels[lvl]:g}")
    print(f"best reward: {format_float(best)}")
    return 0


def _cmd_demo(args) -> int:
    config = _load(args)
    config = replace(config, env=replace(config.env,
                                         subframes_per_episode=args.subframes))
    policy_name = config.run.policies[0]
    vehicle_count = config.run.vehicle_counts[0]
    seed = config.run.seeds[0]
    print(f"demo: policy={policy_name} vehicles={vehicle_count} seed={seed}")

    root = np.random.SeedSequence([seed, vehicle_count, POLICY_NAMES.index(policy_name)])
    topo_seq, env_seq, policy_seq = root.spawn(3)
    topology = generate_topology(vehicle_count, np.random.default_rng(topo_seq),
                                 config.topology)
    derive_links(topology, config.comm.num_subchannels)
    env = PlatoonEnv(topology, config.comm, config.channel, config.env,
                     np.random.default_rng(env_seq))
    policy = make_policy(policy_name, env, config.dqn, policy_seq)

    states = env.observe_all()
    for t in range(config.env.subframes_per_episode):
        joint, ids = policy.act(states, epsilon=1.0)
        report, eff, rew, next_states = env.step(joint)
        policy.record(states, ids, rew, next_states)
        states = next_states
        print(f"subframe {t:4d}  reward={format_float(rew)}  "
              f"objective={format_float(eff.objective)}  "
              f"min_secrecy={format_float(report.min_secrecy)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secv2x",
        description="Joint spectrum/power allocation simulator for platooning "
                    "V2X networks with an eavesdropper.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a single config key (repeatable)")
        p.add_argument("--seed", type=int, help="run a single seed")
        p.add_argument("--policy", choices=POLICY_NAMES,
                       help="run a single policy")

    p_run = sub.add_parser("run", help="run the configured sweep")
    common(p_run)
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--vehicles", help="comma separated vehicle counts")
    p_run.add_argument("--episodes", type=int, help="training episodes per cell")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate-config",
                           help="print the fully resolved config")
    common(p_val)
    p_val.add_argument("--out", help="output directory")
    p_val.add_argument("--vehicles", help="comma separated vehicle counts")
    p_val.add_argument("--episodes", type=int)
    p_val.set_defaults(func=_cmd_validate_config)

    p_oracle = sub.add_parser("oracle",
                              help="exhaustive search on a tiny instance")
    common(p_oracle)
    p_oracle.add_argument("--m", type=int, default=2,
                          help="platoon size (= number of V2V links)")
    p_oracle.add_argument("--n", type=int, default=2, help="subchannels")
    p_oracle.add_argument("--levels", type=int, default=2,
                          help="number of power levels from the table")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_demo = sub.add_parser("demo", help="one short episode, live text output")
    common(p_demo)
    p_demo.add_argument("--vehicles", help="vehicle count")
    p_demo.add_argument("--subframes", type=int, default=20)
    p_demo.set_defaults(func=_cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None and args.command == "oracle":
        args.seed = 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
