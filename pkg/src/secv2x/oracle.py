"""Exhaustive search over joint actions for tiny instances.

Enumerates the Cartesian product of per-agent allowed actions on fixed
channel gains and returns the reward-maximizing joint action. Intended for
verification only; instance size is capped hard.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .channel import ChannelGains
from .comm import CommParams, evaluate
from .env import build_allocation
from .topology import ROLE_MEMBER, Topology

MAX_JOINT_ACTIONS = 10 ** 6


def action_candidates(topology: Topology, comm: CommParams) -> list[list[int]]:
    """Allowed action ids per agent, id = subchannel * num_levels + level."""
    levels = comm.num_power_levels
    out = []
    for m in range(topology.num_v2v_links):
        start = 1 if topology.role_of_link(m) == ROLE_MEMBER else 0
        out.append([sub * levels + lvl
                    for sub in range(comm.num_subchannels)
                    for lvl in range(start, levels)])
    return out


def wopa_candidates(topology: Topology, comm: CommParams,
                    leader_level: int = 0, member_level: int = 1) -> list[list[int]]:
    """Subchannel-only action ids at each role's pinned power level."""
    levels = comm.num_power_levels
    out = []
    for m in range(topology.num_v2v_links):
        lvl = member_level if topology.role_of_link(m) == ROLE_MEMBER else leader_level
        out.append([sub * levels + lvl for sub in range(comm.num_subchannels)])
    return out


def exhaustive_best(gains: ChannelGains, topology: Topology, comm: CommParams,
                    noise_mw: float, candidates: list[list[int]] | None = None,
                    max_actions: int = MAX_JOINT_ACTIONS,
                    ) -> tuple[list[tuple[int, int]], float]:
    """Best (joint action, reward) over the full per-agent action product.

    Ties resolve to the lexicographically lowest id tuple. Faults when the
    product exceeds ``max_actions``.
    """
    if candidates is None:
        candidates = action_candidates(topology, comm)
    num_agents = len(candidates)
    if num_agents != gains.num_v2v:
        raise ValueError("candidate list length must match the link count")
    total = math.prod(len(c) for c in candidates)
    if total == 0:
        raise ValueError("an agent has an empty candidate set")
    if total > max_actions:
        raise ValueError(f"joint action space has {total} entries, "
                         f"exceeding the cap of {max_actions}")

    levels = comm.num_power_levels
    best_ids: tuple[int, ...] | None = None
    best_reward = -np.inf
    for ids in itertools.product(*candidates):
        joint = [divmod(a, levels) for a in ids]
        alloc = build_allocation(joint, num_agents, comm)
        _, _, rew = evaluate(alloc, gains, comm, noise_mw)
        # product iterates in lexicographic order, so strict improvement
        # keeps the lowest-id maximizer
        if rew > best_reward:
            best_reward = rew
            best_ids = ids
    assert best_ids is not None
    return [divmod(a, levels) for a in best_ids], float(best_reward)
