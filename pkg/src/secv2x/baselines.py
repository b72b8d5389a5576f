"""Allocation policies: the learned joint policy and the two baselines.

All three expose the same interface consumed by the episode loop:

    act(states, epsilon) -> (joint_action, internal_action_ids)
    record(states, action_ids, reward, next_states)
    train_step() -> mean loss across agents, or None when not training

"seed" learns subchannel and power jointly, "dqn-wopa" learns the subchannel
only at a fixed role-dependent power, "random" draws uniformly from each
agent's allowed set.
"""

from __future__ import annotations

import os

import numpy as np

from .dqn import (DQNParams, QNetwork, ReplayBuffer, loss_and_gradients,
                  rmsprop_step, save_qnetwork, select_action, sync_target)
from .env import PlatoonEnv, state_dim
from .topology import ROLE_MEMBER

POLICY_NAMES = ("seed", "dqn-wopa", "random")


class _DQNPolicyBase:
    """Shared per-agent network/replay machinery for the learning policies."""

    def __init__(self, env: PlatoonEnv, params: DQNParams,
                 num_actions: int, masks: list[np.ndarray],
                 seed_seq: np.random.SeedSequence):
        params.validate()
        self.env = env
        self.params = params
        self.num_agents = env.num_agents
        self.masks = masks
        self.num_actions = num_actions
        dim = state_dim(env.num_subchannels)

        init_seq, act_seq, sample_seq = seed_seq.spawn(3)
        self.act_rngs = [np.random.default_rng(s) for s in act_seq.spawn(self.num_agents)]
        self.sample_rngs = [np.random.default_rng(s) for s in sample_seq.spawn(self.num_agents)]
        self.nets = [QNetwork(dim, num_actions, params.hidden_sizes,
                              np.random.default_rng(s))
                     for s in init_seq.spawn(self.num_agents)]
        self.targets = [net.clone() for net in self.nets]
        self.buffers = [ReplayBuffer(params.replay_capacity, dim)
                        for _ in range(self.num_agents)]
        self.gradient_steps = 0

    def _select_ids(self, states: np.ndarray, epsilon: float) -> list[int]:
        return [select_action(self.nets[m], states[m], epsilon,
                              self.masks[m], self.act_rngs[m])
                for m in range(self.num_agents)]

    def record(self, states, action_ids, reward, next_states) -> None:
        for m in range(self.num_agents):
            self.buffers[m].push(states[m], action_ids[m], reward, next_states[m])

    def train_step(self) -> float | None:
        if len(self.buffers[0]) < self.params.batch_size:
            return None
        losses = np.empty(self.num_agents)
        for m in range(self.num_agents):
            batch = self.buffers[m].sample(self.params.batch_size, self.sample_rngs[m])
            loss, gw, gb = loss_and_gradients(self.nets[m], self.targets[m],
                                              *batch, self.params.gamma,
                                              next_mask=self.masks[m])
            rmsprop_step(self.nets[m], gw, gb, self.params)
            losses[m] = loss
        self.gradient_steps += 1
        for m in range(self.num_agents):
            sync_target(self.nets[m], self.targets[m], self.gradient_steps,
                        self.params.target_sync_period)
        return float(losses.mean())

    def save_checkpoints(self, out_dir: str, prefix: str) -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        for m, net in enumerate(self.nets):
            path = os.path.join(out_dir, f"{prefix}_agent{m:03d}.qnet")
            save_qnetwork(path, net)
            paths.append(path)
        return paths


class SeedPolicy(_DQNPolicyBase):
    """Joint subchannel and power selection, one DQN per V2V link."""

    def __init__(self, env: PlatoonEnv, params: DQNParams,
                 seed_seq: np.random.SeedSequence):
        masks = [env.action_mask(m) for m in range(env.num_agents)]
        num_actions = env.num_subchannels * env.comm.num_power_levels
        super().__init__(env, params, num_actions, masks, seed_seq)

    def act(self, states: np.ndarray, epsilon: float):
        ids = self._select_ids(states, epsilon)
        joint = [self.env.action_to_pair(a) for a in ids]
        return joint, ids


class WopaPolicy(_DQNPolicyBase):
    """Subchannel-only DQN; transmit power pinned to the role maximum.

    Leaders and free vehicles use the top table entry, members the next one
    down (the highest level open to them).
    """

    def __init__(self, env: PlatoonEnv, params: DQNParams,
                 seed_seq: np.random.SeedSequence,
                 leader_level: int = 0, member_level: int = 1):
        masks = [np.ones(env.num_subchannels, dtype=bool)
                 for _ in range(env.num_agents)]
        super().__init__(env, params, env.num_subchannels, masks, seed_seq)
        self.fixed_levels = [
            member_level if env.topology.role_of_link(m) == ROLE_MEMBER else leader_level
            for m in range(env.num_agents)]

    def act(self, states: np.ndarray, epsilon: float):
        ids = self._select_ids(states, epsilon)
        joint = [(sub, self.fixed_levels[m]) for m, sub in enumerate(ids)]
        return joint, ids


class RandomPolicy:
    """Uniform independent draw from each agent's allowed action set."""

    def __init__(self, env: PlatoonEnv, rng: np.random.Generator):
        self.env = env
        self.rng = rng
        self.candidates = [np.flatnonzero(env.action_mask(m))
                           for m in range(env.num_agents)]

    def act(self, states: np.ndarray, epsilon: float):
        ids = [int(self.rng.choice(c)) for c in self.candidates]
        joint = [self.env.action_to_pair(a) for a in ids]
        return joint, ids

    def record(self, states, action_ids, reward, next_states) -> None:
        pass

    def train_step(self) -> None:
        return None

    def save_checkpoints(self, out_dir: str, prefix: str) -> list[str]:
        return []


def make_policy(name: str, env: PlatoonEnv, dqn_params: DQNParams,
                seed_seq: np.random.SeedSequence):
    if name == "seed":
        return SeedPolicy(env, dqn_params, seed_seq)
    if name == "dqn-wopa":
        return WopaPolicy(env, dqn_params, seed_seq)
    if name == "random":
        return RandomPolicy(env, np.random.default_rng(seed_seq))
    raise ValueError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
