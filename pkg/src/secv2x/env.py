"""Multi-agent environment tying topology, channel and rate models together.

Each V2V link is an agent. Every subframe the agents pick (subchannel, power
level) actions, the induced allocation is scored by the rate model, and all
agents receive the same scalar reward. Large-scale channel state refreshes on
a configurable subframe period as vehicles move.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import (ChannelParams, ShadowState, compute_gains,
                      link_displacements, update_shadowing_per_link)
from .comm import (Allocation, CommParams, EfficiencyReport, RateReport,
                   dbm_to_mw, evaluate)
from .topology import ROLE_MEMBER, Topology, advance, derive_links


def state_dim(num_subchannels: int) -> int:
    """Agent observation length: own gain, N V2I-to-BS gains, own gain to the
    eavesdropper, N V2I-to-eavesdropper gains, N interference readings and N
    platoon occupancy counts."""
    return 4 * num_subchannels + 2


@dataclass
class EnvParams:
    subframes_per_episode: int = 1000
    refresh_every: int = 100       # subframes between mobility + channel updates
    subframe_s: float = 0.001
    log_floor: float = 1e-30

    def validate(self) -> None:
        if self.subframes_per_episode < 0:
            raise ValueError("subframes_per_episode must be non-negative")
        if self.refresh_every <= 0:
            raise ValueError("refresh_every must be positive")
        if self.subframe_s <= 0:
            raise ValueError("subframe_s must be positive")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


def build_allocation(joint_action: list[tuple[int, int]], num_links: int,
                     comm: CommParams) -> Allocation:
    """Turn per-agent (subchannel, power level) picks into an Allocation."""
    if len(joint_action) != num_links:
        raise ValueError(f"expected {num_links} actions, got {len(joint_action)}")
    a = np.zeros((num_links, comm.num_subchannels), dtype=np.int8)
    power_level = np.zeros(num_links, dtype=np.int64)
    for m, (sub, lvl) in enumerate(joint_action):
        if not 0 <= sub < comm.num_subchannels:
            raise ValueError(f"agent {m}: subchannel {sub} out of range")
        if not 0 <= lvl < comm.num_power_levels:
            raise ValueError(f"agent {m}: power level {lvl} out of range")
        a[m, sub] = 1
        power_level[m] = lvl
    return Allocation.from_params(a, power_level, comm)


class PlatoonEnv:
    """Sequential simulation state machine for one vehicular scenario.

    Owns the mobility state, the shadowing process and the most recent
    channel gains. History buffers (last-subframe interference and platoon
    subchannel occupancy) feed the agent observations and reset at episode
    boundaries.
    """

    def __init__(self, topology: Topology, comm: CommParams,
                 channel: ChannelParams, params: EnvParams,
                 rng: np.random.Generator):
        comm.validate()
        channel.validate()
        params.validate()
        self.topology = topology
        self.comm = comm
        self.channel = channel
        self.params = params
        self.rng = rng
        self.num_agents = topology.num_v2v_links
        self.num_subchannels = comm.num_subchannels
        if self.num_agents == 0:
            raise ValueError("topology has no V2V links")

        self.shadow = ShadowState(params=channel, rng=rng)
        self.gains = compute_gains(topology, self.shadow, channel)
        self._same_platoon = self._platoon_matrix()
        self._roles = np.array([topology.role_of_link(m)
                                for m in range(self.num_agents)])
        self.subframe = 0
        self.reset_history()

    def _platoon_matrix(self) -> np.ndarray:
        pid = np.array([self.topology.platoon_of_vehicle(tx)
                        for tx, _ in self.topology.v2v_links])
        same = pid[:, None] == pid[None, :]
        np.fill_diagonal(same, False)
        return same

    def reset_history(self) -> None:
        """Clear observation history at an episode boundary."""
        m, n = self.num_agents, self.num_subchannels
        self.i_meas = np.zeros((m, n))
        self.n_occ = np.zeros((m, n))
        self.has_history = False

    # -- observations -----------------------------------------------------

    def _log10(self, x: np.ndarray) -> np.ndarray:
        return np.log10(np.maximum(x, self.params.log_floor))

    def observe(self, m: int) -> np.ndarray:
        if not 0 <= m < self.num_agents:
            raise IndexError(f"agent index {m} out of range")
        g = self.gains
        if self.has_history:
            i_block = self._log10(self.i_meas[m])
            n_block = self.n_occ[m]
        else:
            i_block = np.zeros(self.num_subchannels)
            n_block = np.zeros(self.num_subchannels)
        return np.concatenate([
            [self._log10(g.h_m[m:m + 1])[0]],
            self._log10(g.h_n_b),
            [self._log10(g.h_m_e[m:m + 1])[0]],
            self._log10(g.h_n_e),
            i_block,
            n_block,
        ])

    def observe_all(self) -> np.ndarray:
        return np.stack([self.observe(m) for m in range(self.num_agents)])

    def action_mask(self, m: int) -> np.ndarray:
        """Boolean mask over the joint (subchannel x power level) action ids.

        Action id = subchannel * num_levels + level index. Platoon members
        may not use the top power level; leaders use the full table.
        """
        levels = self.comm.num_power_levels
        mask = np.ones(self.num_subchannels * levels, dtype=bool)
        if self._roles[m] == ROLE_MEMBER:
            mask[::levels] = False
        return mask

    def action_to_pair(self, action_id: int) -> tuple[int, int]:
        return divmod(int(action_id), self.comm.num_power_levels)

    # -- dynamics ----------------------------------------------------------

    def step(self, joint_action: list[tuple[int, int]]
             ) -> tuple[RateReport, EfficiencyReport, float, np.ndarray]:
        """Apply one subframe of actions; returns (rates, efficiency, shared
        reward, next observations)."""
        for m, (_, lvl) in enumerate(joint_action):
            if self._roles[m] == ROLE_MEMBER and lvl == 0:
                raise ValueError(f"agent {m} is a platoon member; top power "
                                 "level is reserved for leaders")
        alloc = build_allocation(joint_action, self.num_agents, self.comm)
        report, eff, rew = evaluate(alloc, self.gains, self.comm,
                                    self.channel.noise_mw)

        self._record_history(alloc)
        self.subframe += 1
        if self.subframe % self.params.refresh_every == 0:
            self._refresh_channel()
        return report, eff, rew, self.observe_all()

    def _record_history(self, alloc: Allocation) -> None:
        """Per-receiver interference and platoon occupancy per subchannel."""
        p = alloc.p_v2v_mw()
        a = alloc.a.astype(float)
        # V2I transmitter n always occupies subchannel n.
        v2i_part = dbm_to_mw(self.comm.v2i_power_dbm) * self.gains.h_n_m.T
        cross = (self.gains.h_m_j * p[None, :]) @ a
        own = (np.diagonal(self.gains.h_m_j) * p)[:, None] * a
        self.i_meas = v2i_part + cross - own
        self.n_occ = self._same_platoon.astype(float) @ a
        self.has_history = True

    def _refresh_channel(self) -> None:
        dt = self.params.refresh_every * self.params.subframe_s
        disp = link_displacements(self.topology, dt)
        advance(self.topology, dt)
        update_shadowing_per_link(self.shadow, disp)
        derive_links(self.topology, self.num_subchannels)
        self.gains = compute_gains(self.topology, self.shadow, self.channel)


@dataclass
class EpisodeMetrics:
    """Per-episode aggregates, means over subframes (loss over train steps)."""
    mean_reward: float = 0.0
    mean_objective: float = 0.0
    mean_zeta_v2v: float = 0.0
    mean_zeta_v2i: float = 0.0
    mean_secrecy: float = 0.0
    mean_loss: float = float("nan")
    losses: list[float] = field(default_factory=list)
    subframe_log: list[tuple] = field(default_factory=list)


def run_episode(env: PlatoonEnv, policy, epsilon: float, train: bool,
                train_every: int = 1, log_subframes: bool = False,
                episode_index: int = 0) -> EpisodeMetrics:
    """Run one episode of the observe/act/score loop.

    ``policy`` provides act/record/train_step (see baselines); training
    happens every ``train_every`` subframes once replay is warm. The reward
    each subframe is shared by every agent.
    """
    t_total = env.params.subframes_per_episode
    metrics = EpisodeMetrics()
    if t_total == 0:
        return metrics

    rewards = np.empty(t_total)
    objectives = np.empty(t_total)
    zv2v = np.empty(t_total)
    zv2i = np.empty(t_total)
    secrecy = np.empty(t_total)
    losses: list[float] = []

    env.reset_history()
    states = env.observe_all()
    for t in range(t_total):
        joint, action_ids = policy.act(states, epsilon)
        report, eff, rew, next_states = env.step(joint)
        policy.record(states, action_ids, rew, next_states)
        if train and (t + 1) % train_every == 0:
            loss = policy.train_step()
            if loss is not None:
                losses.append(loss)

        rewards[t] = rew
        objectives[t] = eff.objective
        zv2v[t] = eff.zeta_v2v
        zv2i[t] = eff.zeta_v2i
        secrecy[t] = report.r_m_sec.mean()
        if log_subframes:
            metrics.subframe_log.append(
                (episode_index, t, rew, eff.objective, eff.zeta_v2v,
                 eff.zeta_v2i, report.min_secrecy,
                 int(bool(np.all(report.r_m_sec >= env.comm.r_threshold)))))
        states = next_states

    metrics.mean_reward = float(rewards.mean())
    metrics.mean_objective = float(objectives.mean())
    metrics.mean_zeta_v2v = float(zv2v.mean())
    metrics.mean_zeta_v2i = float(zv2i.mean())
    metrics.mean_secrecy = float(secrecy.mean())
    metrics.mean_loss = float(np.mean(losses)) if losses else float("nan")
    metrics.losses = losses
    return metrics
