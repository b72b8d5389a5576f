import numpy as np
import pytest
from dataclasses import replace

from secv2x.channel import ChannelGains
from secv2x.config import ExperimentConfig


def random_gains(rng: np.random.Generator, m: int, n: int) -> ChannelGains:
    """Synthetic positive gains spanning realistic orders of magnitude."""
    def draw(*shape):
        return 10.0 ** rng.uniform(-12.0, -4.0, size=shape)

    h_m_j = draw(m, m)
    h_m = draw(m)
    np.fill_diagonal(h_m_j, h_m)
    return ChannelGains(h_m=h_m, h_n_b=draw(n), h_m_b=draw(m),
                        h_n_m=draw(n, m), h_m_j=h_m_j,
                        h_m_e=draw(m), h_n_e=draw(n))


def desk_config(**run_overrides) -> ExperimentConfig:
    """Small-scale training profile used by the fast suites.

    4-vehicle platoons on 5 subchannels keep every sweep count feasible
    (counts are platoon multiples, so eligible V2I transmitters = count/4)
    while leaving room for collision-free same-platoon allocation. Circuit
    power at 23 dBm dominates the energy budget so efficiency compares
    allocations rather than power-table spread. The level table stops at
    5 dBm: levels below that are never efficient here (circuit power
    swamps the transmit saving long before the rate loss pays off), they
    only pad the action space. Replay holds a few episodes of shared
    transitions and exploration decays over 80% of training, both sized
    so value estimates keep pace with the improving behaviour policy.
    """
    cfg = ExperimentConfig()
    cfg = replace(
        cfg,
        topology=replace(cfg.topology, platoon_size=4),
        comm=replace(cfg.comm, num_subchannels=5, circuit_power_dbm=23.0,
                     v2v_power_levels_dbm=(23.0, 15.0, 10.0, 5.0)),
        dqn=replace(cfg.dqn, hidden_sizes=(64, 32, 16), batch_size=64,
                    replay_capacity=1920, epsilon_decay_fraction=0.8),
        env=replace(cfg.env, subframes_per_episode=24, refresh_every=4),
        run=replace(cfg.run, **{"train_every": 1, "save_checkpoints": False,
                                **run_overrides}),
    )
    return cfg.validate()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
