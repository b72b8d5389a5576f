"""Radio channel model: path loss, spatially correlated shadowing, link gains.

All gains are kept in linear (dimensionless) units once assembled; powers in
the rate formulas are milliwatts, so noise is converted from dBm exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .topology import Topology, segments_clear

BS_NODE = "bs"
EVE_NODE = "eve"


@dataclass
class ChannelParams:
    carrier_frequency_hz: float = 2.0e9
    noise_power_dbm: float = -114.0
    bs_antenna_gain_dbi: float = 8.0
    eavesdropper_antenna_gain_dbi: float = 6.0
    vehicle_antenna_gain_dbi: float = 3.0
    shadow_std_los_db: float = 3.0
    shadow_std_nlos_db: float = 4.0
    decorrelation_distance_m: float = 10.0
    # urban street-level loss: a + b*log10(d_m) + c*log10(fc_GHz), NLOS adds a
    # fixed penalty; vehicle-to-BS uses the macro form a_bs + b_bs*log10(d_km)
    pathloss_los_a_db: float = 38.77
    pathloss_los_b_db: float = 16.7
    pathloss_los_c_db: float = 18.2
    pathloss_nlos_penalty_db: float = 15.0
    pathloss_bs_a_db: float = 128.1
    pathloss_bs_b_db: float = 37.6
    min_link_distance_m: float = 1.0
    # fixed model identifiers (echoed by validate-config, single option each)
    path_loss_model: str = "los-nlos"
    shadow_fading: str = "lognormal"

    @property
    def noise_mw(self) -> float:
        return 10.0 ** (self.noise_power_dbm / 10.0)

    def validate(self):
        if self.decorrelation_distance_m <= 0:
            raise ValueError("decorrelation_distance_m must be positive")
        if self.min_link_distance_m <= 0:
            raise ValueError("min_link_distance_m must be positive")
        if self.shadow_std_los_db < 0 or self.shadow_std_nlos_db < 0:
            raise ValueError("shadowing standard deviations must be >= 0")
        if self.pathloss_nlos_penalty_db < 0:
            raise ValueError("pathloss_nlos_penalty_db must be >= 0")
        if self.path_loss_model != "los-nlos":
            raise ValueError(f"unsupported path_loss_model {self.path_loss_model!r}")
        if self.shadow_fading != "lognormal":
            raise ValueError(f"unsupported shadow_fading {self.shadow_fading!r}")
        for name in ("carrier_frequency_hz",):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not math.isfinite(self.noise_mw) or self.noise_mw <= 0:
            raise ValueError("noise power must convert to a positive linear value")


def path_loss_db(tx_pos, rx_pos, los: bool, params: ChannelParams) -> float:
    """Street-level path loss in dB; distances below 1 m are clamped up."""
    d = max(float(np.linalg.norm(np.asarray(rx_pos) - np.asarray(tx_pos))),
            params.min_link_distance_m)
    fc_ghz = params.carrier_frequency_hz / 1e9
    pl = (params.pathloss_los_a_db
          + params.pathloss_los_b_db * math.log10(d)
          + params.pathloss_los_c_db * math.log10(fc_ghz))
    if not los:
        pl += params.pathloss_nlos_penalty_db
    return pl


def bs_path_loss_db(pos, bs_pos, params: ChannelParams) -> float:
    """Macro-cell path loss in dB for vehicle-to-base-station links."""
    d = max(float(np.linalg.norm(np.asarray(bs_pos) - np.asarray(pos))),
            params.min_link_distance_m)
    return params.pathloss_bs_a_db + params.pathloss_bs_b_db * math.log10(d / 1000.0)


@dataclass
class ShadowState:
    """Per-link lognormal shadowing (dB domain), exponentially correlated.

    Values are keyed by (tx, rx) node ids; the per-link sigma is fixed when
    the entry is first created. The state owns its noise stream so repeated
    gain assembly is reproducible.
    """
    params: ChannelParams
    rng: np.random.Generator
    values: dict = field(default_factory=dict)
    sigmas: dict = field(default_factory=dict)
    last_displacement_m: float = 0.0

    def get_or_init(self, key, sigma_db: float) -> float:
        if key not in self.values:
            self.sigmas[key] = sigma_db
            self.values[key] = float(self.rng.normal(0.0, sigma_db))
        return self.values[key]

    def update_link(self, key, displacement_m: float, rng: np.random.Generator | None = None):
        if key not in self.values:
            return
        rng = rng or self.rng
        rho = math.exp(-displacement_m / self.params.decorrelation_distance_m)
        sigma = self.sigmas[key]
        self.values[key] = rho * self.values[key] + math.sqrt(
            max(0.0, 1.0 - rho * rho)) * float(rng.normal(0.0, sigma))


def update_shadowing(state: ShadowState, displacement_m: float,
                     rng: np.random.Generator | None = None) -> ShadowState:
    """Advance every tracked link by the same relative displacement.

    new = rho*old + sqrt(1-rho^2)*fresh, rho = exp(-d/decorrelation), which
    preserves the per-link marginal N(0, sigma^2).
    """
    if displacement_m < 0:
        raise ValueError("displacement must be >= 0")
    for key in state.values:
        state.update_link(key, displacement_m, rng)
    state.last_displacement_m = displacement_m
    return state


def update_shadowing_per_link(state: ShadowState, displacements: dict,
                              rng: np.random.Generator | None = None) -> ShadowState:
    """Advance tracked links by link-specific relative displacements."""
    for key in state.values:
        state.update_link(key, float(displacements.get(key, 0.0)), rng)
    return state


@dataclass
class ChannelGains:
    """Linear power gains for one subframe.

    h_m_j[m, j] is the gain from the transmitter of V2V link j to the
    receiver of V2V link m; its diagonal equals h_m. h_n_m[n, m] is the gain
    from V2I transmitter n to the receiver of V2V link m.
    """
    h_m: np.ndarray      # (M,)  desired V2V gains
    h_n_b: np.ndarray    # (N,)  V2I transmitter -> BS
    h_m_b: np.ndarray    # (M,)  V2V transmitter -> BS
    h_n_m: np.ndarray    # (N, M) V2I transmitter -> V2V receiver
    h_m_j: np.ndarray    # (M, M) V2V transmitter j -> V2V receiver m
    h_m_e: np.ndarray    # (M,)  V2V transmitter -> eavesdropper
    h_n_e: np.ndarray    # (N,)  V2I transmitter -> eavesdropper

    @property
    def num_v2v(self) -> int:
        return len(self.h_m)

    @property
    def num_v2i(self) -> int:
        return len(self.h_n_b)

    def check(self):
        for name in ("h_m", "h_n_b", "h_m_b", "h_n_m", "h_m_j", "h_m_e", "h_n_e"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
                raise ValueError(f"gain family {name} must be strictly positive and finite")


def _linear_gain(pl_db: np.ndarray, shadow_db: np.ndarray, ant_gain_db: float) -> np.ndarray:
    return 10.0 ** ((-pl_db + shadow_db + ant_gain_db) / 10.0)


def compute_gains(topology: Topology, shadow: ShadowState, params: ChannelParams) -> ChannelGains:
    """Assemble the seven gain families for the current vehicle positions.

    Street-level links get the LOS/NLOS loss (LOS when the segment crosses no
    building block) plus per-link shadowing; BS links get the macro loss with
    NLOS-sigma shadowing. Antenna gains: vehicle 3 dBi, BS 8 dBi, eve 6 dBi
    by default.
    """
    links = topology.v2v_links
    M = len(links)
    N = len(topology.v2i_links)
    if M == 0 or N == 0:
        raise ValueError("derive_links must run before compute_gains")

    pos = topology.positions()
    tx_pos = pos[[t for t, _ in links]]
    rx_pos = pos[[r for _, r in links]]
    v2i_pos = pos[topology.v2i_links]
    eve = topology.eavesdropper_pos
    bs = topology.bs_pos
    fc_ghz = params.carrier_frequency_hz / 1e9
    g_vv = 2 * params.vehicle_antenna_gain_dbi
    g_vb = params.vehicle_antenna_gain_dbi + params.bs_antenna_gain_dbi
    g_ve = params.vehicle_antenna_gain_dbi + params.eavesdropper_antenna_gain_dbi

    def street(p: np.ndarray, q: np.ndarray, tx_ids, rx_ids, ant_db: float) -> np.ndarray:
        d = np.maximum(np.linalg.norm(q - p, axis=1), params.min_link_distance_m)
        los = segments_clear(p, q, topology.blocks)
        pl = (params.pathloss_los_a_db + params.pathloss_los_b_db * np.log10(d)
              + params.pathloss_los_c_db * math.log10(fc_ghz))
        pl = pl + np.where(los, 0.0, params.pathloss_nlos_penalty_db)
        sh = np.empty(len(p))
        for i, (t, r) in enumerate(zip(tx_ids, rx_ids)):
            key = (t if isinstance(t, str) else int(t), r if isinstance(r, str) else int(r))
            sigma = params.shadow_std_los_db if los[i] else params.shadow_std_nlos_db
            sh[i] = shadow.get_or_init(key, sigma)
        return _linear_gain(pl, sh, ant_db)

    def to_bs(p: np.ndarray, tx_ids) -> np.ndarray:
        d = np.maximum(np.linalg.norm(bs[None, :] - p, axis=1), params.min_link_distance_m)
        pl = params.pathloss_bs_a_db + params.pathloss_bs_b_db * np.log10(d / 1000.0)
        sh = np.array([shadow.get_or_init((int(t), BS_NODE), params.shadow_std_nlos_db)
                       for t in tx_ids])
        return _linear_gain(pl, sh, g_vb)

    tx_ids = [t for t, _ in links]
    rx_ids = [r for _, r in links]
    v2i_ids = list(topology.v2i_links)

    # dense M x M family: transmitter of link j -> receiver of link m
    pj = np.repeat(tx_pos, M, axis=0)           # rows ordered (m, j)
    pm = np.tile(rx_pos, (M, 1))
    pair_tx = np.repeat(tx_ids, M)
    pair_rx = np.tile(rx_ids, M)
    h_m_j = street(pj, pm, pair_tx, pair_rx, g_vv).reshape(M, M).T

    nm_tx = np.repeat(v2i_pos, M, axis=0)
    nm_rx = np.tile(rx_pos, (N, 1))
    h_n_m = street(nm_tx, nm_rx, np.repeat(v2i_ids, M), np.tile(rx_ids, N), g_vv).reshape(N, M)

    eve_rows = np.tile(eve, (M, 1))
    h_m_e = street(tx_pos, eve_rows, tx_ids, [EVE_NODE] * M, g_ve)
    h_n_e = street(v2i_pos, np.tile(eve, (N, 1)), v2i_ids, [EVE_NODE] * N, g_ve)

    gains = ChannelGains(
        h_m=np.diag(h_m_j).copy(),
        h_n_b=to_bs(v2i_pos, v2i_ids),
        h_m_b=to_bs(tx_pos, tx_ids),
        h_n_m=h_n_m,
        h_m_j=h_m_j,
        h_m_e=h_m_e,
        h_n_e=h_n_e,
    )
    gains.check()
    return gains


def link_displacements(topology: Topology, dt: float) -> dict:
    """Relative displacement per tracked (tx, rx) node pair over dt.

    Static nodes (BS, eavesdropper) contribute zero motion; two vehicles
    moving with identical velocity have zero relative displacement.
    """
    from .topology import displacement_vectors

    disp = displacement_vectors(topology, dt)
    zero = np.zeros(2)

    def vec(node):
        return disp[node] if isinstance(node, (int, np.integer)) else zero

    out = {}
    links = topology.v2v_links
    tx_ids = [t for t, _ in links]
    rx_ids = [r for _, r in links]
    nodes = set()
    for t in tx_ids + list(topology.v2i_links):
        for r in rx_ids + [BS_NODE, EVE_NODE]:
            nodes.add((t, r))
    for key in nodes:
        out[key] = float(np.linalg.norm(vec(key[0]) - vec(key[1])))
    return out
