"""Rates, secrecy, compositive spectrum/energy efficiency, reward, constraints.

SINR arithmetic runs on linear gains with powers in milliwatts; the
efficiency ratios use powers in watts and bandwidth in hertz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelGains


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass
class CommParams:
    total_bandwidth_hz: float = 10.0e6
    num_subchannels: int = 20
    v2i_power_dbm: float = 23.0
    v2v_power_levels_dbm: tuple = (23.0, 15.0, 10.0, 5.0)
    circuit_power_dbm: float = 16.0
    r_threshold: float = 0.1
    lambda_alpha: float = 0.9
    lambda_beta: float = 0.1

    @property
    def bandwidth_per_subchannel_hz(self) -> float:
        return self.total_bandwidth_hz / self.num_subchannels

    @property
    def num_power_levels(self) -> int:
        return len(self.v2v_power_levels_dbm)

    def validate(self):
        if abs(self.lambda_alpha + self.lambda_beta - 1.0) > 1e-12:
            raise ValueError("lambda_alpha + lambda_beta must equal 1")
        if not (0.0 <= self.lambda_alpha <= 1.0):
            raise ValueError("lambda_alpha must lie in [0, 1]")
        if self.num_subchannels < 1:
            raise ValueError("num_subchannels must be >= 1")
        if self.total_bandwidth_hz <= 0:
            raise ValueError("total_bandwidth_hz must be positive")
        if len(self.v2v_power_levels_dbm) < 2:
            raise ValueError("need at least two V2V power levels")
        if list(self.v2v_power_levels_dbm) != sorted(self.v2v_power_levels_dbm, reverse=True):
            raise ValueError("v2v_power_levels_dbm must be sorted highest first")
        if self.r_threshold < 0:
            raise ValueError("r_threshold must be >= 0")


@dataclass
class Allocation:
    """Binary subchannel-reuse matrix plus the per-link power choice.

    Carries the power tables so a single allocation is self-contained for
    rate evaluation.
    """
    a: np.ndarray             # (M, N) binary
    power_level: np.ndarray   # (M,) index into p_v2v_levels_dbm
    p_v2i_dbm: float = 23.0
    p_v2v_levels_dbm: tuple = (23.0, 15.0, 10.0, 5.0)
    p_circuit_dbm: float = 16.0

    @classmethod
    def from_params(cls, a, power_level, params: CommParams) -> "Allocation":
        return cls(np.asarray(a, dtype=np.int8), np.asarray(power_level, dtype=np.int64),
                   params.v2i_power_dbm, tuple(params.v2v_power_levels_dbm),
                   params.circuit_power_dbm)

    @property
    def num_links(self) -> int:
        return self.a.shape[0]

    @property
    def num_subchannels(self) -> int:
        return self.a.shape[1]

    def p_v2v_mw(self) -> np.ndarray:
        table = np.array([dbm_to_mw(p) for p in self.p_v2v_levels_dbm])
        return table[self.power_level]

    def p_v2v_watt(self) -> np.ndarray:
        return self.p_v2v_mw() / 1000.0

    def check(self):
        if not np.all((self.a == 0) | (self.a == 1)):
            raise ValueError("allocation entries must be binary")
        if np.any(self.a.sum(axis=1) > 1):
            raise ValueError("each V2V link may reuse at most one subchannel")
        if np.any(self.power_level < 0) or np.any(self.power_level >= len(self.p_v2v_levels_dbm)):
            raise ValueError("power level index out of table range")


@dataclass
class RateReport:
    r_n: np.ndarray       # (N,) V2I rates, bps/Hz
    r_m: np.ndarray       # (M,) V2V rates
    r_m_e: np.ndarray     # (M,) eavesdropping rate on each V2V link
    r_m_sec: np.ndarray   # (M,) clamped secrecy rates
    i_m: np.ndarray       # (M,) linear interference at each V2V receiver, mW
    i_eve: np.ndarray     # (M,) linear interference at the eavesdropper per link, mW

    @property
    def min_secrecy(self) -> float:
        return float(self.r_m_sec.min())


@dataclass
class EfficiencyReport:
    zeta_v2v: float
    zeta_v2i: float
    objective: float
    lambda_alpha: float
    lambda_beta: float
    bandwidth_per_subchannel_hz: float


@dataclass
class ConstraintReport:
    reuse_ok: np.ndarray     # (M,) row sums <= 1
    secrecy_ok: np.ndarray   # (M,) secrecy rate >= threshold
    v2i_power_ok: bool
    v2v_power_ok: bool
    binary_ok: bool

    @property
    def all_ok(self) -> bool:
        return (bool(self.reuse_ok.all()) and bool(self.secrecy_ok.all())
                and self.v2i_power_ok and self.v2v_power_ok and self.binary_ok)


def v2i_rate(n: int, alloc: Allocation, gains: ChannelGains, noise_mw: float) -> float:
    """log2(1 + P_V2I h_nb / (sum_m a_mn P_V2V(m) h_mb + noise))."""
    p_v2i = dbm_to_mw(alloc.p_v2i_dbm)
    p = alloc.p_v2v_mw()
    interference = float(np.dot(alloc.a[:, n].astype(float), p * gains.h_m_b))
    return math.log2(1.0 + p_v2i * gains.h_n_b[n] / (interference + noise_mw))


def v2v_rate(m: int, alloc: Allocation, gains: ChannelGains, noise_mw: float) -> tuple:
    """V2V rate of link m and the interference it sees.

    I_m = sum_n a_mn P_V2I h_nm + sum_n sum_{j != m} a_mn a_jn P_V2V(j) h_mj.
    """
    p_v2i = dbm_to_mw(alloc.p_v2i_dbm)
    p = alloc.p_v2v_mw()
    row = alloc.a[m].astype(float)
    i_m = p_v2i * float(np.dot(row, gains.h_n_m[:, m]))
    shared = alloc.a.astype(float) @ row      # (M,) 1 when link j shares m's subchannel
    shared[m] = 0.0
    i_m += float(np.dot(shared, p * gains.h_m_j[m]))
    rate = math.log2(1.0 + p[m] * gains.h_m[m] / (i_m + noise_mw))
    return rate, i_m


def eavesdrop_rate(m: int, alloc: Allocation, gains: ChannelGains, noise_mw: float) -> float:
    """Rate at which the eavesdropper overhears V2V link m.

    I_eve = sum_n a_mn P_V2I h_ne + sum_n sum_{j != m} a_mn a_jn P_V2V(j) h_je.
    """
    rate, _ = _eavesdrop_rate_and_interference(m, alloc, gains, noise_mw)
    return rate


def _eavesdrop_rate_and_interference(m, alloc, gains, noise_mw):
    p_v2i = dbm_to_mw(alloc.p_v2i_dbm)
    p = alloc.p_v2v_mw()
    row = alloc.a[m].astype(float)
    i_eve = p_v2i * float(np.dot(row, gains.h_n_e))
    shared = alloc.a.astype(float) @ row
    shared[m] = 0.0
    i_eve += float(np.dot(shared, p * gains.h_m_e))
    rate = math.log2(1.0 + p[m] * gains.h_m_e[m] / (i_eve + noise_mw))
    return rate, i_eve


def secrecy_rate(r_m: float, r_m_e: float) -> float:
    """Non-negative gap between the link rate and the eavesdropping rate."""
    return max(r_m - r_m_e, 0.0)


def rate_report(alloc: Allocation, gains: ChannelGains, noise_mw: float) -> RateReport:
    """Vectorized evaluation of all rates for one subframe."""
    a = alloc.a.astype(float)
    p = alloc.p_v2v_mw()
    p_v2i = dbm_to_mw(alloc.p_v2i_dbm)

    inter_bs = a.T @ (p * gains.h_m_b)                       # (N,)
    r_n = np.log2(1.0 + p_v2i * gains.h_n_b / (inter_bs + noise_mw))

    co = a @ a.T                                             # (M, M) shared-subchannel mask
    np.fill_diagonal(co, 0.0)
    i_m = p_v2i * np.sum(a * gains.h_n_m.T, axis=1) + (co * gains.h_m_j) @ p
    r_m = np.log2(1.0 + p * gains.h_m / (i_m + noise_mw))

    i_eve = p_v2i * (a @ gains.h_n_e) + co @ (p * gains.h_m_e)
    r_m_e = np.log2(1.0 + p * gains.h_m_e / (i_eve + noise_mw))
    r_m_sec = np.maximum(r_m - r_m_e, 0.0)
    return RateReport(r_n=r_n, r_m=r_m, r_m_e=r_m_e, r_m_sec=r_m_sec, i_m=i_m, i_eve=i_eve)


def efficiency(report: RateReport, alloc: Allocation, params: CommParams) -> EfficiencyReport:
    """Compositive spectrum-and-energy efficiency of both link families.

    zeta_V2V = sum_m B R_m / (sum_n B * (sum_m P_V2V(m) + M P_C))
    zeta_V2I = sum_n B R_n / (sum_n B * (N P_V2I + N P_C))
    with powers in watts and B the per-subchannel bandwidth in Hz.
    """
    b = params.bandwidth_per_subchannel_hz
    n = len(report.r_n)
    m = len(report.r_m)
    total_band = n * b
    p_c = dbm_to_watt(alloc.p_circuit_dbm)
    p_v2v_total = float(alloc.p_v2v_watt().sum())
    p_v2i_total = n * dbm_to_watt(alloc.p_v2i_dbm)
    zeta_v2v = b * float(report.r_m.sum()) / (total_band * (p_v2v_total + m * p_c))
    zeta_v2i = b * float(report.r_n.sum()) / (total_band * (p_v2i_total + n * p_c))
    objective = params.lambda_alpha * zeta_v2v + params.lambda_beta * zeta_v2i
    return EfficiencyReport(
        zeta_v2v=zeta_v2v,
        zeta_v2i=zeta_v2i,
        objective=objective,
        lambda_alpha=params.lambda_alpha,
        lambda_beta=params.lambda_beta,
        bandwidth_per_subchannel_hz=b,
    )


def reward(report: RateReport, eff: EfficiencyReport, r_threshold: float) -> float:
    """The shared scalar every agent receives for the subframe.

    The weighted efficiency objective when every link clears the secrecy
    threshold, -1 otherwise; no third value exists.
    """
    if np.all(report.r_m_sec >= r_threshold):
        return eff.objective
    return -1.0


def check_constraints(alloc: Allocation, report: RateReport, r_threshold: float) -> ConstraintReport:
    """Satisfaction flags for reuse, secrecy, power-bound and binarity constraints.

    The power caps are the configured V2I power and the top entry of the V2V
    level table, so the power flags hold by construction for any allocation
    built from valid level indices.
    """
    table = np.array(alloc.p_v2v_levels_dbm)
    p_max2_mw = dbm_to_mw(float(table.max()))
    idx_ok = bool(np.all((alloc.power_level >= 0) & (alloc.power_level < len(table))))
    v2v_ok = idx_ok and bool(np.all((alloc.p_v2v_mw() >= 0.0)
                                    & (alloc.p_v2v_mw() <= p_max2_mw)))
    return ConstraintReport(
        reuse_ok=alloc.a.sum(axis=1) <= 1,
        secrecy_ok=report.r_m_sec >= r_threshold,
        v2i_power_ok=0.0 <= dbm_to_mw(alloc.p_v2i_dbm) <= dbm_to_mw(alloc.p_v2i_dbm),
        v2v_power_ok=v2v_ok,
        binary_ok=bool(np.all((alloc.a == 0) | (alloc.a == 1))),
    )


def evaluate(alloc: Allocation, gains: ChannelGains, params: CommParams,
             noise_mw: float) -> tuple:
    """One-call evaluation: rates, efficiencies and the shared reward."""
    report = rate_report(alloc, gains, noise_mw)
    eff = efficiency(report, alloc, params)
    return report, eff, reward(report, eff, params.r_threshold)
