"""Rate, efficiency and reward formulas against literal-summation references."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from secv2x.comm import (Allocation, CommParams, check_constraints, dbm_to_mw,
                         dbm_to_watt, eavesdrop_rate, efficiency, evaluate,
                         rate_report, reward, secrecy_rate, v2i_rate, v2v_rate)

from conftest import random_gains
from oracles import (ref_efficiency, ref_eve_rate, ref_full_reward,
                     ref_reward, ref_v2i_rate, ref_v2v_rate)

NOISE_MW = 10.0 ** (-114.0 / 10.0)


def random_allocation(rng, m, n, params):
    a = np.zeros((m, n), dtype=np.int8)
    for i in range(m):
        if rng.random() < 0.9:            # leave some links unassigned
            a[i, rng.integers(n)] = 1
    lvl = rng.integers(len(params.v2v_power_levels_dbm), size=m)
    return Allocation.from_params(a, lvl, params)


def rel_err(x, y):
    scale = max(abs(x), abs(y), 1e-300)
    return abs(x - y) / scale


class TestUnitConversions:
    def test_dbm_to_mw(self):
        assert dbm_to_mw(0.0) == 1.0
        assert math.isclose(dbm_to_mw(23.0), 199.5262315, rel_tol=1e-9)
        assert math.isclose(dbm_to_mw(-114.0), 3.981071706e-12, rel_tol=1e-9)

    def test_dbm_to_watt(self):
        assert math.isclose(dbm_to_watt(16.0), 0.039810717055, rel_tol=1e-9)
        assert dbm_to_watt(30.0) == pytest.approx(1.0)


class TestRatesAgainstReference:
    def test_thousand_random_instances(self):
        # same sweep the acceptance suite runs: M <= 6, N <= 4, 1e-12 relative
        rng = np.random.default_rng(7)
        params = CommParams(num_subchannels=4)
        for _ in range(1000):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 5))
            params_n = CommParams(num_subchannels=n)
            gains = random_gains(rng, m, n)
            alloc = random_allocation(rng, m, n, params_n)
            a = alloc.a.tolist()
            p_mw = alloc.p_v2v_mw().tolist()
            p_v2i = dbm_to_mw(alloc.p_v2i_dbm)

            report = rate_report(alloc, gains, NOISE_MW)
            for i in range(n):
                expected = ref_v2i_rate(i, a, p_mw, p_v2i, gains.h_n_b,
                                        gains.h_m_b, NOISE_MW)
                assert rel_err(report.r_n[i], expected) < 1e-12
                assert rel_err(v2i_rate(i, alloc, gains, NOISE_MW), expected) < 1e-12
            for i in range(m):
                exp_rate, exp_interf = ref_v2v_rate(
                    i, a, p_mw, p_v2i, gains.h_m, gains.h_n_m.tolist(),
                    gains.h_m_j.tolist(), NOISE_MW)
                exp_eve = ref_eve_rate(i, a, p_mw, p_v2i, gains.h_m_e,
                                       gains.h_n_e, NOISE_MW)
                assert rel_err(report.r_m[i], exp_rate) < 1e-12
                assert rel_err(report.r_m_e[i], exp_eve) < 1e-12
                if exp_interf > 0:
                    assert rel_err(report.i_m[i], exp_interf) < 1e-12
                rate_i, interf_i = v2v_rate(i, alloc, gains, NOISE_MW)
                assert rel_err(rate_i, exp_rate) < 1e-12
                assert rel_err(eavesdrop_rate(i, alloc, gains, NOISE_MW), exp_eve) < 1e-12

            eff = efficiency(report, alloc, params_n)
            exp_v2v, exp_v2i = ref_efficiency(
                report.r_m.tolist(), report.r_n.tolist(),
                alloc.p_v2v_watt().tolist(), dbm_to_watt(alloc.p_v2i_dbm),
                dbm_to_watt(alloc.p_circuit_dbm),
                params_n.bandwidth_per_subchannel_hz)
            assert rel_err(eff.zeta_v2v, exp_v2v) < 1e-12
            assert rel_err(eff.zeta_v2i, exp_v2i) < 1e-12

            rew = reward(report, eff, params_n.r_threshold)
            exp_rew = ref_reward(report.r_m_sec.tolist(), params_n.r_threshold,
                                 params_n.lambda_alpha, params_n.lambda_beta,
                                 exp_v2v, exp_v2i)
            assert rel_err(rew, exp_rew) < 1e-12

    def test_full_reward_reference_path(self, rng):
        params = CommParams(num_subchannels=3)
        gains = random_gains(rng, 4, 3)
        alloc = random_allocation(rng, 4, 3, params)
        _, eff, rew = evaluate(alloc, gains, params, NOISE_MW)
        expected = ref_full_reward(
            alloc.a.tolist(),
            [dbm_to_mw(p) for p in params.v2v_power_levels_dbm],
            alloc.power_level.tolist(), dbm_to_mw(params.v2i_power_dbm),
            gains, NOISE_MW, dbm_to_watt(params.v2i_power_dbm),
            dbm_to_watt(params.circuit_power_dbm),
            params.bandwidth_per_subchannel_hz, params.r_threshold,
            params.lambda_alpha, params.lambda_beta)
        assert rel_err(rew, expected) < 1e-12


class TestSingleLinkClosedForm:
    def test_isolated_link_rate_matches_snr_formula(self):
        # one link, empty allocation row for interference-free V2I
        params = CommParams(num_subchannels=1)
        gains = random_gains(np.random.default_rng(5), 1, 1)
        a = np.zeros((1, 1), dtype=np.int8)
        alloc = Allocation.from_params(a, np.array([1]), params)
        report = rate_report(alloc, gains, NOISE_MW)
        # no subchannel -> zero own power contribution in I, rate uses p*h/(noise)
        p = dbm_to_mw(params.v2v_power_levels_dbm[1])
        expected = math.log2(1.0 + p * gains.h_m[0] / NOISE_MW)
        assert rel_err(report.r_m[0], expected) < 1e-12
        expected_v2i = math.log2(
            1.0 + dbm_to_mw(23.0) * gains.h_n_b[0] / NOISE_MW)
        assert rel_err(report.r_n[0], expected_v2i) < 1e-12


class TestSecrecy:
    def test_clamped_at_zero(self):
        assert secrecy_rate(1.0, 2.5) == 0.0
        assert secrecy_rate(2.5, 1.0) == 1.5
        assert secrecy_rate(1.0, 1.0) == 0.0

    @given(st.floats(-50, 50), st.floats(-50, 50))
    def test_never_negative(self, r, r_e):
        assert secrecy_rate(r, r_e) >= 0.0


class TestReward:
    def test_violation_is_exactly_minus_one(self, rng):
        params = CommParams(num_subchannels=2, r_threshold=1e9)
        gains = random_gains(rng, 3, 2)
        alloc = random_allocation(rng, 3, 2, params)
        _, _, rew = evaluate(alloc, gains, params, NOISE_MW)
        assert rew == -1.0

    def test_pass_equals_objective_float(self, rng):
        params = CommParams(num_subchannels=2, r_threshold=0.0)
        gains = random_gains(rng, 3, 2)
        alloc = random_allocation(rng, 3, 2, params)
        report, eff, rew = evaluate(alloc, gains, params, NOISE_MW)
        assert rew == eff.objective
        assert rew == params.lambda_alpha * eff.zeta_v2v + params.lambda_beta * eff.zeta_v2i

    def test_threshold_is_inclusive(self):
        params = CommParams(num_subchannels=1)
        gains = random_gains(np.random.default_rng(0), 1, 1)
        report = rate_report(
            Allocation.from_params(np.array([[1]], dtype=np.int8),
                                   np.array([0]), params), gains, NOISE_MW)
        report.r_m_sec[:] = params.r_threshold
        eff = efficiency(report, Allocation.from_params(
            np.array([[1]], dtype=np.int8), np.array([0]), params), params)
        assert reward(report, eff, params.r_threshold) == eff.objective


class TestEfficiencyShape:
    def test_lower_power_raises_v2v_efficiency_when_rates_fixed(self, rng):
        # denominator shrinks with the power table entry, numerator held
        params = CommParams(num_subchannels=2)
        gains = random_gains(rng, 2, 2)
        a = np.zeros((2, 2), dtype=np.int8)
        a[0, 0] = 1
        a[1, 1] = 1
        hi = Allocation.from_params(a, np.array([0, 0]), params)
        lo = Allocation.from_params(a, np.array([3, 3]), params)
        rep_hi = rate_report(hi, gains, NOISE_MW)
        eff_hi = efficiency(rep_hi, hi, params)
        # evaluate the low-power denominator against the same rate report
        eff_cross = efficiency(rep_hi, lo, params)
        assert eff_cross.zeta_v2v > eff_hi.zeta_v2v
        # v2i denominator ignores the v2v power table entirely
        assert eff_cross.zeta_v2i == eff_hi.zeta_v2i


class TestConstraints:
    def test_reuse_and_power_flags(self, rng):
        params = CommParams(num_subchannels=3)
        gains = random_gains(rng, 4, 3)
        alloc = random_allocation(rng, 4, 3, params)
        report = rate_report(alloc, gains, NOISE_MW)
        flags = check_constraints(alloc, report, params.r_threshold)
        assert flags.reuse_ok.all()
        assert flags.v2i_power_ok and flags.v2v_power_ok and flags.binary_ok
        assert np.array_equal(flags.secrecy_ok,
                              report.r_m_sec >= params.r_threshold)

    def test_double_reuse_flagged(self, rng):
        params = CommParams(num_subchannels=3)
        a = np.zeros((2, 3), dtype=np.int8)
        a[0, 0] = a[0, 1] = 1
        alloc = Allocation(a, np.array([0, 0]))
        with pytest.raises(ValueError):
            alloc.check()
        gains = random_gains(rng, 2, 3)
        report = rate_report(alloc, gains, NOISE_MW)
        assert not check_constraints(alloc, report, 0.1).reuse_ok.all()


class TestAllocation:
    def test_power_lookup(self):
        params = CommParams(num_subchannels=2)
        alloc = Allocation.from_params(np.zeros((4, 2), dtype=np.int8),
                                       np.array([0, 1, 2, 3]), params)
        assert np.allclose(alloc.p_v2v_mw(),
                           [dbm_to_mw(23), dbm_to_mw(15), dbm_to_mw(10), dbm_to_mw(5)])
        assert np.allclose(alloc.p_v2v_watt(), alloc.p_v2v_mw() / 1000.0)

    def test_check_rejects_bad_level(self):
        alloc = Allocation(np.zeros((1, 2), dtype=np.int8), np.array([9]))
        with pytest.raises(ValueError):
            alloc.check()


class TestParamValidation:
    def test_lambda_sum_enforced(self):
        with pytest.raises(ValueError):
            CommParams(lambda_alpha=0.8, lambda_beta=0.1).validate()

    def test_table_must_descend(self):
        with pytest.raises(ValueError):
            CommParams(v2v_power_levels_dbm=(5.0, 23.0)).validate()

    def test_defaults_valid(self):
        CommParams().validate()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(2, 5), st.integers(1, 4))
def test_agent_permutation_consistency(seed, m, n):
    """Permuting agents permutes the per-link outputs the same way."""
    rng = np.random.default_rng(seed)
    params = CommParams(num_subchannels=n)
    gains = random_gains(rng, m, n)
    alloc = random_allocation(rng, m, n, params)
    report = rate_report(alloc, gains, NOISE_MW)

    perm = rng.permutation(m)
    gains_p = type(gains)(
        h_m=gains.h_m[perm], h_n_b=gains.h_n_b, h_m_b=gains.h_m_b[perm],
        h_n_m=gains.h_n_m[:, perm], h_m_j=gains.h_m_j[np.ix_(perm, perm)],
        h_m_e=gains.h_m_e[perm], h_n_e=gains.h_n_e)
    alloc_p = Allocation.from_params(alloc.a[perm], alloc.power_level[perm], params)
    report_p = rate_report(alloc_p, gains_p, NOISE_MW)
    assert np.allclose(report_p.r_m, report.r_m[perm], rtol=1e-12)
    assert np.allclose(report_p.r_m_e, report.r_m_e[perm], rtol=1e-12)
    assert np.allclose(report_p.r_n, report.r_n, rtol=1e-12)
