"""Independent reference implementations used to check the fast paths.

Everything here is written as literal scalar loops over the defining sums,
with no shared code or vectorization from the package, so a bug in the
implementation cannot hide in its own oracle.
"""

import math


def ref_v2i_rate(n, a, p_v2v_mw, p_v2i_mw, h_n_b, h_m_b, noise_mw):
    interference = 0.0
    for m in range(len(a)):
        interference += a[m][n] * p_v2v_mw[m] * h_m_b[m]
    return math.log2(1.0 + p_v2i_mw * h_n_b[n] / (interference + noise_mw))


def ref_v2v_rate(m, a, p_v2v_mw, p_v2i_mw, h_m, h_n_m, h_m_j, noise_mw):
    num_sub = len(a[0])
    interference = 0.0
    for n in range(num_sub):
        interference += a[m][n] * p_v2i_mw * h_n_m[n][m]
        for j in range(len(a)):
            if j != m:
                interference += a[m][n] * a[j][n] * p_v2v_mw[j] * h_m_j[m][j]
    return (math.log2(1.0 + p_v2v_mw[m] * h_m[m] / (interference + noise_mw)),
            interference)


def ref_eve_rate(m, a, p_v2v_mw, p_v2i_mw, h_m_e, h_n_e, noise_mw):
    num_sub = len(a[0])
    interference = 0.0
    for n in range(num_sub):
        interference += a[m][n] * p_v2i_mw * h_n_e[n]
        for j in range(len(a)):
            if j != m:
                interference += a[m][n] * a[j][n] * p_v2v_mw[j] * h_m_e[j]
    return math.log2(1.0 + p_v2v_mw[m] * h_m_e[m] / (interference + noise_mw))


def ref_secrecy(r, r_e):
    return r - r_e if r > r_e else 0.0


def ref_efficiency(v2v_rates, v2i_rates, p_v2v_watt, p_v2i_watt, p_c_watt,
                   bandwidth_hz):
    num_v2v = len(v2v_rates)
    num_v2i = len(v2i_rates)
    v2v_num = 0.0
    for r in v2v_rates:
        v2v_num += bandwidth_hz * r
    v2i_num = 0.0
    for r in v2i_rates:
        v2i_num += bandwidth_hz * r
    v2v_power = sum(p_v2v_watt) + num_v2v * p_c_watt
    v2i_power = num_v2i * p_v2i_watt + num_v2i * p_c_watt
    total_band = num_v2i * bandwidth_hz
    return v2v_num / (total_band * v2v_power), v2i_num / (total_band * v2i_power)


def ref_reward(secrecy_rates, threshold, lambda_alpha, lambda_beta,
               zeta_v2v, zeta_v2i):
    for s in secrecy_rates:
        if s < threshold:
            return -1.0
    return lambda_alpha * zeta_v2v + lambda_beta * zeta_v2i


def ref_full_reward(a, p_levels_mw, level_idx, p_v2i_mw, gains, noise_mw,
                    p_v2i_watt, p_c_watt, bandwidth_hz, threshold,
                    lambda_alpha, lambda_beta):
    """Reward of one allocation evaluated entirely through the loops above.

    ``gains`` is any object with h_m, h_n_b, h_m_b, h_n_m, h_m_j, h_m_e,
    h_n_e attributes (indexable, row major).
    """
    num_v2v = len(a)
    num_v2i = len(gains.h_n_b)
    p_mw = [p_levels_mw[level_idx[m]] for m in range(num_v2v)]
    p_watt = [p / 1000.0 for p in p_mw]
    v2i_rates = [ref_v2i_rate(n, a, p_mw, p_v2i_mw, gains.h_n_b, gains.h_m_b,
                              noise_mw) for n in range(num_v2i)]
    v2v_rates = []
    secrecy = []
    for m in range(num_v2v):
        r, _ = ref_v2v_rate(m, a, p_mw, p_v2i_mw, gains.h_m, gains.h_n_m,
                            gains.h_m_j, noise_mw)
        r_e = ref_eve_rate(m, a, p_mw, p_v2i_mw, gains.h_m_e, gains.h_n_e,
                           noise_mw)
        v2v_rates.append(r)
        secrecy.append(ref_secrecy(r, r_e))
    zeta_v2v, zeta_v2i = ref_efficiency(v2v_rates, v2i_rates, p_watt,
                                        p_v2i_watt, p_c_watt, bandwidth_hz)
    return ref_reward(secrecy, threshold, lambda_alpha, lambda_beta,
                      zeta_v2v, zeta_v2i)


def ref_value_iteration(rewards, transitions, gamma, iterations=200):
    """Tabular value iteration on a deterministic MDP.

    rewards[s][a] and transitions[s][a] are dense lists. Returns the greedy
    policy (lowest action index on ties).
    """
    num_states = len(rewards)
    num_actions = len(rewards[0])
    values = [0.0] * num_states
    for _ in range(iterations):
        new_values = []
        for s in range(num_states):
            best = max(rewards[s][a] + gamma * values[transitions[s][a]]
                       for a in range(num_actions))
            new_values.append(best)
        values = new_values
    policy = []
    for s in range(num_states):
        q = [rewards[s][a] + gamma * values[transitions[s][a]]
             for a in range(num_actions)]
        policy.append(q.index(max(q)))
    return policy, values
