/*
 * Copyright 2026 The rcmdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

// Reference dynamic programming built on the LP oracle. Signals are expressed
// as weights (wr, wd) on the reward and constraint channels, so (1, 0) is the
// reward signal and (1, lambda) the Lagrangian one.

#include "lp_oracle.hpp"

#include <rcmdp/model.hpp>

#include <algorithm>
#include <cmath>

namespace oracle {

using Matrix = std::vector<Vec>;

struct Weights {
    double wr = 1.0;
    double wd = 0.0;
};

inline Vec target_vector(const rcmdp::Rcmdp& m, Weights w, std::size_t s, std::size_t a,
                         const Vec& v) {
    Vec out(m.n_states);
    for (std::size_t sn = 0; sn < m.n_states; ++sn)
        out[sn] = w.wr * m.rewards[s][a][sn] + w.wd * m.constraint_rewards[s][a][sn] +
                  m.gamma * v[sn];
    return out;
}

inline Matrix lp_q(const rcmdp::Rcmdp& m, Weights w, const Vec& v) {
    Matrix q(m.n_states, Vec(m.n_actions));
    for (std::size_t s = 0; s < m.n_states; ++s)
        for (std::size_t a = 0; a < m.n_actions; ++a)
            q[s][a] = l1_worst_case(m.nominal[s][a], m.budgets[s][a], target_vector(m, w, s, a, v)).value;
    return q;
}

inline Vec lp_optimality_backup(const rcmdp::Rcmdp& m, Weights w, const Vec& v) {
    const Matrix q = lp_q(m, w, v);
    Vec out(m.n_states);
    for (std::size_t s = 0; s < m.n_states; ++s) out[s] = *std::max_element(q[s].begin(), q[s].end());
    return out;
}

inline Vec lp_policy_backup(const rcmdp::Rcmdp& m, Weights w, const Matrix& pi, const Vec& v) {
    const Matrix q = lp_q(m, w, v);
    Vec out(m.n_states, 0.0);
    for (std::size_t s = 0; s < m.n_states; ++s)
        for (std::size_t a = 0; a < m.n_actions; ++a) out[s] += pi[s][a] * q[s][a];
    return out;
}

inline double sup_diff(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Iterates until the sup-norm change certifies an error below `accuracy`.
template <class Backup>
Vec fixed_point(std::size_t n, double gamma, double accuracy, Backup backup) {
    Vec v(n, 0.0);
    for (int it = 0; it < 200000; ++it) {
        Vec next = backup(v);
        const double change = sup_diff(next, v);
        v = std::move(next);
        if (change * gamma / (1.0 - gamma) <= accuracy) break;
    }
    return v;
}

inline Vec lp_value_iteration(const rcmdp::Rcmdp& m, Weights w, double accuracy = 1e-10) {
    return fixed_point(m.n_states, m.gamma, accuracy,
                       [&](const Vec& v) { return lp_optimality_backup(m, w, v); });
}

inline Vec lp_policy_evaluation(const rcmdp::Rcmdp& m, Weights w, const Matrix& pi,
                                double accuracy = 1e-10) {
    return fixed_point(m.n_states, m.gamma, accuracy,
                       [&](const Vec& v) { return lp_policy_backup(m, w, pi, v); });
}

// Plain (non-robust) Bellman optimality operator on the nominal kernel.
inline Vec nominal_optimality_backup(const rcmdp::Rcmdp& m, Weights w, const Vec& v) {
    Vec out(m.n_states, -std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < m.n_states; ++s) {
        for (std::size_t a = 0; a < m.n_actions; ++a) {
            double q = 0.0;
            const Vec t = target_vector(m, w, s, a, v);
            for (std::size_t sn = 0; sn < m.n_states; ++sn) q += m.nominal[s][a][sn] * t[sn];
            out[s] = std::max(out[s], q);
        }
    }
    return out;
}

// Time-dependent deterministic policy value with gamma and terminal vector.
// actions[t][s] is the action taken at time t in state s.
inline Vec lp_finite_horizon_policy_value(const rcmdp::Rcmdp& m, Weights w,
                                          const std::vector<std::vector<std::size_t>>& actions,
                                          const Vec& terminal) {
    Vec v = terminal;
    for (std::size_t t = actions.size(); t-- > 0;) {
        Vec next(m.n_states);
        for (std::size_t s = 0; s < m.n_states; ++s) {
            const std::size_t a = actions[t][s];
            next[s] = l1_worst_case(m.nominal[s][a], m.budgets[s][a], target_vector(m, w, s, a, v)).value;
        }
        v = std::move(next);
    }
    return v;
}

// q-table at t = 0 of the optimal finite-horizon recursion.
inline Matrix lp_finite_horizon_q0(const rcmdp::Rcmdp& m, Weights w, std::size_t horizon,
                                   const Vec& terminal) {
    Vec v = terminal;
    Matrix q;
    for (std::size_t t = horizon; t-- > 0;) {
        q = lp_q(m, w, v);
        for (std::size_t s = 0; s < m.n_states; ++s) v[s] = *std::max_element(q[s].begin(), q[s].end());
    }
    return q;
}

}  // namespace oracle
