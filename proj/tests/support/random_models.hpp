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

#include <rcmdp/model.hpp>

#include <random>
#include <vector>

namespace testing_support {

using rcmdp::Vec;

inline Vec random_simplex(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp1(1.0);
    Vec p(n);
    double total = 0.0;
    for (double& x : p) total += x = exp1(rng);
    for (double& x : p) x /= total;
    // Exact normalization so validate() accepts the row.
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += p[i];
    p[n - 1] = 1.0 - sum;
    if (p[n - 1] < 0.0) p[n - 1] = 0.0;
    return p;
}

struct RandomModelOptions {
    std::size_t n_states = 3;
    std::size_t n_actions = 2;
    double gamma = 0.9;
    // Uniform budget when >= 0, otherwise drawn from [0, 2] per pair.
    double psi = -1.0;
    double reward_scale = 1.0;
};

inline rcmdp::Rcmdp random_model(const RandomModelOptions& o, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> reward(-o.reward_scale, o.reward_scale);
    std::uniform_real_distribution<double> budget(0.0, 2.0);
    rcmdp::Rcmdp m = rcmdp::make_empty_model(o.n_states, o.n_actions);
    m.gamma = o.gamma;
    for (std::size_t s = 0; s < o.n_states; ++s)
        for (std::size_t a = 0; a < o.n_actions; ++a) {
            m.nominal[s][a] = random_simplex(o.n_states, rng);
            m.budgets[s][a] = o.psi >= 0.0 ? o.psi : budget(rng);
            for (std::size_t sn = 0; sn < o.n_states; ++sn) {
                m.rewards[s][a][sn] = reward(rng);
                m.constraint_rewards[s][a][sn] = reward(rng);
            }
        }
    m.p0 = random_simplex(o.n_states, rng);
    return m;
}

inline Vec random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (double& x : v) x = u(rng);
    return v;
}

inline std::vector<Vec> random_policy_table(std::size_t S, std::size_t A, std::mt19937_64& rng) {
    std::vector<Vec> t(S);
    for (auto& row : t) row = random_simplex(A, rng);
    return t;
}

// Deterministic chain 0 -> 1 -> ... -> S-1 (absorbing, zero reward) under every action.
inline rcmdp::Rcmdp deterministic_chain(std::size_t S, std::size_t A, double gamma) {
    rcmdp::Rcmdp m = rcmdp::make_empty_model(S, A);
    m.gamma = gamma;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t next = s + 1 < S ? s + 1 : s;
            m.nominal[s][a].assign(S, 0.0);
            m.nominal[s][a][next] = 1.0;
            if (s + 1 < S) m.rewards[s][a][next] = static_cast<double>(s + 1);
        }
    m.p0.assign(S, 0.0);
    m.p0[0] = 1.0;
    return m;
}

}  // namespace testing_support
