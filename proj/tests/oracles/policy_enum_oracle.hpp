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

// Flat enumeration of every deterministic time-dependent policy for a finite
// horizon, scored with the LP-based evaluator. The code of a policy is the
// base-A integer whose digits are actions[t][s], ordered by t then s with
// (0, 0) most significant.

#include "dp_oracle.hpp"

#include <cstdint>

namespace oracle {

inline std::vector<std::vector<std::size_t>> decode_policy(std::uint64_t code, std::size_t n_states,
                                                           std::size_t n_actions,
                                                           std::size_t horizon) {
    std::vector<std::vector<std::size_t>> actions(horizon, std::vector<std::size_t>(n_states));
    for (std::size_t t = horizon; t-- > 0;)
        for (std::size_t s = n_states; s-- > 0;) {
            actions[t][s] = static_cast<std::size_t>(code % n_actions);
            code /= n_actions;
        }
    return actions;
}

// Policies whose value is within `tol` of the best at every start state.
inline std::vector<std::uint64_t> optimal_policy_codes(const rcmdp::Rcmdp& m, Weights w,
                                                       std::size_t horizon, const Vec& terminal,
                                                       double tol) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < m.n_states * horizon; ++i) total *= m.n_actions;
    std::vector<Vec> values(total);
    Vec best(m.n_states, -1e300);
    for (std::uint64_t code = 0; code < total; ++code) {
        values[code] = lp_finite_horizon_policy_value(
            m, w, decode_policy(code, m.n_states, m.n_actions, horizon), terminal);
        for (std::size_t s = 0; s < m.n_states; ++s) best[s] = std::max(best[s], values[code][s]);
    }
    std::vector<std::uint64_t> out;
    for (std::uint64_t code = 0; code < total; ++code) {
        bool ok = true;
        for (std::size_t s = 0; s < m.n_states && ok; ++s) ok = values[code][s] >= best[s] - tol;
        if (ok) out.push_back(code);
    }
    return out;
}

}  // namespace oracle
