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

#include "rcmdp/rcpg.hpp"

#include <functional>

namespace rcmdp {

/// Tabular critic: one weight per state (one-hot features).
struct CriticTable {
    Vec w;
};

/// delta = r' + gamma w(s') [unless terminal] - w(s).
inline double td_error(double r_combined, double w_s, double w_s_next, double gamma,
                       bool terminal) {
    return r_combined + (terminal ? 0.0 : gamma * w_s_next) - w_s;
}

struct RcacConfig {
    /// zeta_1 drives the critic, zeta_2 the actor; a2 = 0 freezes the actor.
    StepSchedule schedule{0.5, 0.9, 0.05, 0.6};
    /// Fixed multiplier on the constraint channel.
    double lambda = 0.0;
    /// Experimental: after each episode, lambda <- clip(lambda - zeta_1(j) grad_lambda).
    bool update_lambda = false;
    double lambda_max = 100.0;
    std::size_t episodes = 1000;
    /// Step cap per episode for models without reachable terminal states.
    std::size_t max_steps = 200;
    std::uint64_t seed = 0;
    /// Step sizes use the global step counter instead of the episode index.
    bool per_step_schedule = true;
    /// Adversary minimizes r' + gamma * w (true) or w alone (false).
    bool fold_signal = true;
};

struct AcStepRecord {
    std::size_t step = 0;
    std::size_t episode = 0;
    std::size_t s = 0;
    std::size_t a = 0;
    double delta = 0.0;
    double lambda = 0.0;
    double w_norm = 0.0;

    bool operator==(const AcStepRecord&) const = default;
};

struct RcacResult {
    SoftmaxPolicy policy;
    CriticTable critic;
    double lambda = 0.0;
    std::vector<AcStepRecord> history;
};

/// Called with (s, a, worst-case distribution, critic snapshot) before each
/// next-state draw.
using TransitionObserver = std::function<void(std::size_t, std::size_t, const Vec&, const Vec&)>;

/// Robust constrained actor-critic: next states are drawn from the worst case
/// of each ball against the live critic, the TD error uses r + lambda d, the
/// actor follows delta * score and the critic follows delta on the visited state.
RcacResult rcac_train(const Rcmdp& model, const RcacConfig& config,
                      std::optional<SoftmaxPolicy> initial_policy = std::nullopt,
                      std::optional<CriticTable> initial_critic = std::nullopt,
                      const TransitionObserver& observer = {});

void write_rcac_history_csv(std::ostream& out, std::span<const AcStepRecord> history);

} // namespace rcmdp
