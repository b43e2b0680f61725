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

#include "rcmdp/model.hpp"
#include "rcmdp/random.hpp"
#include "rcmdp/robust_dp.hpp"

#include <iosfwd>
#include <optional>
#include <span>

namespace rcmdp {

/// Tabular softmax policy; logits are stored row-major as theta[s * A + a].
class SoftmaxPolicy {
public:
    SoftmaxPolicy() = default;
    /// All-zero logits, i.e. the uniform policy.
    SoftmaxPolicy(std::size_t n_states, std::size_t n_actions);
    SoftmaxPolicy(std::size_t n_states, std::size_t n_actions, Vec logits);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }
    std::size_t n_params() const { return logits_.size(); }

    const Vec& logits() const { return logits_; }
    Vec& logits() { return logits_; }
    double logit(std::size_t s, std::size_t a) const { return logits_[s * n_actions_ + a]; }

    /// Stable softmax of row s.
    Vec distribution(std::size_t s) const;
    PolicyTable table() const;

    bool operator==(const SoftmaxPolicy&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    Vec logits_;
};

Vec action_distribution(const SoftmaxPolicy& policy, std::size_t s);

/// grad_theta log pi(a|s): entry (s,b) is 1{b=a} - pi(b|s), zero elsewhere.
Vec score(const SoftmaxPolicy& policy, std::size_t s, std::size_t a);

struct TrajectoryStep {
    std::size_t t = 0;
    std::size_t s = 0;
    std::size_t a = 0;
    std::size_t s_next = 0;
    double r = 0.0;
    double d = 0.0;
    Vec score;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;

    bool empty() const { return steps.empty(); }
    std::size_t size() const { return steps.size(); }
};

/// Self-absorbing under the nominal kernel for every action with zero r and d.
bool is_terminal(const Rcmdp& model, std::size_t s);

/// Rolls out up to `horizon` steps with next states drawn from the worst-case
/// distribution of each (s_t, a_t) ball against `pessimism`. Stops early at a
/// terminal state.
Trajectory sample_trajectory(const Rcmdp& model, const SoftmaxPolicy& policy,
                             std::span<const double> pessimism, std::size_t horizon, Rng& rng,
                             const std::optional<Signal>& fold = std::nullopt);

/// Vector the adversary minimizes at (s, a). Without `fold` this is the
/// pessimism vector itself; with it, signal(s, a, .) + gamma * pessimism,
/// the same vector the robust backup minimizes.
Vec adversary_target(const Rcmdp& model, std::size_t s, std::size_t a,
                     std::span<const double> pessimism, const std::optional<Signal>& fold);

enum class Channel { reward, constraint };

/// sum_t gamma^t x_t for the chosen channel.
double discounted_sum(const Trajectory& trajectory, Channel channel, double gamma);

/// `t,s,a,s_next,r,d` rows.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// `s,a,probability` rows.
void write_policy_csv(std::ostream& out, const PolicyTable& table);
/// Parses `s,a,probability` rows into a dense table.
PolicyTable read_policy_csv(std::istream& in, std::size_t n_states, std::size_t n_actions);

} // namespace rcmdp
