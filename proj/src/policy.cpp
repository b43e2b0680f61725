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


#include "rcmdp/policy.hpp"

#include "rcmdp/ambiguity.hpp"
#include "rcmdp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rcmdp {

SoftmaxPolicy::SoftmaxPolicy(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states), n_actions_(n_actions), logits_(n_states * n_actions, 0.0) {}

SoftmaxPolicy::SoftmaxPolicy(std::size_t n_states, std::size_t n_actions, Vec logits)
    : n_states_(n_states), n_actions_(n_actions), logits_(std::move(logits)) {
    if (logits_.size() != n_states * n_actions)
        throw std::invalid_argument("logit vector must have n_states * n_actions entries");
    for (double x : logits_)
        if (!std::isfinite(x)) throw std::invalid_argument("policy logits must be finite");
}

Vec SoftmaxPolicy::distribution(std::size_t s) const {
    if (s >= n_states_) throw std::out_of_range("state index out of range");
    const auto row = logits_.begin() + static_cast<std::ptrdiff_t>(s * n_actions_);
    const double top = *std::max_element(row, row + static_cast<std::ptrdiff_t>(n_actions_));
    Vec probs(n_actions_);
    double total = 0.0;
    for (std::size_t a = 0; a < n_actions_; ++a) {
        probs[a] = std::exp(row[static_cast<std::ptrdiff_t>(a)] - top);
        total += probs[a];
    }
    for (double& p : probs) p /= total;
    return probs;
}

PolicyTable SoftmaxPolicy::table() const {
    PolicyTable out(n_states_);
    for (std::size_t s = 0; s < n_states_; ++s) out[s] = distribution(s);
    return out;
}

Vec action_distribution(const SoftmaxPolicy& policy, std::size_t s) {
    return policy.distribution(s);
}

Vec score(const SoftmaxPolicy& policy, std::size_t s, std::size_t a) {
    if (a >= policy.n_actions()) throw std::out_of_range("action index out of range");
    const Vec probs = policy.distribution(s);
    Vec grad(policy.n_params(), 0.0);
    const std::size_t base = s * policy.n_actions();
    for (std::size_t b = 0; b < policy.n_actions(); ++b)
        grad[base + b] = (b == a ? 1.0 : 0.0) - probs[b];
    return grad;
}

bool is_terminal(const Rcmdp& model, std::size_t s) {
    for (std::size_t a = 0; a < model.n_actions; ++a) {
        if (model.nominal[s][a][s] != 1.0) return false;
        if (model.rewards[s][a][s] != 0.0 || model.constraint_rewards[s][a][s] != 0.0)
            return false;
    }
    return true;
}

Vec adversary_target(const Rcmdp& model, std::size_t s, std::size_t a,
                     std::span<const double> pessimism, const std::optional<Signal>& fold) {
    Vec target(pessimism.begin(), pessimism.end());
    if (fold)
        for (std::size_t sn = 0; sn < model.n_states; ++sn)
            target[sn] = signal_value(model, *fold, s, a, sn) + model.gamma * pessimism[sn];
    return target;
}

Trajectory sample_trajectory(const Rcmdp& model, const SoftmaxPolicy& policy,
                             std::span<const double> pessimism, std::size_t horizon, Rng& rng,
                             const std::optional<Signal>& fold) {
    if (pessimism.size() != model.n_states)
        throw std::invalid_argument("pessimism vector must have one entry per state");
    if (horizon == 0) throw std::invalid_argument("trajectory horizon must be at least 1");
    if (policy.n_states() != model.n_states || policy.n_actions() != model.n_actions)
        throw std::invalid_argument("policy shape does not match the model");

    Trajectory out;
    out.steps.reserve(horizon);
    std::size_t s = sample_categorical(model.p0, rng);
    for (std::size_t t = 0; t < horizon; ++t) {
        if (is_terminal(model, s)) break;
        const Vec probs = policy.distribution(s);
        const std::size_t a = sample_categorical(probs, rng);
        const WorstCase worst = worst_case_response(ambiguity_ball(model, s, a),
                                                    adversary_target(model, s, a, pessimism, fold));
        const std::size_t s_next = sample_categorical(worst.p, rng);

        TrajectoryStep step;
        step.t = t;
        step.s = s;
        step.a = a;
        step.s_next = s_next;
        step.r = model.rewards[s][a][s_next];
        step.d = model.constraint_rewards[s][a][s_next];
        step.score.assign(policy.n_params(), 0.0);
        const std::size_t base = s * policy.n_actions();
        for (std::size_t b = 0; b < policy.n_actions(); ++b)
            step.score[base + b] = (b == a ? 1.0 : 0.0) - probs[b];
        out.steps.push_back(std::move(step));
        s = s_next;
    }
    return out;
}

double discounted_sum(const Trajectory& trajectory, Channel channel, double gamma) {
    double total = 0.0;
    double discount = 1.0;
    for (const auto& step : trajectory.steps) {
        total += discount * (channel == Channel::reward ? step.r : step.d);
        discount *= gamma;
    }
    return total;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,s,a,s_next,r,d\n";
    for (const auto& step : trajectory.steps)
        out << step.t << ',' << step.s << ',' << step.a << ',' << step.s_next << ','
            << csv::format(step.r) << ',' << csv::format(step.d) << '\n';
}

void write_policy_csv(std::ostream& out, const PolicyTable& table) {
    out << "s,a,probability\n";
    for (std::size_t s = 0; s < table.size(); ++s)
        for (std::size_t a = 0; a < table[s].size(); ++a)
            out << s << ',' << a << ',' << csv::format(table[s][a]) << '\n';
}

PolicyTable read_policy_csv(std::istream& in, std::size_t n_states, std::size_t n_actions) {
    const csv::Table table = csv::read(in);
    csv::require_columns(table, {"s", "a", "probability"});
    PolicyTable out(n_states, Vec(n_actions, 0.0));
    std::vector<std::vector<bool>> seen(n_states, std::vector<bool>(n_actions, false));
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
        const std::size_t s = table.index(row, "s");
        const std::size_t a = table.index(row, "a");
        if (s >= n_states || a >= n_actions)
            throw std::invalid_argument("policy row " + std::to_string(row + 1) +
                                        " is outside the model's state/action range");
        out[s][a] = table.number(row, "probability");
        seen[s][a] = true;
    }
    for (std::size_t s = 0; s < n_states; ++s)
        for (std::size_t a = 0; a < n_actions; ++a)
            if (!seen[s][a])
                throw std::invalid_argument("policy file has no entry for s=" + std::to_string(s) +
                                            ", a=" + std::to_string(a));
    return out;
}

} // namespace rcmdp
