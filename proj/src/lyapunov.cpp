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


#include "rcmdp/lyapunov.hpp"

#include "rcmdp/ambiguity.hpp"
#include "rcmdp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rcmdp {

namespace {

void check_states(const Rcmdp& model, const LyapunovFn& lyapunov) {
    if (lyapunov.values.size() != model.n_states)
        throw std::invalid_argument("Lyapunov function has " +
                                    std::to_string(lyapunov.values.size()) +
                                    " entries, model has " + std::to_string(model.n_states));
}

// Depth-first enumeration of deterministic time-dependent policies. Level t
// fixes the actions at time t given an already fixed suffix t+1..T-1.
class PolicyEnumerator {
public:
    PolicyEnumerator(const Rcmdp& model, const Signal& signal, std::size_t horizon,
                     const Vec& optimal_start, double tolerance)
        : model_(model), signal_(signal), horizon_(horizon), optimal_start_(optimal_start),
          tolerance_(tolerance) {
        assignments_ = 1;
        for (std::size_t s = 0; s < model.n_states; ++s) assignments_ *= model.n_actions;
    }

    std::vector<std::uint64_t> optimal_set(const Vec& terminal) {
        optimal_.clear();
        visited_ = 0;
        descend(horizon_, terminal, 0, 1);
        std::sort(optimal_.begin(), optimal_.end());
        return optimal_;
    }

    std::uint64_t visited() const { return visited_; }

private:
    // `next` is the value at time t (already computed for the fixed suffix);
    // `suffix` encodes the actions at times t..T-1, `scale` = A^(S*(T-t)).
    void descend(std::size_t t, const Vec& next, std::uint64_t suffix, std::uint64_t scale) {
        if (t == 0) {
            ++visited_;
            for (std::size_t s = 0; s < model_.n_states; ++s)
                if (next[s] < optimal_start_[s] - tolerance_) return;
            optimal_.push_back(suffix);
            return;
        }
        const Matrix q = robust_q_backup(model_, signal_, next);
        Vec current(model_.n_states);
        std::vector<std::size_t> actions(model_.n_states, 0);
        for (std::uint64_t code = 0; code < assignments_; ++code) {
            std::uint64_t rest = code;
            for (std::size_t s = model_.n_states; s-- > 0;) {
                actions[s] = static_cast<std::size_t>(rest % model_.n_actions);
                rest /= model_.n_actions;
            }
            for (std::size_t s = 0; s < model_.n_states; ++s) current[s] = q[s][actions[s]];
            descend(t - 1, current, code * scale + suffix, scale * assignments_);
        }
    }

    const Rcmdp& model_;
    Signal signal_;
    std::size_t horizon_;
    const Vec& optimal_start_;
    double tolerance_;
    std::uint64_t assignments_ = 1;
    std::uint64_t visited_ = 0;
    std::vector<std::uint64_t> optimal_;
};

} // namespace

CandidateReport check_candidate(const LyapunovFn& lyapunov) {
    CandidateReport report;
    const auto& v = lyapunov.values;
    if (lyapunov.equilibrium >= v.size()) {
        report.ok = false;
        report.failures.push_back("equilibrium state is out of range");
        return report;
    }
    if (v[lyapunov.equilibrium] != 0.0) {
        report.ok = false;
        report.failures.push_back("V(equilibrium) is not zero");
    }
    for (std::size_t s = 0; s < v.size(); ++s) {
        if (s == lyapunov.equilibrium) continue;
        if (!(v[s] > 0.0)) {
            report.ok = false;
            report.failures.push_back("V is not positive at state " + std::to_string(s));
        }
    }
    return report;
}

double shaping_reward(const LyapunovFn& lyapunov, std::size_t s, std::size_t s_next) {
    return -(lyapunov.values.at(s_next) - lyapunov.values.at(s));
}

Rcmdp shape_model(const Rcmdp& model, const LyapunovFn& lyapunov) {
    check_states(model, lyapunov);
    Rcmdp shaped = model;
    for (std::size_t s = 0; s < model.n_states; ++s)
        for (std::size_t a = 0; a < model.n_actions; ++a)
            for (std::size_t sn = 0; sn < model.n_states; ++sn)
                shaped.rewards[s][a][sn] += shaping_reward(lyapunov, s, sn);
    return shaped;
}

Rcmdp stability_constrained_model(const Rcmdp& model, const LyapunovFn& lyapunov, double beta) {
    check_states(model, lyapunov);
    if (!(beta >= 0.0)) throw std::invalid_argument("stability budget beta must be >= 0");
    Rcmdp out = model;
    for (std::size_t s = 0; s < model.n_states; ++s)
        for (std::size_t a = 0; a < model.n_actions; ++a)
            for (std::size_t sn = 0; sn < model.n_states; ++sn)
                out.constraint_rewards[s][a][sn] = shaping_reward(lyapunov, s, sn);
    out.beta = beta;
    return out;
}

std::size_t descent_violations(const Trajectory& trajectory, const LyapunovFn& lyapunov) {
    std::size_t count = 0;
    for (const auto& step : trajectory.steps)
        if (lyapunov.values.at(step.s_next) > lyapunov.values.at(step.s) + 1e-12) ++count;
    return count;
}

InvarianceReport invariance_test(const Rcmdp& model, const LyapunovFn& lyapunov,
                                 std::size_t horizon, const InvarianceOptions& options) {
    check_states(model, lyapunov);
    if (model.gamma != 1.0)
        throw std::invalid_argument("shaping invariance is checked for gamma = 1 only");
    if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");

    double total = 1.0;
    for (std::size_t i = 0; i < model.n_states * horizon; ++i) {
        total *= static_cast<double>(model.n_actions);
        if (total > static_cast<double>(options.max_policies))
            throw std::invalid_argument("enumeration budget exceeded: A^(S*T) > " +
                                        std::to_string(options.max_policies));
    }

    Rcmdp original = model;
    original.horizon = horizon;
    const Rcmdp shaped = shape_model(original, lyapunov);
    const Signal signal = Signal::combined(options.lambda);

    const auto tables = robust_finite_horizon(original, signal, horizon);
    const auto shaped_tables = robust_finite_horizon(shaped, signal, horizon, lyapunov.values);

    InvarianceReport report;
    report.horizon = horizon;
    for (std::size_t s = 0; s < model.n_states; ++s)
        for (std::size_t a = 0; a < model.n_actions; ++a)
            report.max_q_offset_error =
                std::max(report.max_q_offset_error,
                         std::abs(shaped_tables.q[0][s][a] - tables.q[0][s][a] -
                                  lyapunov.values[s]));

    PolicyEnumerator plain(original, signal, horizon, tables.values[0], options.tolerance);
    report.optimal_original = plain.optimal_set(Vec(model.n_states, 0.0));
    report.policies_enumerated = plain.visited();

    PolicyEnumerator transformed(shaped, signal, horizon, shaped_tables.values[0],
                                 options.tolerance);
    report.optimal_shaped = transformed.optimal_set(lyapunov.values);
    report.optimal_sets_equal = report.optimal_original == report.optimal_shaped;

    const auto zero_tables = robust_finite_horizon(shaped, signal, horizon);
    PolicyEnumerator zero_terminal(shaped, signal, horizon, zero_tables.values[0],
                                   options.tolerance);
    report.zero_terminal_sets_equal =
        zero_terminal.optimal_set(Vec(model.n_states, 0.0)) == report.optimal_original;

    report.passed = report.optimal_sets_equal && !report.optimal_original.empty() &&
                    report.max_q_offset_error <= options.tolerance;
    return report;
}

LyapunovFn read_lyapunov_csv(std::istream& in, std::size_t equilibrium) {
    const csv::Table table = csv::read(in);
    csv::require_columns(table, {"s", "value"});
    LyapunovFn out;
    out.equilibrium = equilibrium;
    out.values.assign(table.rows.size(), 0.0);
    std::vector<bool> seen(table.rows.size(), false);
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
        const std::size_t s = table.index(row, "s");
        if (s >= out.values.size() || seen[s])
            throw std::invalid_argument("Lyapunov file: state ids must be 0..S-1 without repeats");
        seen[s] = true;
        out.values[s] = table.number(row, "value");
    }
    return out;
}

} // namespace rcmdp
