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


#include "rcmdp/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rcmdp {

namespace {

constexpr double kSimplexTolerance = 1e-12;

std::string sa_location(std::size_t s, std::size_t a) {
    std::ostringstream out;
    out << "(s=" << s << ", a=" << a << ")";
    return out.str();
}

} // namespace

Rcmdp make_empty_model(std::size_t n_states, std::size_t n_actions) {
    Rcmdp model;
    model.n_states = n_states;
    model.n_actions = n_actions;
    model.rewards.assign(n_states, Matrix(n_actions, Vec(n_states, 0.0)));
    model.constraint_rewards = model.rewards;
    model.nominal = model.rewards;
    for (std::size_t s = 0; s < n_states; ++s)
        for (std::size_t a = 0; a < n_actions; ++a) model.nominal[s][a][s] = 1.0;
    model.budgets.assign(n_states, Vec(n_actions, 0.0));
    model.p0.assign(n_states, n_states > 0 ? 1.0 / static_cast<double>(n_states) : 0.0);
    return model;
}

double hoeffding_budget(std::size_t n, std::size_t n_states, std::size_t n_actions,
                        double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("confidence delta must lie in (0,1)");
    if (n == 0) return 2.0;
    // ln(S * A * 2^S / delta) without forming 2^S.
    const double log_term = std::log(static_cast<double>(n_states)) +
                            std::log(static_cast<double>(n_actions)) +
                            static_cast<double>(n_states) * std::log(2.0) - std::log(delta);
    const double psi = std::sqrt(2.0 / static_cast<double>(n) * log_term);
    return std::min(2.0, psi);
}

Rcmdp build_from_dataset(const TransitionDataset& data, const BuildOptions& options) {
    if (!(options.delta > 0.0 && options.delta < 1.0))
        throw std::invalid_argument("confidence delta must lie in (0,1)");
    const std::size_t S = data.n_states;
    const std::size_t A = data.n_actions;
    if (S == 0 || A == 0) throw std::invalid_argument("dataset declares no states or actions");

    Rcmdp model = make_empty_model(S, A);
    model.gamma = options.gamma;
    model.horizon = options.horizon;
    model.beta = options.beta;
    if (options.p0) model.p0 = *options.p0;

    std::vector<std::vector<std::size_t>> counts(S, std::vector<std::size_t>(A, 0));
    Tensor3 transition_counts(S, Matrix(A, Vec(S, 0.0)));
    Tensor3 reward_sums = transition_counts;
    Tensor3 cost_sums = transition_counts;

    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const auto& rec = data.records[i];
        if (rec.s >= S || rec.a >= A || rec.s_next >= S) {
            std::ostringstream msg;
            msg << "record " << i << " has ids outside the declared bounds (S=" << S
                << ", A=" << A << ")";
            throw std::invalid_argument(msg.str());
        }
        ++counts[rec.s][rec.a];
        transition_counts[rec.s][rec.a][rec.s_next] += 1.0;
        reward_sums[rec.s][rec.a][rec.s_next] += rec.r;
        cost_sums[rec.s][rec.a][rec.s_next] += negate_costs(rec.d_raw);
    }

    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t n = counts[s][a];
            if (n == 0)
                throw std::invalid_argument("dataset has no transitions for " + sa_location(s, a));
            for (std::size_t sn = 0; sn < S; ++sn) {
                const double c = transition_counts[s][a][sn];
                model.nominal[s][a][sn] = c / static_cast<double>(n);
                if (c > 0.0) {
                    model.rewards[s][a][sn] = reward_sums[s][a][sn] / c;
                    model.constraint_rewards[s][a][sn] = cost_sums[s][a][sn] / c;
                }
            }
            model.budgets[s][a] = hoeffding_budget(n, S, A, options.delta);
        }
    }
    return model;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& issue : issues) out << issue.location << ": " << issue.message << '\n';
    return out.str();
}

ValidationReport validate(const Rcmdp& m) {
    ValidationReport report;
    auto add = [&](std::string where, std::string what) {
        report.issues.push_back({std::move(where), std::move(what)});
    };

    if (m.n_states == 0) add("n_states", "must be at least 1");
    if (m.n_actions == 0) add("n_actions", "must be at least 1");

    const std::size_t S = m.n_states;
    const std::size_t A = m.n_actions;
    auto shaped = [&](const Tensor3& t) {
        if (t.size() != S) return false;
        for (const auto& row : t) {
            if (row.size() != A) return false;
            for (const auto& v : row)
                if (v.size() != S) return false;
        }
        return true;
    };
    bool dims_ok = true;
    if (!shaped(m.rewards)) add("rewards", "shape must be [S][A][S]"), dims_ok = false;
    if (!shaped(m.constraint_rewards))
        add("constraint_rewards", "shape must be [S][A][S]"), dims_ok = false;
    if (!shaped(m.nominal)) add("nominal", "shape must be [S][A][S]"), dims_ok = false;
    bool budgets_ok = m.budgets.size() == S;
    for (const auto& row : m.budgets) budgets_ok = budgets_ok && row.size() == A;
    if (!budgets_ok) add("budgets", "shape must be [S][A]"), dims_ok = false;

    if (dims_ok) {
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
                const auto& p = m.nominal[s][a];
                double total = 0.0;
                bool negative = false;
                for (double x : p) {
                    total += x;
                    negative = negative || !(x >= 0.0);
                }
                if (negative) add("nominal" + sa_location(s, a), "has a negative or NaN entry");
                if (std::abs(total - 1.0) > kSimplexTolerance) {
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << "sums to " << total << " instead of 1";
                    add("nominal" + sa_location(s, a), msg.str());
                }
                const double psi = m.budgets[s][a];
                if (!(psi >= 0.0 && psi <= 2.0)) {
                    std::ostringstream msg;
                    msg << "budget " << psi << " outside [0, 2] (clipping violation)";
                    add("budgets" + sa_location(s, a), msg.str());
                }
                for (std::size_t sn = 0; sn < S; ++sn) {
                    if (!std::isfinite(m.rewards[s][a][sn]))
                        add("rewards" + sa_location(s, a), "non-finite entry");
                    if (!std::isfinite(m.constraint_rewards[s][a][sn]))
                        add("constraint_rewards" + sa_location(s, a), "non-finite entry");
                }
            }
        }
    }

    if (m.p0.size() != S) {
        add("p0", "length must equal n_states");
    } else {
        double total = 0.0;
        bool negative = false;
        for (double x : m.p0) {
            total += x;
            negative = negative || !(x >= 0.0);
        }
        if (negative) add("p0", "has a negative or NaN entry");
        if (std::abs(total - 1.0) > kSimplexTolerance) add("p0", "does not sum to 1");
    }

    if (!(m.gamma > 0.0 && m.gamma <= 1.0)) add("gamma", "must lie in (0, 1]");
    if (m.gamma == 1.0 && !m.horizon) add("gamma", "gamma = 1 requires a finite horizon");
    if (m.horizon && *m.horizon == 0) add("horizon", "finite horizon must be at least 1");
    if (!std::isfinite(m.beta)) add("beta", "must be finite");
    return report;
}

void require_valid(const Rcmdp& model) {
    const auto report = validate(model);
    if (!report.ok()) throw std::invalid_argument("invalid model:\n" + report.to_string());
}

} // namespace rcmdp
