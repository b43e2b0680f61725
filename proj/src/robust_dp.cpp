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


#include "rcmdp/robust_dp.hpp"

#include "rcmdp/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace rcmdp {

namespace {

void check_dimension(const Rcmdp& model, std::size_t n, const char* what) {
    if (n != model.n_states) {
        std::ostringstream msg;
        msg << what << " has dimension " << n << ", model has " << model.n_states << " states";
        throw std::invalid_argument(msg.str());
    }
}

void check_policy(const Rcmdp& model, const PolicyTable& policy) {
    check_dimension(model, policy.size(), "policy table");
    for (std::size_t s = 0; s < policy.size(); ++s) {
        if (policy[s].size() != model.n_actions)
            throw std::invalid_argument("policy row has wrong number of actions");
        double total = 0.0;
        for (double x : policy[s]) {
            if (!(x >= 0.0)) throw std::invalid_argument("policy has a negative probability");
            total += x;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("policy row " + std::to_string(s) + " does not sum to 1");
    }
}

// z(s') = signal(s,a,s') + gamma v(s')
void fill_targets(const Rcmdp& model, const Signal& signal, std::size_t s, std::size_t a,
                  std::span<const double> v, Vec& z) {
    z.resize(model.n_states);
    for (std::size_t sn = 0; sn < model.n_states; ++sn)
        z[sn] = signal_value(model, signal, s, a, sn) + model.gamma * v[sn];
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

Vec optimality_backup(const Rcmdp& model, const Signal& signal, std::span<const double> v) {
    const Matrix q = robust_q_backup(model, signal, v);
    Vec out(model.n_states);
    for (std::size_t s = 0; s < model.n_states; ++s)
        out[s] = *std::max_element(q[s].begin(), q[s].end());
    return out;
}

} // namespace

Signal Signal::combined(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("Lagrange multiplier must be >= 0");
    return {Kind::combined, lambda};
}

double signal_value(const Rcmdp& model, const Signal& signal, std::size_t s, std::size_t a,
                    std::size_t s_next) {
    switch (signal.kind) {
    case Signal::Kind::reward: return model.rewards[s][a][s_next];
    case Signal::Kind::constraint: return model.constraint_rewards[s][a][s_next];
    case Signal::Kind::combined:
        return model.rewards[s][a][s_next] +
               signal.lambda * model.constraint_rewards[s][a][s_next];
    }
    return 0.0;
}

Matrix robust_q_backup(const Rcmdp& model, const Signal& signal, std::span<const double> v) {
    check_dimension(model, v.size(), "value vector");
    Matrix q(model.n_states, Vec(model.n_actions));
    Vec z;
    for (std::size_t s = 0; s < model.n_states; ++s) {
        for (std::size_t a = 0; a < model.n_actions; ++a) {
            fill_targets(model, signal, s, a, v, z);
            q[s][a] = worst_case_value(ambiguity_ball(model, s, a), z);
        }
    }
    return q;
}

ValueFunction robust_bellman_optimality(const Rcmdp& model, const ValueFunction& v) {
    return {optimality_backup(model, Signal::reward(), v.values), Signal::reward()};
}

ValueFunction rcmdp_bellman_optimality(const Rcmdp& model, double lambda, const ValueFunction& w) {
    const Signal signal = Signal::combined(lambda);
    return {optimality_backup(model, signal, w.values), signal};
}

Vec robust_policy_backup(const Rcmdp& model, const PolicyTable& policy, const Signal& signal,
                         std::span<const double> v) {
    check_dimension(model, v.size(), "value vector");
    Vec out(model.n_states, 0.0);
    Vec z;
    for (std::size_t s = 0; s < model.n_states; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < model.n_actions; ++a) {
            const double prob = policy[s][a];
            if (prob == 0.0) continue;
            fill_targets(model, signal, s, a, v, z);
            total += prob * worst_case_value(ambiguity_ball(model, s, a), z);
        }
        out[s] = total;
    }
    return out;
}

ValueIterationResult robust_value_iteration(const Rcmdp& model, std::optional<double> lambda,
                                            const IterationOptions& options) {
    require_valid(model);
    const Signal signal = lambda ? Signal::combined(*lambda) : Signal::reward();
    ValueIterationResult result;
    Vec v(model.n_states, 0.0);

    if (model.horizon) {
        for (std::size_t t = 0; t < *model.horizon; ++t) {
            Vec next = optimality_backup(model, signal, v);
            result.residuals.push_back(sup_distance(next, v));
            v = std::move(next);
        }
        result.value = {std::move(v), signal};
        return result;
    }

    double residual = 0.0;
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        Vec next = optimality_backup(model, signal, v);
        residual = sup_distance(next, v);
        result.residuals.push_back(residual);
        v = std::move(next);
        if (residual <= options.tol) {
            result.value = {std::move(v), signal};
            return result;
        }
    }
    throw ConvergenceError("robust value iteration did not reach tolerance", residual);
}

ValueFunction robust_policy_evaluation(const Rcmdp& model, const PolicyTable& policy,
                                       const Signal& signal, const IterationOptions& options,
                                       std::optional<Vec> initial) {
    check_policy(model, policy);
    if (model.horizon) {
        Vec v(model.n_states, 0.0);
        for (std::size_t t = 0; t < *model.horizon; ++t)
            v = robust_policy_backup(model, policy, signal, v);
        return {std::move(v), signal};
    }
    if (!(model.gamma < 1.0))
        throw std::invalid_argument("infinite-horizon evaluation requires gamma < 1");

    Vec v = initial ? std::move(*initial) : Vec(model.n_states, 0.0);
    check_dimension(model, v.size(), "initial value vector");
    double residual = 0.0;
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        Vec next = robust_policy_backup(model, policy, signal, v);
        residual = sup_distance(next, v);
        v = std::move(next);
        if (residual <= options.tol) return {std::move(v), signal};
    }
    throw ConvergenceError("robust policy evaluation did not reach tolerance", residual);
}

double robust_return(const Rcmdp& model, std::span<const double> values) {
    check_dimension(model, values.size(), "value vector");
    double out = 0.0;
    for (std::size_t s = 0; s < values.size(); ++s) out += model.p0[s] * values[s];
    return out;
}

double robust_return(const Rcmdp& model, const ValueFunction& value) {
    return robust_return(model, std::span<const double>(value.values));
}

std::vector<std::size_t> greedy_actions(const Matrix& q) {
    std::vector<std::size_t> out(q.size(), 0);
    for (std::size_t s = 0; s < q.size(); ++s)
        out[s] = static_cast<std::size_t>(std::max_element(q[s].begin(), q[s].end()) - q[s].begin());
    return out;
}

PolicyTable deterministic_table(const std::vector<std::size_t>& actions, std::size_t n_actions) {
    PolicyTable table(actions.size(), Vec(n_actions, 0.0));
    for (std::size_t s = 0; s < actions.size(); ++s) table[s].at(actions[s]) = 1.0;
    return table;
}

FiniteHorizonTables robust_finite_horizon(const Rcmdp& model, const Signal& signal,
                                          std::size_t horizon, std::optional<Vec> terminal) {
    FiniteHorizonTables tables;
    tables.values.assign(horizon + 1, Vec(model.n_states, 0.0));
    tables.q.assign(horizon, Matrix{});
    if (terminal) {
        check_dimension(model, terminal->size(), "terminal value vector");
        tables.values[horizon] = std::move(*terminal);
    }
    for (std::size_t t = horizon; t-- > 0;) {
        tables.q[t] = robust_q_backup(model, signal, tables.values[t + 1]);
        for (std::size_t s = 0; s < model.n_states; ++s)
            tables.values[t][s] = *std::max_element(tables.q[t][s].begin(), tables.q[t][s].end());
    }
    return tables;
}

void write_values_csv(std::ostream& out, std::span<const double> values) {
    const auto old_precision = out.precision(17);
    out << "s,value\n";
    for (std::size_t s = 0; s < values.size(); ++s) out << s << ',' << values[s] << '\n';
    out.precision(old_precision);
}

} // namespace rcmdp
