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

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>

namespace rcmdp {

/// Which per-transition signal an operator accumulates.
struct Signal {
    enum class Kind { reward, constraint, combined };
    Kind kind = Kind::reward;
    /// Multiplier on the constraint channel, used only by `combined`.
    double lambda = 0.0;

    static Signal reward() { return {Kind::reward, 0.0}; }
    static Signal constraint() { return {Kind::constraint, 0.0}; }
    /// r + lambda * d. Throws std::invalid_argument when lambda < 0.
    static Signal combined(double lambda);

    bool operator==(const Signal&) const = default;
};

/// Per-transition value of `signal` for (s, a, s_next).
double signal_value(const Rcmdp& model, const Signal& signal, std::size_t s, std::size_t a,
                    std::size_t s_next);

struct ValueFunction {
    Vec values;
    Signal signal;
};

/// Thrown when value iteration exhausts its sweep budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Explicit stochastic policy table, pi[s][a].
using PolicyTable = Matrix;

/// q[s][a] = min_p sum_s' p(s') (signal(s,a,s') + gamma * v(s')).
Matrix robust_q_backup(const Rcmdp& model, const Signal& signal, std::span<const double> v);

/// (T v)(s) = max_a min_p sum_s' p(s') (r(s,a,s') + gamma v(s')).
ValueFunction robust_bellman_optimality(const Rcmdp& model, const ValueFunction& v);

/// Same operator on r + lambda * d. Throws std::invalid_argument for lambda < 0.
ValueFunction rcmdp_bellman_optimality(const Rcmdp& model, double lambda, const ValueFunction& w);

/// Policy-restricted operator: sum_a pi(a|s) min_p sum_s' p(s') (signal + gamma v(s')).
Vec robust_policy_backup(const Rcmdp& model, const PolicyTable& policy, const Signal& signal,
                         std::span<const double> v);

struct IterationOptions {
    double tol = 1e-8;
    std::size_t max_iter = 100000;
};

struct ValueIterationResult {
    ValueFunction value;
    /// Sup-norm change of each sweep.
    Vec residuals;
};

/// Robust value iteration on the reward signal, or on r + lambda d when
/// `lambda` is set. Finite-horizon models run exactly `horizon` sweeps from
/// zero; otherwise sweeps until the residual drops to `tol`.
ValueIterationResult robust_value_iteration(const Rcmdp& model, std::optional<double> lambda,
                                            const IterationOptions& options = {});

/// Robust evaluation of a stationary policy for one signal.
/// `initial` warm-starts infinite-horizon iteration.
ValueFunction robust_policy_evaluation(const Rcmdp& model, const PolicyTable& policy,
                                       const Signal& signal, const IterationOptions& options = {},
                                       std::optional<Vec> initial = std::nullopt);

/// p0^T v.
double robust_return(const Rcmdp& model, const ValueFunction& value);
double robust_return(const Rcmdp& model, std::span<const double> values);

/// Greedy deterministic policy (lowest action index on ties) for a q table.
std::vector<std::size_t> greedy_actions(const Matrix& q);
PolicyTable deterministic_table(const std::vector<std::size_t>& actions, std::size_t n_actions);

/// Backward-induction tables for a finite horizon T: values[t] for t = 0..T
/// (values[T] = terminal) and q[t] for t = 0..T-1, optimizing over actions.
struct FiniteHorizonTables {
    std::vector<Vec> values;
    std::vector<Matrix> q;
};

FiniteHorizonTables robust_finite_horizon(const Rcmdp& model, const Signal& signal,
                                          std::size_t horizon,
                                          std::optional<Vec> terminal = std::nullopt);

/// Writes `s,value` rows at 17 significant digits.
void write_values_csv(std::ostream& out, std::span<const double> values);

} // namespace rcmdp
