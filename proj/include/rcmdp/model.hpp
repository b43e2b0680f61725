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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rcmdp {

using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;
/// Indexed as [s][a][s'].
using Tensor3 = std::vector<Matrix>;

/// Tabular robust constrained MDP with s,a-rectangular L1 ambiguity sets.
///
/// `constraint_rewards` hold the negated constraint costs, so the worst case
/// for both signals is a minimum over the ambiguity set and feasibility reads
/// `robust_return(d) >= beta`.
struct Rcmdp {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    Tensor3 rewards;
    Tensor3 constraint_rewards;
    Tensor3 nominal;
    Matrix budgets;
    double gamma = 0.9;
    /// Number of decision steps; nullopt means an unbounded horizon.
    std::optional<std::size_t> horizon;
    double beta = 0.0;
    Vec p0;

    bool operator==(const Rcmdp&) const = default;
};

/// Allocates a model with zero rewards, self-loop nominal kernel, zero budgets
/// and a uniform initial distribution.
Rcmdp make_empty_model(std::size_t n_states, std::size_t n_actions);

struct TransitionRecord {
    std::size_t s = 0;
    std::size_t a = 0;
    std::size_t s_next = 0;
    double r = 0.0;
    /// Raw (positive means bad) constraint cost.
    double d_raw = 0.0;

    bool operator==(const TransitionRecord&) const = default;
};

struct TransitionDataset {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<TransitionRecord> records;

    bool operator==(const TransitionDataset&) const = default;
};

struct BuildOptions {
    double delta = 0.05;
    double gamma = 0.9;
    std::optional<std::size_t> horizon;
    double beta = 0.0;
    /// Defaults to uniform when absent.
    std::optional<Vec> p0;
};

/// Constraint costs become negative rewards.
inline double negate_costs(double d_raw) { return -d_raw; }

/// Hoeffding L1 radius for `n` samples, clipped to the simplex diameter 2.
double hoeffding_budget(std::size_t n, std::size_t n_states, std::size_t n_actions,
                        double delta);

/// Estimates the nominal kernel, mean rewards and Hoeffding budgets from data.
/// Throws std::invalid_argument if delta is outside (0,1), ids are out of
/// range, or some (s,a) pair has no samples.
Rcmdp build_from_dataset(const TransitionDataset& data, const BuildOptions& options);

struct ValidationIssue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

ValidationReport validate(const Rcmdp& model);

/// Throws std::invalid_argument with the report text when the model is invalid.
void require_valid(const Rcmdp& model);

} // namespace rcmdp
