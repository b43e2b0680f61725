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

#include "rcmdp/policy.hpp"

#include <iosfwd>

namespace rcmdp {

/// Candidate Lyapunov function over a finite state space.
struct LyapunovFn {
    Vec values;
    std::size_t equilibrium = 0;
};

struct CandidateReport {
    bool ok = true;
    std::vector<std::string> failures;
};

/// V(s*) = 0 and V(s) > 0 elsewhere. The descent condition depends on the
/// policy and kernel and is checked along trajectories by descent_violations.
CandidateReport check_candidate(const LyapunovFn& lyapunov);

/// f(s, s') = V(s) - V(s').
double shaping_reward(const LyapunovFn& lyapunov, std::size_t s, std::size_t s_next);

/// Copy of `model` with rewards r + f; everything else is untouched.
Rcmdp shape_model(const Rcmdp& model, const LyapunovFn& lyapunov);

/// Copy of `model` whose constraint channel is d(s,a,s') = V(s) - V(s') with
/// budget `beta` (0 for stability, > 0 for asymptotic stability).
Rcmdp stability_constrained_model(const Rcmdp& model, const LyapunovFn& lyapunov, double beta);

/// Steps with V(s_{t+1}) > V(s_t) + 1e-12.
std::size_t descent_violations(const Trajectory& trajectory, const LyapunovFn& lyapunov);

struct InvarianceReport {
    std::size_t horizon = 0;
    std::size_t policies_enumerated = 0;
    /// Time-dependent deterministic policies attaining the optimum at every
    /// start state, encoded as base-A integers over (t, s) with t most significant.
    std::vector<std::uint64_t> optimal_original;
    std::vector<std::uint64_t> optimal_shaped;
    bool optimal_sets_equal = false;
    /// max |q'_0(s,a) - q_0(s,a) - V(s)|.
    double max_q_offset_error = 0.0;
    /// Optimal sets when the shaped model is evaluated with a zero terminal
    /// value instead of the potential; informational only.
    bool zero_terminal_sets_equal = false;
    bool passed = false;
};

struct InvarianceOptions {
    double lambda = 0.0;
    double tolerance = 1e-9;
    /// Upper bound on A^(S*T).
    std::uint64_t max_policies = 4000000;
};

/// Enumerates every deterministic time-dependent policy over `horizon` steps
/// with gamma = 1 on the original and shaped models (signal r + lambda d) and
/// compares the optimal sets and the t = 0 q-tables. The shaped model carries
/// the potential V as its terminal value so that the shaping telescopes.
/// Throws std::invalid_argument when the enumeration budget is exceeded.
InvarianceReport invariance_test(const Rcmdp& model, const LyapunovFn& lyapunov,
                                 std::size_t horizon, const InvarianceOptions& options = {});

/// `s,value` rows; the equilibrium is supplied separately.
LyapunovFn read_lyapunov_csv(std::istream& in, std::size_t equilibrium);

} // namespace rcmdp
