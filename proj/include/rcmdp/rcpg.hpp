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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace rcmdp {

/// zeta_1(k) = a1 / (1+k)^e1 (slow, multiplier) and zeta_2(k) = a2 / (1+k)^e2
/// (fast, policy). A zero coefficient freezes that timescale.
struct StepSchedule {
    double a1 = 0.05;
    double e1 = 0.9;
    double a2 = 0.05;
    double e2 = 0.6;

    double zeta1(std::size_t k) const;
    double zeta2(std::size_t k) const;
};

struct ScheduleReport {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Checks 0.5 < e2 < e1 <= 1 and non-negative coefficients, then confirms
/// numerically that zeta1/zeta2 decreases over k <= 1e6.
ScheduleReport step_schedule_check(const StepSchedule& schedule);

/// Monte-Carlo (or, with weights, exact) estimate of
/// sum_xi p(xi) (g(xi,r) + lambda g(xi,d)) - lambda beta.
/// `weights`, when given, must align with `batch`; otherwise the batch mean is used.
double lagrangian_estimate(std::span<const Trajectory> batch, double lambda, double beta,
                           double gamma, std::span<const double> weights = {});

/// sum_xi p(xi) (g(xi,r) + lambda g(xi,d)) sum_t score_t.
Vec grad_theta(std::span<const Trajectory> batch, double lambda, double gamma,
               std::span<const double> weights = {});

/// sum_xi p(xi) g(xi,d) - beta.
double grad_lambda(std::span<const Trajectory> batch, double beta, double gamma,
                   std::span<const double> weights = {});

/// Which robust value function drives the adversarial sampling.
enum class PessimismMode { reward, constraint, combined };

PessimismMode parse_pessimism(const std::string& name);
std::string to_string(PessimismMode mode);

struct RcpgConfig {
    StepSchedule schedule;
    std::size_t horizon = 50;
    std::size_t episodes = 1000;
    std::size_t batch_size = 1;
    double lambda0 = 0.0;
    double lambda_max = 100.0;
    PessimismMode pessimism = PessimismMode::combined;
    /// Adversary minimizes signal + gamma * pessimism (true) or the bare
    /// pessimism vector (false).
    bool fold_signal = true;
    /// Pessimism vector and reported robust returns refresh every this many episodes.
    std::size_t refresh_every = 10;
    std::uint64_t seed = 0;
    IterationOptions evaluation;
};

struct EpisodeRecord {
    std::size_t k = 0;
    double lagrangian = 0.0;
    double robust_return_r = 0.0;
    double robust_return_d = 0.0;
    double lambda = 0.0;
    double grad_theta_norm = 0.0;
    double grad_lambda = 0.0;

    bool operator==(const EpisodeRecord&) const = default;
};

/// Everything needed to resume training bit-exactly.
struct SaddleState {
    SoftmaxPolicy policy;
    double lambda = 0.0;
    std::size_t k = 0;
    Vec pessimism;
    /// Signal the pessimism vector was computed for.
    Signal pessimism_signal;
    Vec value_r;
    Vec value_d;
    double robust_return_r = 0.0;
    double robust_return_d = 0.0;
};

struct RcpgResult {
    SaddleState state;
    std::vector<EpisodeRecord> history;
};

/// Initial saddle state: uniform policy, lambda0, k = 0.
SaddleState initial_saddle_state(const Rcmdp& model, const RcpgConfig& config);

/// Runs episodes k = state.k .. config.episodes-1: samples `batch_size`
/// pessimistic trajectories, ascends theta with zeta_2(k) and descends lambda
/// with zeta_1(k), projecting onto [0, lambda_max].
///
/// Robust returns in the history are computed on `report_model` when given
/// (for instance the unshaped model when training on a shaped one).
RcpgResult rcpg_train(const Rcmdp& model, const RcpgConfig& config,
                      std::optional<SaddleState> resume = std::nullopt,
                      const Rcmdp* report_model = nullptr);

void write_rcpg_history_csv(std::ostream& out, std::span<const EpisodeRecord> history);

} // namespace rcmdp
