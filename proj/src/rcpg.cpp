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


#include "rcmdp/rcpg.hpp"

#include "rcmdp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rcmdp {

namespace {

// Normalized per-trajectory weights: either the supplied ones or 1/n.
Vec batch_weights(std::size_t n, std::span<const double> weights) {
    if (n == 0) throw std::invalid_argument("empty trajectory batch");
    if (weights.empty()) return Vec(n, 1.0 / static_cast<double>(n));
    if (weights.size() != n)
        throw std::invalid_argument("weights must have one entry per trajectory");
    return Vec(weights.begin(), weights.end());
}

double norm2(std::span<const double> v) {
    double total = 0.0;
    for (double x : v) total += x * x;
    return std::sqrt(total);
}

} // namespace

double StepSchedule::zeta1(std::size_t k) const {
    return a1 / std::pow(1.0 + static_cast<double>(k), e1);
}

double StepSchedule::zeta2(std::size_t k) const {
    return a2 / std::pow(1.0 + static_cast<double>(k), e2);
}

ScheduleReport step_schedule_check(const StepSchedule& schedule) {
    ScheduleReport report;
    auto fail = [&](std::string why) {
        report.ok = false;
        report.failures.push_back(std::move(why));
    };
    if (!(schedule.a1 >= 0.0) || !(schedule.a2 >= 0.0))
        fail("step-size coefficients must be non-negative");
    if (!(schedule.e2 > 0.5))
        fail("e2 must exceed 0.5, otherwise the squared step sizes are not summable");
    if (!(schedule.e1 <= 1.0))
        fail("e1 must be at most 1, otherwise the step sizes are summable");
    if (!(schedule.e2 < schedule.e1))
        fail("e2 must be below e1 so that zeta1 = o(zeta2) (timescale order inverted)");
    if (!report.ok) return report;

    if (schedule.a1 > 0.0 && schedule.a2 > 0.0) {
        double previous = schedule.zeta1(0) / schedule.zeta2(0);
        for (std::size_t k = 10; k <= 1000000; k *= 10) {
            const double ratio = schedule.zeta1(k) / schedule.zeta2(k);
            if (!(ratio < previous)) {
                fail("zeta1/zeta2 does not decrease at k=" + std::to_string(k));
                break;
            }
            previous = ratio;
        }
    }
    return report;
}

double lagrangian_estimate(std::span<const Trajectory> batch, double lambda, double beta,
                           double gamma, std::span<const double> weights) {
    const Vec w = batch_weights(batch.size(), weights);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        total += w[i] * (discounted_sum(batch[i], Channel::reward, gamma) +
                         lambda * discounted_sum(batch[i], Channel::constraint, gamma));
    return total - lambda * beta;
}

Vec grad_theta(std::span<const Trajectory> batch, double lambda, double gamma,
               std::span<const double> weights) {
    const Vec w = batch_weights(batch.size(), weights);
    Vec grad;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Trajectory& xi = batch[i];
        const double ret = discounted_sum(xi, Channel::reward, gamma) +
                           lambda * discounted_sum(xi, Channel::constraint, gamma);
        for (const auto& step : xi.steps) {
            if (grad.empty()) grad.assign(step.score.size(), 0.0);
            if (step.score.size() != grad.size())
                throw std::invalid_argument("score vectors differ in length");
            for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += w[i] * ret * step.score[j];
        }
    }
    return grad;
}

double grad_lambda(std::span<const Trajectory> batch, double beta, double gamma,
                   std::span<const double> weights) {
    const Vec w = batch_weights(batch.size(), weights);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        total += w[i] * discounted_sum(batch[i], Channel::constraint, gamma);
    return total - beta;
}

PessimismMode parse_pessimism(const std::string& name) {
    if (name == "reward") return PessimismMode::reward;
    if (name == "constraint") return PessimismMode::constraint;
    if (name == "combined") return PessimismMode::combined;
    throw std::invalid_argument("unknown pessimism mode '" + name + "'");
}

std::string to_string(PessimismMode mode) {
    switch (mode) {
    case PessimismMode::reward: return "reward";
    case PessimismMode::constraint: return "constraint";
    case PessimismMode::combined: return "combined";
    }
    return "combined";
}

SaddleState initial_saddle_state(const Rcmdp& model, const RcpgConfig& config) {
    SaddleState state;
    state.policy = SoftmaxPolicy(model.n_states, model.n_actions);
    state.lambda = std::clamp(config.lambda0, 0.0, config.lambda_max);
    state.k = 0;
    return state;
}

RcpgResult rcpg_train(const Rcmdp& model, const RcpgConfig& config,
                      std::optional<SaddleState> resume, const Rcmdp* report_model) {
    require_valid(model);
    const auto schedule_report = step_schedule_check(config.schedule);
    if (!schedule_report.ok)
        throw std::invalid_argument("invalid step schedule: " + schedule_report.failures.front());
    if (config.batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
    if (config.refresh_every == 0) throw std::invalid_argument("refresh interval must be >= 1");
    if (!(config.lambda_max >= 0.0)) throw std::invalid_argument("lambda_max must be >= 0");
    const Rcmdp& reporting = report_model ? *report_model : model;
    if (reporting.n_states != model.n_states || reporting.n_actions != model.n_actions)
        throw std::invalid_argument("report model shape differs from training model");

    RcpgResult result;
    result.state = resume ? std::move(*resume) : initial_saddle_state(model, config);
    SaddleState& state = result.state;
    if (state.policy.n_states() != model.n_states || state.policy.n_actions() != model.n_actions)
        throw std::invalid_argument("resumed policy shape does not match the model");

    auto warm = [](const Vec& v) { return v.empty() ? std::nullopt : std::optional<Vec>(v); };

    std::vector<Trajectory> batch(config.batch_size);
    for (; state.k < config.episodes; ++state.k) {
        const std::size_t k = state.k;
        if (k % config.refresh_every == 0 || state.pessimism.empty()) {
            const PolicyTable table = state.policy.table();
            state.value_r = robust_policy_evaluation(reporting, table, Signal::reward(),
                                                     config.evaluation, warm(state.value_r))
                                .values;
            state.value_d = robust_policy_evaluation(reporting, table, Signal::constraint(),
                                                     config.evaluation, warm(state.value_d))
                                .values;
            state.robust_return_r = robust_return(reporting, state.value_r);
            state.robust_return_d = robust_return(reporting, state.value_d);

            Signal signal = Signal::combined(state.lambda);
            if (config.pessimism == PessimismMode::reward) signal = Signal::reward();
            if (config.pessimism == PessimismMode::constraint) signal = Signal::constraint();
            state.pessimism_signal = signal;
            const bool reuse = report_model == nullptr && signal.kind != Signal::Kind::combined;
            if (reuse) {
                state.pessimism =
                    signal.kind == Signal::Kind::reward ? state.value_r : state.value_d;
            } else {
                state.pessimism = robust_policy_evaluation(model, table, signal,
                                                           config.evaluation, warm(state.pessimism))
                                      .values;
            }
        }

        Rng rng(derive_seed(config.seed, k));
        for (auto& xi : batch)
            xi = sample_trajectory(model, state.policy, state.pessimism, config.horizon, rng,
                                   config.fold_signal ? std::optional<Signal>(state.pessimism_signal)
                                                      : std::nullopt);

        EpisodeRecord record;
        record.k = k;
        record.lagrangian = lagrangian_estimate(batch, state.lambda, model.beta, model.gamma);
        const Vec g_theta = grad_theta(batch, state.lambda, model.gamma);
        const double g_lambda = grad_lambda(batch, model.beta, model.gamma);

        const double zeta2 = config.schedule.zeta2(k);
        Vec& theta = state.policy.logits();
        for (std::size_t j = 0; j < g_theta.size(); ++j) theta[j] += zeta2 * g_theta[j];
        state.lambda = std::clamp(state.lambda - config.schedule.zeta1(k) * g_lambda, 0.0,
                                  config.lambda_max);

        record.robust_return_r = state.robust_return_r;
        record.robust_return_d = state.robust_return_d;
        record.lambda = state.lambda;
        record.grad_theta_norm = norm2(g_theta);
        record.grad_lambda = g_lambda;
        result.history.push_back(record);
    }
    return result;
}

void write_rcpg_history_csv(std::ostream& out, std::span<const EpisodeRecord> history) {
    out << "k,lagrangian,robust_return_r,robust_return_d,lambda,grad_theta_norm,grad_lambda\n";
    for (const auto& rec : history)
        out << rec.k << ',' << csv::format(rec.lagrangian) << ','
            << csv::format(rec.robust_return_r) << ',' << csv::format(rec.robust_return_d) << ','
            << csv::format(rec.lambda) << ',' << csv::format(rec.grad_theta_norm) << ','
            << csv::format(rec.grad_lambda) << '\n';
}

} // namespace rcmdp
