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


#include "rcmdp/actor_critic.hpp"

#include "rcmdp/ambiguity.hpp"
#include "rcmdp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rcmdp {

RcacResult rcac_train(const Rcmdp& model, const RcacConfig& config,
                      std::optional<SoftmaxPolicy> initial_policy,
                      std::optional<CriticTable> initial_critic,
                      const TransitionObserver& observer) {
    require_valid(model);
    const auto schedule_report = step_schedule_check(config.schedule);
    if (!schedule_report.ok)
        throw std::invalid_argument("invalid step schedule: " + schedule_report.failures.front());
    if (!(config.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (config.max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");

    RcacResult result;
    result.policy = initial_policy ? std::move(*initial_policy)
                                   : SoftmaxPolicy(model.n_states, model.n_actions);
    result.critic = initial_critic ? std::move(*initial_critic)
                                   : CriticTable{Vec(model.n_states, 0.0)};
    if (result.critic.w.size() != model.n_states)
        throw std::invalid_argument("critic must have one weight per state");
    if (result.policy.n_states() != model.n_states ||
        result.policy.n_actions() != model.n_actions)
        throw std::invalid_argument("policy shape does not match the model");
    result.lambda = config.lambda;

    Vec& w = result.critic.w;
    Vec& theta = result.policy.logits();
    std::size_t global_step = 0;
    Trajectory episode_trace;

    for (std::size_t j = 0; j < config.episodes; ++j) {
        Rng rng(derive_seed(config.seed, j));
        std::size_t s = sample_categorical(model.p0, rng);
        episode_trace.steps.clear();

        for (std::size_t t = 0; t < config.max_steps && !is_terminal(model, s); ++t) {
            const Vec probs = result.policy.distribution(s);
            const std::size_t a = sample_categorical(probs, rng);
            const std::optional<Signal> fold =
                config.fold_signal ? std::optional<Signal>(Signal::combined(result.lambda))
                                   : std::nullopt;
            const WorstCase worst =
                worst_case_response(ambiguity_ball(model, s, a), adversary_target(model, s, a, w, fold));
            if (observer) observer(s, a, worst.p, w);
            const std::size_t s_next = sample_categorical(worst.p, rng);

            const double r = model.rewards[s][a][s_next];
            const double d = model.constraint_rewards[s][a][s_next];
            const double delta = td_error(r + result.lambda * d, w[s], w[s_next], model.gamma,
                                          is_terminal(model, s_next));

            const std::size_t k = config.per_step_schedule ? global_step : j;
            const double actor_step = config.schedule.zeta2(k);
            if (actor_step != 0.0) {
                const std::size_t base = s * model.n_actions;
                for (std::size_t b = 0; b < model.n_actions; ++b)
                    theta[base + b] += actor_step * delta * ((b == a ? 1.0 : 0.0) - probs[b]);
            }
            w[s] += config.schedule.zeta1(k) * delta;

            AcStepRecord record;
            record.step = global_step;
            record.episode = j;
            record.s = s;
            record.a = a;
            record.delta = delta;
            record.lambda = result.lambda;
            double sq = 0.0;
            for (double x : w) sq += x * x;
            record.w_norm = std::sqrt(sq);
            result.history.push_back(record);

            if (config.update_lambda) {
                TrajectoryStep step;
                step.t = t;
                step.s = s;
                step.a = a;
                step.s_next = s_next;
                step.r = r;
                step.d = d;
                episode_trace.steps.push_back(std::move(step));
            }
            ++global_step;
            s = s_next;
        }

        if (config.update_lambda && !episode_trace.empty()) {
            const double g = grad_lambda(std::span<const Trajectory>(&episode_trace, 1), model.beta,
                                         model.gamma);
            result.lambda = std::clamp(result.lambda - config.schedule.zeta1(j) * g, 0.0,
                                       config.lambda_max);
        }
    }
    return result;
}

void write_rcac_history_csv(std::ostream& out, std::span<const AcStepRecord> history) {
    out << "step,episode,s,a,delta,lambda,w_norm\n";
    for (const auto& rec : history)
        out << rec.step << ',' << rec.episode << ',' << rec.s << ',' << rec.a << ','
            << csv::format(rec.delta) << ',' << csv::format(rec.lambda) << ','
            << csv::format(rec.w_norm) << '\n';
}

} // namespace rcmdp
