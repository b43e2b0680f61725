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


// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset, e.g. `acceptance 1 2 7`.

#include <rcmdp/actor_critic.hpp>
#include <rcmdp/ambiguity.hpp>
#include <rcmdp/envs.hpp>
#include <rcmdp/experiment.hpp>
#include <rcmdp/lyapunov.hpp>
#include <rcmdp/rcpg.hpp>

#include "oracles/bnb_oracle.hpp"
#include "oracles/dp_oracle.hpp"
#include "oracles/lp_oracle.hpp"
#include "oracles/policy_enum_oracle.hpp"
#include "oracles/trajectory_oracle.hpp"
#include "support/random_models.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace rcmdp;
using testing_support::random_model;
using testing_support::random_vector;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double sup_diff(const Vec& a, const Vec& b) { return oracle::sup_diff(a, b); }

// ---------------------------------------------------------------- 1
Outcome worst_case_equivalence() {
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<std::size_t> size(1, 4);
    std::uniform_int_distribution<int> step(0, 20);
    double worst_value = 0.0, worst_p = 0.0;
    int ties = 0, failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t S = size(gen);
        const Vec center = testing_support::random_simplex(S, gen);
        const double psi = 0.1 * step(gen);
        Vec v = random_vector(S, -10.0, 10.0, gen);
        if (trial % 10 == 0 && S > 1) v[S - 1] = v[0];  // exercise ties
        const auto lp = oracle::l1_worst_case(center, psi, v);
        const auto wc = worst_case_response(L1Ball{center, psi}, v);
        const double dv = std::abs(wc.value - lp.value);
        worst_value = std::max(worst_value, dv);
        bool ok = dv <= 1e-9;
        if (oracle::unique_minimizer(lp)) {
            const double dp = sup_diff(wc.p, lp.p);
            worst_p = std::max(worst_p, dp);
            ok = ok && dp <= 1e-8;
        } else {
            ++ties;
            // With several optimal vertices, the answer must be feasible and optimal.
            ok = ok && oracle::feasible(oracle::ball_constraints(center, psi), wc.p, 1e-12);
        }
        failures += ok ? 0 : 1;
    }
    std::ostringstream d;
    d << "1000 instances, max |value diff| " << worst_value << ", max |p diff| " << worst_p
      << ", tied instances " << ties << ", failures " << failures;
    return {failures == 0, d.str()};
}

// ---------------------------------------------------------------- 2
Outcome contraction() {
    std::mt19937_64 gen(202);
    std::uniform_int_distribution<std::size_t> states(2, 5), actions(1, 3);
    std::uniform_real_distribution<double> gamma(0.05, 0.99), lambda(0.0, 5.0);
    double worst_slack = -1e300;
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t S = states(gen);
        const Rcmdp m = random_model({S, actions(gen), gamma(gen), -1.0, 1.0}, gen);
        const ValueFunction w1{random_vector(S, -10, 10, gen), Signal::reward()};
        const ValueFunction w2{random_vector(S, -10, 10, gen), Signal::reward()};
        const double bound = m.gamma * sup_diff(w1.values, w2.values) + 1e-12;
        const double l = lambda(gen);
        const double a = sup_diff(robust_bellman_optimality(m, w1).values,
                                  robust_bellman_optimality(m, w2).values);
        const double b = sup_diff(rcmdp_bellman_optimality(m, l, w1).values,
                                  rcmdp_bellman_optimality(m, l, w2).values);
        worst_slack = std::max({worst_slack, a - bound + 1e-12, b - bound + 1e-12});
        failures += (a <= bound && b <= bound) ? 0 : 1;
    }
    std::ostringstream d;
    d << "1000 draws x 2 operators, max (||Tw1-Tw2|| - gamma||w1-w2||) = " << worst_slack
      << ", failures " << failures;
    return {failures == 0, d.str()};
}

// ---------------------------------------------------------------- 3
Outcome gradient_correctness() {
    std::mt19937_64 gen(303);
    double worst_rel = 0.0, worst_lambda = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t S = 2 + trial % 2, T = 2 + trial % 3;
        const Rcmdp m = random_model({S, 2, 0.9, 0.0, 1.0}, gen);
        const Vec theta = random_vector(2 * S, -1.5, 1.5, gen);
        const double lambda = 0.4 * (trial % 5), beta = -0.5;
        const SoftmaxPolicy pi(S, 2, theta);
        std::vector<Trajectory> batch;
        Vec weights;
        for (auto path : oracle::enumerate_paths(m, theta, T)) {
            for (auto& step : path.trajectory.steps) step.score = score(pi, step.s, step.a);
            batch.push_back(std::move(path.trajectory));
            weights.push_back(path.probability);
        }
        const Vec exact = grad_theta(batch, lambda, m.gamma, weights);
        const Vec fd = oracle::finite_difference_gradient(m, theta, T, lambda, beta);
        double scale = 0.0, err = 0.0;
        for (std::size_t i = 0; i < fd.size(); ++i) {
            scale = std::max(scale, std::abs(fd[i]));
            err = std::max(err, std::abs(exact[i] - fd[i]));
        }
        const double rel = err / std::max(scale, 1e-12);
        const double dl = std::abs(grad_lambda(batch, beta, m.gamma, weights) -
                                   (oracle::enumerated_constraint_return(m, theta, T) - beta));
        worst_rel = std::max(worst_rel, rel);
        worst_lambda = std::max(worst_lambda, dl);
        failures += (rel <= 1e-5 && dl <= 1e-12) ? 0 : 1;
    }
    std::ostringstream d;
    d << "20 MDPs, max relative grad_theta error " << worst_rel << ", max |grad_lambda diff| "
      << worst_lambda << ", failures " << failures;
    return {failures == 0, d.str()};
}

// ---------------------------------------------------------------- 4
GridSpec hazard_grid() {
    GridSpec spec;
    spec.width = spec.height = 4;
    spec.start = {0, 0};
    spec.goal = {3, 0};
    spec.hazards = {{{1, 0}, 1.0}, {{2, 0}, 1.0}};
    spec.slip = 0.0;
    spec.step_reward = 0.0;
    spec.goal_reward = 1.0;
    spec.gamma = 0.9;
    spec.beta = -1.2;
    return spec;
}

Rcmdp hazard_model() {
    Rcmdp m = make_gridworld(hazard_grid(), 0.2).model;
    m.p0.assign(m.n_states, 0.0);
    m.p0[0] = 1.0;
    return m;
}

RcpgConfig hazard_config(std::uint64_t seed) {
    RcpgConfig c;
    c.schedule = {0.2, 0.9, 1.0, 0.51};
    c.episodes = 300000;
    c.horizon = 30;
    c.batch_size = 1;
    c.refresh_every = 50;
    c.pessimism = PessimismMode::combined;
    c.fold_signal = true;
    c.seed = seed;
    return c;
}

std::string history_csv(const std::vector<EpisodeRecord>& history) {
    std::ostringstream out;
    write_rcpg_history_csv(out, history);
    return out.str();
}

std::string history_csv(const std::vector<AcStepRecord>& history) {
    std::ostringstream out;
    write_rcac_history_csv(out, history);
    return out.str();
}

struct Returns {
    double r, d;
};

Returns evaluate(const Rcmdp& m, const PolicyTable& table) {
    const IterationOptions tight{1e-12, 1000000};
    return {robust_return(m, robust_policy_evaluation(m, table, Signal::reward(), tight)),
            robust_return(m, robust_policy_evaluation(m, table, Signal::constraint(), tight))};
}

Outcome rcpg_end_to_end() {
    const Rcmdp m = hazard_model();
    oracle::BestFeasiblePolicy search(m);
    const auto best = search.solve();
    if (!best.found) return {false, "oracle found no feasible deterministic policy"};

    // The unconstrained optimum takes the hazard corridor; the budget excludes it.
    const auto greedy = greedy_actions(
        robust_q_backup(m, Signal::reward(),
                        robust_value_iteration(m, std::nullopt, {1e-12, 1000000}).value.values));
    const Returns risky = evaluate(m, deterministic_table(greedy, m.n_actions));

    int successes = 0;
    double min_r = 1e300, max_r = -1e300, min_d = 1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto result = rcpg_train(m, hazard_config(seed));
        const Returns got = evaluate(m, result.state.policy.table());
        min_r = std::min(min_r, got.r);
        max_r = std::max(max_r, got.r);
        min_d = std::min(min_d, got.d);
        const bool feasible = got.d >= m.beta - 0.01;
        const bool close = got.r >= 0.95 * best.rho_r;
        successes += (feasible && close) ? 1 : 0;
    }
    std::ostringstream d;
    d << "beta " << m.beta << ", risky route rho_r " << risky.r << " rho_d " << risky.d
      << " (infeasible), best feasible rho_r " << best.rho_r << " rho_d " << best.rho_d << " ("
      << best.nodes << " search nodes); runs within tolerance " << successes
      << "/20, final rho_r in [" << min_r << ", " << max_r << "], min rho_d " << min_d;
    return {risky.d < m.beta && successes >= 18, d.str()};
}

// ---------------------------------------------------------------- 5
Outcome shaping_invariance() {
    std::mt19937_64 gen(505);
    std::uniform_int_distribution<std::size_t> states(2, 3), actions(2, 3), horizon(2, 4);
    std::uniform_real_distribution<double> lambda(0.0, 2.0);
    int failures = 0, oracle_checked = 0;
    double worst_offset = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t S = states(gen), A = actions(gen), T = horizon(gen);
        // Keep the flat enumeration below a million policies.
        while (std::pow(static_cast<double>(A), static_cast<double>(S * T)) > 1e6) --T;
        const double psi = trial % 2 ? 0.5 : 0.0;
        const Rcmdp m = random_model({S, A, 1.0, psi, 1.0}, gen);
        LyapunovFn V{random_vector(S, 0.1, 5.0, gen), static_cast<std::size_t>(trial) % S};
        V.values[V.equilibrium] = 0.0;
        InvarianceOptions options;
        options.lambda = lambda(gen);
        const auto report = invariance_test(m, V, T, options);
        bool ok = report.passed && report.optimal_sets_equal && report.max_q_offset_error <= 1e-9;
        worst_offset = std::max(worst_offset, report.max_q_offset_error);

        // Independent cross-check with the LP-based evaluator.
        const oracle::Weights w{1.0, options.lambda};
        const Rcmdp shaped = shape_model(m, V);
        const auto q = oracle::lp_finite_horizon_q0(m, w, T, Vec(S, 0.0));
        const auto qs = oracle::lp_finite_horizon_q0(shaped, w, T, V.values);
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                const double err = std::abs(qs[s][a] - q[s][a] - V.values[s]);
                worst_offset = std::max(worst_offset, err);
                ok = ok && err <= 1e-9;
            }
        if (std::pow(static_cast<double>(A), static_cast<double>(S * T)) <= 4096) {
            ++oracle_checked;
            const auto plain = oracle::optimal_policy_codes(m, w, T, Vec(S, 0.0), 1e-9);
            const auto transformed = oracle::optimal_policy_codes(shaped, w, T, V.values, 1e-9);
            ok = ok && plain == transformed && plain == report.optimal_original;
        }
        failures += ok ? 0 : 1;
    }
    std::ostringstream d;
    d << "50 instances (" << oracle_checked << " with flat oracle enumeration), max q offset error "
      << worst_offset << ", failures " << failures;
    return {failures == 0, d.str()};
}

// ---------------------------------------------------------------- 6
struct ShapingSetup {
    Rcmdp plain;
    Rcmdp shaped;
};

ShapingSetup open_grid() {
    GridSpec spec;
    spec.width = spec.height = 4;
    spec.start = {0, 0};
    spec.goal = {3, 3};
    spec.slip = 0.1;
    spec.gamma = 0.95;
    spec.goal_reward = 1.0;
    const auto bench = make_gridworld(spec, 0.2);
    Rcmdp plain = bench.model;
    plain.p0.assign(plain.n_states, 0.0);
    plain.p0[0] = 1.0;
    return {plain, shape_model(plain, bench.lyapunov)};
}

RcpgConfig speedup_config(std::uint64_t seed) {
    RcpgConfig c;
    c.schedule = {0.05, 0.9, 0.2, 0.51};
    c.episodes = 10000;
    c.horizon = 40;
    c.refresh_every = 10;
    c.seed = seed;
    return c;
}

std::size_t threshold_episode(const std::vector<EpisodeRecord>& history) {
    std::vector<double> returns;
    std::vector<std::size_t> k;
    for (const auto& rec : history) {
        returns.push_back(rec.robust_return_r);
        k.push_back(rec.k);
    }
    return episodes_to_threshold(returns, k, 0.9);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// P(X >= wins) for X ~ Binomial(n, 1/2).
double sign_test_p(int wins, int n) {
    double p = 0.0;
    for (int k = wins; k <= n; ++k) {
        double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                          n * std::log(2.0);
        p += std::exp(log_term);
    }
    return p;
}

Outcome shaping_speedup() {
    const auto setup = open_grid();
    std::vector<double> shaped_k, plain_k;
    int wins = 0, ties = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto shaped = rcpg_train(setup.shaped, speedup_config(seed), std::nullopt, &setup.plain);
        const auto plain = rcpg_train(setup.plain, speedup_config(seed));
        const double ks = static_cast<double>(threshold_episode(shaped.history));
        const double kp = static_cast<double>(threshold_episode(plain.history));
        shaped_k.push_back(ks);
        plain_k.push_back(kp);
        wins += ks < kp ? 1 : 0;
        ties += ks == kp ? 1 : 0;
    }
    const int n = 20 - ties;
    const double p = sign_test_p(wins, n);
    const double ms = median(shaped_k), mp = median(plain_k);
    std::ostringstream d;
    d << "median episodes to 90% of final: shaped " << ms << ", unshaped " << mp << "; shaped faster in "
      << wins << "/" << n << " untied pairs, one-sided sign test p = " << p;
    return {ms < mp && p < 0.05, d.str()};
}

// ---------------------------------------------------------------- 7
Rcmdp critic_chain() {
    // Reflecting 4-state chain; action 0 drifts right, action 1 drifts left.
    Rcmdp m = make_empty_model(4, 2);
    m.gamma = 0.8;
    for (std::size_t s = 0; s < 4; ++s) {
        const std::size_t right = std::min<std::size_t>(s + 1, 3);
        const std::size_t left = s == 0 ? 0 : s - 1;
        m.nominal[s][0].assign(4, 0.0);
        m.nominal[s][0][right] += 0.8;
        m.nominal[s][0][s] += 0.2;
        m.nominal[s][1].assign(4, 0.0);
        m.nominal[s][1][left] += 0.7;
        m.nominal[s][1][s] += 0.3;
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t sn = 0; sn < 4; ++sn) {
                m.rewards[s][a][sn] = 0.25 * static_cast<double>(sn) + (a == 0 ? 0.1 : 0.0);
                m.constraint_rewards[s][a][sn] = sn == 3 ? -1.0 : 0.0;
            }
    }
    m.p0.assign(4, 0.25);
    return m;
}

RcacConfig critic_config(std::uint64_t seed) {
    RcacConfig c;
    c.schedule = {0.5, 0.6, 0.0, 0.55};
    c.lambda = 0.5;
    c.episodes = 1000;
    c.max_steps = 100;
    c.per_step_schedule = true;
    c.seed = seed;
    return c;
}

const SoftmaxPolicy& frozen_actor() {
    static const SoftmaxPolicy pi(4, 2, {0.4, -0.2, 0.0, 0.3, -0.5, 0.5, 0.2, 0.1});
    return pi;
}

Outcome critic_soundness() {
    const Rcmdp m = critic_chain();
    const Vec truth = robust_policy_evaluation(m, frozen_actor().table(), Signal::combined(0.5),
                                               {1e-13, 1000000})
                          .values;
    double worst = 0.0;
    std::size_t steps = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto result = rcac_train(m, critic_config(seed), frozen_actor());
        if (result.policy != frozen_actor()) return {false, "actor moved although zeta_2 = 0"};
        worst = std::max(worst, sup_diff(result.critic.w, truth));
        steps = result.history.size();
    }
    std::ostringstream d;
    d << steps << " steps per run, 3 seeds, max sup-norm critic error " << worst << " (limit 0.05)";
    return {worst <= 0.05, d.str()};
}

// ---------------------------------------------------------------- 8
Outcome hoeffding_calibration() {
    Rcmdp truth = make_empty_model(2, 2);
    truth.gamma = 0.9;
    truth.nominal[0][0] = {0.7, 0.3};
    truth.nominal[0][1] = {0.2, 0.8};
    truth.nominal[1][0] = {0.4, 0.6};
    truth.nominal[1][1] = {0.9, 0.1};
    truth.rewards[0][0] = {1.0, 0.0};
    truth.rewards[0][1] = {0.5, 0.2};
    truth.rewards[1][0] = {0.0, 0.8};
    truth.rewards[1][1] = {0.3, 1.0};
    truth.p0 = {0.5, 0.5};
    const PolicyTable pi{{0.6, 0.4}, {0.3, 0.7}};
    const IterationOptions tight{1e-12, 1000000};
    const double true_return =
        robust_return(truth, robust_policy_evaluation(truth, pi, Signal::reward(), tight));

    BuildOptions options;
    options.delta = 0.1;
    options.gamma = truth.gamma;
    options.p0 = truth.p0;
    int below = 0;
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        Rng rng(derive_seed(808, rep));
        const Rcmdp ingested = build_from_dataset(generate_dataset(truth, 30, rng), options);
        const double robust =
            robust_return(ingested, robust_policy_evaluation(ingested, pi, Signal::reward(), tight));
        below += robust <= true_return ? 1 : 0;
    }
    std::ostringstream d;
    d << "true return " << true_return << ", psi " << hoeffding_budget(30, 2, 2, 0.1)
      << "; robust return <= true return in " << below << "/200 datasets (need >= 170)";
    return {below >= 170, d.str()};
}

// ---------------------------------------------------------------- 9
Outcome determinism() {
    int mismatches = 0, compared = 0;
    {
        const Rcmdp m = hazard_model();
        for (std::uint64_t seed : {1, 2}) {
            const auto a = history_csv(rcpg_train(m, hazard_config(seed)).history);
            const auto b = history_csv(rcpg_train(m, hazard_config(seed)).history);
            mismatches += a == b ? 0 : 1;
            ++compared;
        }
    }
    {
        const auto setup = open_grid();
        for (std::uint64_t seed : {1, 2, 3}) {
            for (bool shaped : {false, true}) {
                const Rcmdp& train = shaped ? setup.shaped : setup.plain;
                const auto a =
                    history_csv(rcpg_train(train, speedup_config(seed), std::nullopt, &setup.plain).history);
                const auto b =
                    history_csv(rcpg_train(train, speedup_config(seed), std::nullopt, &setup.plain).history);
                mismatches += a == b ? 0 : 1;
                ++compared;
            }
        }
    }
    {
        const Rcmdp m = critic_chain();
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto a = history_csv(rcac_train(m, critic_config(seed), frozen_actor()).history);
            const auto b = history_csv(rcac_train(m, critic_config(seed), frozen_actor()).history);
            mismatches += a == b ? 0 : 1;
            ++compared;
        }
    }
    std::ostringstream d;
    d << compared << " metrics files regenerated (criteria 4, 6, 7 configurations), "
      << mismatches << " differ";
    return {mismatches == 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"L1 worst-case oracle equivalence", worst_case_equivalence},
        {"Bellman contraction", contraction},
        {"policy-gradient correctness", gradient_correctness},
        {"RCPG end-to-end on the hazard gridworld", rcpg_end_to_end},
        {"shaping invariance", shaping_invariance},
        {"shaping speedup", shaping_speedup},
        {"RC-AC critic soundness", critic_soundness},
        {"Hoeffding calibration", hoeffding_calibration},
        {"determinism", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("Criterion %d: %s  %s [%.1f s] -- %s\n", id, outcome.pass ? "PASS" : "FAIL",
                    criteria[i].first, secs, outcome.detail.c_str());
        std::fflush(stdout);
        failed += outcome.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
