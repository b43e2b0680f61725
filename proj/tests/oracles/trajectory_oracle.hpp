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

// Exhaustive trajectory enumeration for tiny models under the nominal kernel.
// Every length-T path from p0 is listed together with its probability under a
// softmax policy computed here from scratch. From that list the Lagrangian,
// its exact gradients and finite-difference approximations follow directly.

#include <rcmdp/model.hpp>
#include <rcmdp/policy.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

// logits laid out row-major: theta[s * A + a].
inline Vec softmax_row(const Vec& theta, std::size_t n_actions, std::size_t s) {
    double m = -1e300;
    for (std::size_t a = 0; a < n_actions; ++a) m = std::max(m, theta[s * n_actions + a]);
    Vec p(n_actions);
    double z = 0.0;
    for (std::size_t a = 0; a < n_actions; ++a) z += p[a] = std::exp(theta[s * n_actions + a] - m);
    for (double& x : p) x /= z;
    return p;
}

struct EnumeratedPath {
    double probability = 0.0;
    rcmdp::Trajectory trajectory;  // carries score vectors computed by the oracle
};

inline std::vector<EnumeratedPath> enumerate_paths(const rcmdp::Rcmdp& m, const Vec& theta,
                                                   std::size_t horizon) {
    const std::size_t S = m.n_states, A = m.n_actions;
    std::vector<EnumeratedPath> out;
    EnumeratedPath current;
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t t, std::size_t s,
                                                                       double prob) {
        if (t == horizon) {
            current.probability = prob;
            out.push_back(current);
            return;
        }
        const Vec pi = softmax_row(theta, A, s);
        for (std::size_t a = 0; a < A; ++a) {
            for (std::size_t sn = 0; sn < S; ++sn) {
                const double step_prob = pi[a] * m.nominal[s][a][sn];
                if (step_prob == 0.0) continue;
                rcmdp::TrajectoryStep step;
                step.t = t;
                step.s = s;
                step.a = a;
                step.s_next = sn;
                step.r = m.rewards[s][a][sn];
                step.d = m.constraint_rewards[s][a][sn];
                step.score.assign(S * A, 0.0);
                for (std::size_t b = 0; b < A; ++b)
                    step.score[s * A + b] = (b == a ? 1.0 : 0.0) - pi[b];
                current.trajectory.steps.push_back(step);
                walk(t + 1, sn, prob * step_prob);
                current.trajectory.steps.pop_back();
            }
        }
    };
    for (std::size_t s0 = 0; s0 < S; ++s0)
        if (m.p0[s0] > 0.0) walk(0, s0, m.p0[s0]);
    return out;
}

inline double path_return(const rcmdp::Trajectory& traj, bool constraint, double gamma) {
    double g = 0.0, discount = 1.0;
    for (const auto& step : traj.steps) {
        g += discount * (constraint ? step.d : step.r);
        discount *= gamma;
    }
    return g;
}

// Exact Lagrangian sum_xi p(xi)(g_r + lambda g_d) - lambda beta.
inline double enumerated_lagrangian(const rcmdp::Rcmdp& m, const Vec& theta, std::size_t horizon,
                                    double lambda, double beta) {
    double total = 0.0;
    for (const auto& path : enumerate_paths(m, theta, horizon))
        total += path.probability * (path_return(path.trajectory, false, m.gamma) +
                                     lambda * path_return(path.trajectory, true, m.gamma));
    return total - lambda * beta;
}

inline double enumerated_constraint_return(const rcmdp::Rcmdp& m, const Vec& theta,
                                           std::size_t horizon) {
    double total = 0.0;
    for (const auto& path : enumerate_paths(m, theta, horizon))
        total += path.probability * path_return(path.trajectory, true, m.gamma);
    return total;
}

// Central finite differences of the enumerated Lagrangian in theta.
inline Vec finite_difference_gradient(const rcmdp::Rcmdp& m, const Vec& theta, std::size_t horizon,
                                      double lambda, double beta, double h = 1e-5) {
    Vec grad(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        Vec plus = theta, minus = theta;
        plus[i] += h;
        minus[i] -= h;
        grad[i] = (enumerated_lagrangian(m, plus, horizon, lambda, beta) -
                   enumerated_lagrangian(m, minus, horizon, lambda, beta)) /
                  (2.0 * h);
    }
    return grad;
}

}  // namespace oracle
