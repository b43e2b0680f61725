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

#include <span>

namespace rcmdp {

/// L1 ball of radius `radius` around `center`, intersected with the simplex.
/// Non-owning: `center` must outlive the ball.
struct L1Ball {
    std::span<const double> center;
    double radius = 0.0;
};

/// The ambiguity set of the pair (s,a).
inline L1Ball ambiguity_ball(const Rcmdp& model, std::size_t s, std::size_t a) {
    return L1Ball{model.nominal[s][a], model.budgets[s][a]};
}

struct WorstCase {
    Vec p;
    double value = 0.0;
};

/// Exact minimizer of p^T v over the ball.
///
/// Moves min(radius/2, 1 - center[i*]) mass onto i* = argmin v and removes the
/// same amount from the states with the largest v first. Ties resolve to the
/// lowest state index. Throws std::invalid_argument on a size mismatch.
WorstCase worst_case_response(const L1Ball& ball, std::span<const double> v);

/// Value component of worst_case_response without materializing p.
double worst_case_value(const L1Ball& ball, std::span<const double> v);

} // namespace rcmdp
