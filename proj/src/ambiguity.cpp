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


#include "rcmdp/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rcmdp {

namespace {

void check_sizes(const L1Ball& ball, std::span<const double> v) {
    if (ball.center.size() != v.size())
        throw std::invalid_argument("value vector and ball center differ in dimension");
    if (v.empty()) throw std::invalid_argument("empty value vector");
}

std::size_t argmin_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

// Indices other than `skip`, by v descending, lower index first on ties.
void donor_order(std::span<const double> v, std::size_t skip, std::vector<std::size_t>& order) {
    order.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i != skip) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    });
}

} // namespace

WorstCase worst_case_response(const L1Ball& ball, std::span<const double> v) {
    check_sizes(ball, v);
    const std::size_t target = argmin_lowest(v);

    WorstCase out;
    out.p.assign(ball.center.begin(), ball.center.end());
    const double moved = std::min(ball.radius / 2.0, 1.0 - out.p[target]);
    if (moved > 0.0) {
        out.p[target] += moved;
        thread_local std::vector<std::size_t> order;
        donor_order(v, target, order);
        double remaining = moved;
        for (std::size_t i : order) {
            if (remaining <= 0.0) break;
            const double take = std::min(remaining, out.p[i]);
            out.p[i] -= take;
            remaining -= take;
        }
    }

    double total = 0.0;
    for (double& x : out.p) {
        if (x < 0.0) x = 0.0;
        total += x;
    }
    if (total != 1.0 && std::abs(total - 1.0) <= 1e-12)
        for (double& x : out.p) x /= total;

    out.value = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) out.value += out.p[i] * v[i];
    return out;
}

double worst_case_value(const L1Ball& ball, std::span<const double> v) {
    check_sizes(ball, v);
    const std::size_t target = argmin_lowest(v);

    double value = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) value += ball.center[i] * v[i];

    const double moved = std::min(ball.radius / 2.0, 1.0 - ball.center[target]);
    if (moved <= 0.0) return value;

    value += moved * v[target];
    thread_local std::vector<std::size_t> order;
    donor_order(v, target, order);
    double remaining = moved;
    for (std::size_t i : order) {
        if (remaining <= 0.0) break;
        const double take = std::min(remaining, ball.center[i]);
        value -= take * v[i];
        remaining -= take;
    }
    return value;
}

} // namespace rcmdp
