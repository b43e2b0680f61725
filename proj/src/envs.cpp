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


#include "rcmdp/envs.hpp"

#include "rcmdp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace rcmdp {

namespace {

void validate_grid(const GridSpec& spec) {
    if (spec.width == 0 || spec.height == 0)
        throw std::invalid_argument("grid must have positive width and height");
    auto in_bounds = [&](Cell c) { return c.x < spec.width && c.y < spec.height; };
    if (!in_bounds(spec.start)) throw std::invalid_argument("start cell out of bounds");
    if (!in_bounds(spec.goal)) throw std::invalid_argument("goal cell out of bounds");
    if (spec.start == spec.goal) throw std::invalid_argument("start and goal must differ");
    for (const auto& h : spec.hazards) {
        if (!in_bounds(h.cell)) throw std::invalid_argument("hazard cell out of bounds");
        if (h.cell == spec.goal) throw std::invalid_argument("goal cannot be a hazard");
    }
    if (!(spec.slip >= 0.0 && spec.slip < 0.5))
        throw std::invalid_argument("slip must lie in [0, 0.5)");
}

Cell move(const GridSpec& spec, Cell c, std::size_t action) {
    switch (action) {
    case up:
        if (c.y + 1 < spec.height) ++c.y;
        break;
    case right:
        if (c.x + 1 < spec.width) ++c.x;
        break;
    case down:
        if (c.y > 0) --c.y;
        break;
    case left:
        if (c.x > 0) --c.x;
        break;
    default: break;
    }
    return c;
}

std::size_t distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

} // namespace

Benchmark make_gridworld(const GridSpec& spec, double psi) {
    validate_grid(spec);
    if (!(psi >= 0.0 && psi <= 2.0)) throw std::invalid_argument("psi must lie in [0, 2]");

    const std::size_t S = spec.width * spec.height;
    constexpr std::size_t A = 4;
    Benchmark out{make_empty_model(S, A), {}};
    Rcmdp& m = out.model;
    m.gamma = spec.gamma;
    m.beta = spec.beta;
    m.p0.assign(S, 0.0);
    m.p0[cell_id(spec, spec.start)] = 1.0;

    Vec hazard_cost(S, 0.0);
    for (const auto& h : spec.hazards) hazard_cost[cell_id(spec, h.cell)] += h.cost;
    const std::size_t goal = cell_id(spec, spec.goal);

    for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
            const Cell here{x, y};
            const std::size_t s = cell_id(spec, here);
            for (std::size_t a = 0; a < A; ++a) {
                auto& row = m.nominal[s][a];
                std::fill(row.begin(), row.end(), 0.0);
                if (s == goal) {
                    row[s] = 1.0;
                    continue;
                }
                const std::size_t lateral_a = (a + 1) % A;
                const std::size_t lateral_b = (a + 3) % A;
                row[cell_id(spec, move(spec, here, a))] += 1.0 - 2.0 * spec.slip;
                row[cell_id(spec, move(spec, here, lateral_a))] += spec.slip;
                row[cell_id(spec, move(spec, here, lateral_b))] += spec.slip;
                for (std::size_t sn = 0; sn < S; ++sn) {
                    m.rewards[s][a][sn] = spec.step_reward + (sn == goal ? spec.goal_reward : 0.0);
                    m.constraint_rewards[s][a][sn] = negate_costs(hazard_cost[sn]);
                }
                m.budgets[s][a] = psi;
            }
        }
    }

    out.lyapunov.equilibrium = goal;
    out.lyapunov.values.assign(S, 0.0);
    for (std::size_t y = 0; y < spec.height; ++y)
        for (std::size_t x = 0; x < spec.width; ++x)
            out.lyapunov.values[cell_id(spec, {x, y})] = static_cast<double>(
                distance(x, spec.goal.x) + distance(y, spec.goal.y));
    return out;
}

Benchmark make_inventory(const InventorySpec& spec, double psi) {
    if (spec.max_stock == 0) throw std::invalid_argument("max stock must be positive");
    if (spec.order_cap == 0) throw std::invalid_argument("order cap must be positive");
    if (spec.demand.size() != spec.max_stock + 1)
        throw std::invalid_argument("demand distribution must cover 0..max_stock");
    double total = 0.0;
    for (double p : spec.demand) {
        if (!(p >= 0.0)) throw std::invalid_argument("demand probabilities must be >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("demand distribution must sum to 1");
    if (spec.target > spec.max_stock) throw std::invalid_argument("target stock out of range");
    if (!(psi >= 0.0 && psi <= 2.0)) throw std::invalid_argument("psi must lie in [0, 2]");

    const std::size_t S = spec.max_stock + 1;
    const std::size_t A = spec.order_cap + 1;
    Benchmark out{make_empty_model(S, A), {}};
    Rcmdp& m = out.model;
    m.gamma = spec.gamma;
    m.beta = spec.beta;

    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t available = std::min(s + a, spec.max_stock);
            auto& row = m.nominal[s][a];
            std::fill(row.begin(), row.end(), 0.0);
            double stockout_mass = 0.0;
            for (std::size_t demand = 0; demand < S; ++demand) {
                const double p = spec.demand[demand];
                const std::size_t next = demand >= available ? 0 : available - demand;
                row[next] += p;
                if (demand > available) stockout_mass += p;
            }
            for (std::size_t sn = 0; sn < S; ++sn) {
                if (sn > available) continue;
                const double sales = static_cast<double>(available - sn);
                m.rewards[s][a][sn] =
                    spec.sale_price * sales - spec.holding_cost * static_cast<double>(sn);
            }
            if (row[0] > 0.0)
                m.constraint_rewards[s][a][0] = negate_costs(spec.stockout_cost * stockout_mass / row[0]);
            m.budgets[s][a] = psi;
        }
    }

    out.lyapunov.equilibrium = spec.target;
    out.lyapunov.values.assign(S, 0.0);
    for (std::size_t s = 0; s < S; ++s)
        out.lyapunov.values[s] = static_cast<double>(distance(s, spec.target));
    return out;
}

TransitionDataset generate_dataset(const Rcmdp& true_model, std::size_t n_per_sa, Rng& rng) {
    if (n_per_sa == 0) throw std::invalid_argument("n_per_sa must be at least 1");
    TransitionDataset data;
    data.n_states = true_model.n_states;
    data.n_actions = true_model.n_actions;
    data.records.reserve(true_model.n_states * true_model.n_actions * n_per_sa);
    for (std::size_t s = 0; s < true_model.n_states; ++s) {
        for (std::size_t a = 0; a < true_model.n_actions; ++a) {
            const auto& row = true_model.nominal[s][a];
            for (std::size_t i = 0; i < n_per_sa; ++i) {
                const std::size_t sn = sample_categorical(row, rng);
                data.records.push_back({s, a, sn, true_model.rewards[s][a][sn],
                                        -true_model.constraint_rewards[s][a][sn]});
            }
        }
    }
    return data;
}

void write_dataset_csv(std::ostream& out, const TransitionDataset& data) {
    out << "s,a,s_next,r,d_cost\n";
    for (const auto& rec : data.records)
        out << rec.s << ',' << rec.a << ',' << rec.s_next << ',' << csv::format(rec.r) << ','
            << csv::format(rec.d_raw) << '\n';
}

TransitionDataset read_dataset_csv(std::istream& in, std::optional<std::size_t> n_states,
                                   std::optional<std::size_t> n_actions) {
    const csv::Table table = csv::read(in);
    csv::require_columns(table, {"s", "a", "s_next", "r", "d_cost"});
    TransitionDataset data;
    std::size_t max_state = 0;
    std::size_t max_action = 0;
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
        TransitionRecord rec;
        rec.s = table.index(row, "s");
        rec.a = table.index(row, "a");
        rec.s_next = table.index(row, "s_next");
        rec.r = table.number(row, "r");
        rec.d_raw = table.number(row, "d_cost");
        max_state = std::max({max_state, rec.s, rec.s_next});
        max_action = std::max(max_action, rec.a);
        data.records.push_back(rec);
    }
    data.n_states = n_states ? *n_states : (data.records.empty() ? 0 : max_state + 1);
    data.n_actions = n_actions ? *n_actions : (data.records.empty() ? 0 : max_action + 1);
    return data;
}

} // namespace rcmdp
