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

#include "rcmdp/lyapunov.hpp"

namespace rcmdp {

struct Cell {
    std::size_t x = 0;
    std::size_t y = 0;

    bool operator==(const Cell&) const = default;
};

struct Hazard {
    Cell cell;
    /// Raw cost paid on every transition into the cell.
    double cost = 1.0;
};

struct GridSpec {
    std::size_t width = 4;
    std::size_t height = 4;
    Cell start{0, 0};
    Cell goal{3, 3};
    std::vector<Hazard> hazards;
    double slip = 0.0;
    double step_reward = 0.0;
    double goal_reward = 1.0;
    double gamma = 0.95;
    double beta = 0.0;
};

/// Actions of the gridworld; "up" increases y.
enum GridAction : std::size_t { up = 0, right = 1, down = 2, left = 3 };

inline std::size_t cell_id(const GridSpec& spec, Cell c) { return c.y * spec.width + c.x; }

struct Benchmark {
    Rcmdp model;
    LyapunovFn lyapunov;
};

/// Gridworld with slip to both lateral directions, an absorbing goal and
/// hazard costs on entry. Moves into the boundary stay in place. The goal is a
/// terminal state and carries a zero budget; every other pair gets `psi`.
/// The bundled Lyapunov candidate is the Manhattan distance to the goal.
Benchmark make_gridworld(const GridSpec& spec, double psi);

struct InventorySpec {
    std::size_t max_stock = 5;
    std::size_t order_cap = 3;
    /// Probability of each demand level 0..max_stock.
    Vec demand;
    double holding_cost = 0.1;
    double sale_price = 1.0;
    double stockout_cost = 1.0;
    std::size_t target = 2;
    double gamma = 0.95;
    double beta = 0.0;
};

/// Stock levels 0..M, order quantities 0..order_cap. Orders above capacity are
/// discarded; next stock = max(min(s + a, M) - demand, 0). Reward is sales
/// revenue minus holding cost of the next stock; the constraint channel
/// carries the expected negated stockout cost given (s, a, s').
/// Lyapunov candidate V(s) = |s - target|. Initial stock is uniform.
Benchmark make_inventory(const InventorySpec& spec, double psi);

/// Stratified synthesis: exactly `n_per_sa` draws from the nominal kernel of
/// every (s,a), with rewards copied and constraint rewards converted back to
/// raw costs.
TransitionDataset generate_dataset(const Rcmdp& true_model, std::size_t n_per_sa, Rng& rng);

void write_dataset_csv(std::ostream& out, const TransitionDataset& data);
/// `s,a,s_next,r,d_cost`; state/action counts default to max id + 1.
TransitionDataset read_dataset_csv(std::istream& in, std::optional<std::size_t> n_states = {},
                                   std::optional<std::size_t> n_actions = {});

} // namespace rcmdp
