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
#include "rcmdp/experiment.hpp"
#include "rcmdp/io.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace rcmdp;

namespace {

std::string policy_csv(const PolicyTable& table) {
    std::ostringstream out;
    write_policy_csv(out, table);
    return out.str();
}

} // namespace

PYBIND11_MODULE(_rcmdp, m) {
    m.doc() = "Robust constrained MDPs: robust dynamic programming, RCPG, RC-AC and Lyapunov tools";

    py::class_<Rcmdp>(m, "Rcmdp")
        .def(py::init<>())
        .def_readwrite("n_states", &Rcmdp::n_states)
        .def_readwrite("n_actions", &Rcmdp::n_actions)
        .def_readwrite("rewards", &Rcmdp::rewards)
        .def_readwrite("constraint_rewards", &Rcmdp::constraint_rewards)
        .def_readwrite("nominal", &Rcmdp::nominal)
        .def_readwrite("budgets", &Rcmdp::budgets)
        .def_readwrite("gamma", &Rcmdp::gamma)
        .def_readwrite("horizon", &Rcmdp::horizon)
        .def_readwrite("beta", &Rcmdp::beta)
        .def_readwrite("p0", &Rcmdp::p0)
        .def("__eq__", [](const Rcmdp& a, const Rcmdp& b) { return a == b; })
        .def("to_json", [](const Rcmdp& model) { return model_to_json(model); })
        .def_static("from_json", &model_from_json)
        .def(
            "validate",
            [](const Rcmdp& model) {
                std::vector<std::string> out;
                for (const auto& issue : validate(model).issues)
                    out.push_back(issue.location + ": " + issue.message);
                return out;
            },
            "List of validation issues as `location: message`; empty when the model is well formed.");

    m.def("make_empty_model", &make_empty_model, py::arg("n_states"), py::arg("n_actions"));
    m.def("hoeffding_budget", &hoeffding_budget, py::arg("n"), py::arg("n_states"),
          py::arg("n_actions"), py::arg("delta"));

    py::class_<TransitionRecord>(m, "TransitionRecord")
        .def(py::init([](std::size_t s, std::size_t a, std::size_t s_next, double r, double d_raw) {
                 return TransitionRecord{s, a, s_next, r, d_raw};
             }),
             py::arg("s"), py::arg("a"), py::arg("s_next"), py::arg("r"), py::arg("d_raw"))
        .def_readwrite("s", &TransitionRecord::s)
        .def_readwrite("a", &TransitionRecord::a)
        .def_readwrite("s_next", &TransitionRecord::s_next)
        .def_readwrite("r", &TransitionRecord::r)
        .def_readwrite("d_raw", &TransitionRecord::d_raw);

    m.def(
        "build_from_dataset",
        [](std::size_t n_states, std::size_t n_actions, const std::vector<TransitionRecord>& records,
           double delta, double gamma, std::optional<std::size_t> horizon, double beta,
           std::optional<Vec> p0) {
            TransitionDataset data{n_states, n_actions, records};
            BuildOptions options;
            options.delta = delta;
            options.gamma = gamma;
            options.horizon = horizon;
            options.beta = beta;
            options.p0 = std::move(p0);
            return build_from_dataset(data, options);
        },
        py::arg("n_states"), py::arg("n_actions"), py::arg("records"), py::arg("delta") = 0.05,
        py::arg("gamma") = 0.9, py::arg("horizon") = py::none(), py::arg("beta") = 0.0,
        py::arg("p0") = py::none());

    m.def(
        "worst_case",
        [](const Vec& center, double radius, const Vec& v) {
            const auto result = worst_case_response(L1Ball{center, radius}, v);
            return py::make_tuple(result.p, result.value);
        },
        py::arg("center"), py::arg("radius"), py::arg("v"),
        "Minimizing distribution in the L1 ball around `center` and its expected value.");

    m.def(
        "robust_value_iteration",
        [](const Rcmdp& model, std::optional<double> lambda, double tol, std::size_t max_iter) {
            const auto result = robust_value_iteration(model, lambda, {tol, max_iter});
            return py::make_tuple(result.value.values, result.residuals);
        },
        py::arg("model"), py::arg("lambda_") = py::none(), py::arg("tol") = 1e-8,
        py::arg("max_iter") = 100000);

    m.def(
        "robust_policy_evaluation",
        [](const Rcmdp& model, const PolicyTable& policy, const std::string& signal, double lambda,
           double tol, std::size_t max_iter) {
            Signal sig = Signal::reward();
            if (signal == "constraint") sig = Signal::constraint();
            else if (signal == "combined") sig = Signal::combined(lambda);
            else if (signal != "reward")
                throw std::invalid_argument("signal must be reward, constraint or combined");
            return robust_policy_evaluation(model, policy, sig, {tol, max_iter}).values;
        },
        py::arg("model"), py::arg("policy"), py::arg("signal") = "reward", py::arg("lambda_") = 0.0,
        py::arg("tol") = 1e-8, py::arg("max_iter") = 100000);

    m.def(
        "robust_return",
        [](const Rcmdp& model, const Vec& values) { return robust_return(model, values); },
        py::arg("model"), py::arg("values"));

    py::class_<SoftmaxPolicy>(m, "SoftmaxPolicy")
        .def(py::init<std::size_t, std::size_t>(), py::arg("n_states"), py::arg("n_actions"))
        .def(py::init<std::size_t, std::size_t, Vec>(), py::arg("n_states"), py::arg("n_actions"),
             py::arg("logits"))
        .def_property_readonly("n_states", &SoftmaxPolicy::n_states)
        .def_property_readonly("n_actions", &SoftmaxPolicy::n_actions)
        .def_property_readonly("logits", [](const SoftmaxPolicy& p) { return p.logits(); })
        .def("distribution", &SoftmaxPolicy::distribution, py::arg("s"))
        .def("table", &SoftmaxPolicy::table)
        .def("score", [](const SoftmaxPolicy& p, std::size_t s, std::size_t a) { return score(p, s, a); },
             py::arg("s"), py::arg("a"));

    py::class_<StepSchedule>(m, "StepSchedule")
        .def(py::init([](double a1, double e1, double a2, double e2) {
                 return StepSchedule{a1, e1, a2, e2};
             }),
             py::arg("a1") = 0.05, py::arg("e1") = 0.9, py::arg("a2") = 0.05, py::arg("e2") = 0.6)
        .def_readwrite("a1", &StepSchedule::a1)
        .def_readwrite("e1", &StepSchedule::e1)
        .def_readwrite("a2", &StepSchedule::a2)
        .def_readwrite("e2", &StepSchedule::e2)
        .def("zeta1", &StepSchedule::zeta1)
        .def("zeta2", &StepSchedule::zeta2)
        .def("check", [](const StepSchedule& s) { return step_schedule_check(s).failures; });

    py::class_<EpisodeRecord>(m, "EpisodeRecord")
        .def_readonly("k", &EpisodeRecord::k)
        .def_readonly("lagrangian", &EpisodeRecord::lagrangian)
        .def_readonly("robust_return_r", &EpisodeRecord::robust_return_r)
        .def_readonly("robust_return_d", &EpisodeRecord::robust_return_d)
        .def_readonly("lambda_", &EpisodeRecord::lambda)
        .def_readonly("grad_theta_norm", &EpisodeRecord::grad_theta_norm)
        .def_readonly("grad_lambda", &EpisodeRecord::grad_lambda);

    m.def(
        "rcpg_train",
        [](const Rcmdp& model, const StepSchedule& schedule, std::size_t episodes, std::size_t horizon,
           std::size_t batch_size, double lambda0, double lambda_max, const std::string& pessimism,
           std::size_t refresh_every, std::uint64_t seed) {
            RcpgConfig config;
            config.schedule = schedule;
            config.episodes = episodes;
            config.horizon = horizon;
            config.batch_size = batch_size;
            config.lambda0 = lambda0;
            config.lambda_max = lambda_max;
            config.pessimism = parse_pessimism(pessimism);
            config.refresh_every = refresh_every;
            config.seed = seed;
            py::gil_scoped_release release;
            auto result = rcpg_train(model, config);
            py::gil_scoped_acquire acquire;
            py::dict out;
            out["policy"] = result.state.policy;
            out["lambda_"] = result.state.lambda;
            out["robust_return_r"] = result.state.robust_return_r;
            out["robust_return_d"] = result.state.robust_return_d;
            out["history"] = result.history;
            return out;
        },
        py::arg("model"), py::arg("schedule") = StepSchedule{}, py::arg("episodes") = 1000,
        py::arg("horizon") = 50, py::arg("batch_size") = 1, py::arg("lambda0") = 0.0,
        py::arg("lambda_max") = 100.0, py::arg("pessimism") = "combined",
        py::arg("refresh_every") = 10, py::arg("seed") = 0);

    m.def(
        "rcac_train",
        [](const Rcmdp& model, const StepSchedule& schedule, double lambda, bool update_lambda,
           std::size_t episodes, std::size_t max_steps, std::uint64_t seed) {
            RcacConfig config;
            config.schedule = schedule;
            config.lambda = lambda;
            config.update_lambda = update_lambda;
            config.episodes = episodes;
            config.max_steps = max_steps;
            config.seed = seed;
            py::gil_scoped_release release;
            auto result = rcac_train(model, config);
            py::gil_scoped_acquire acquire;
            py::dict out;
            out["policy"] = result.policy;
            out["critic"] = result.critic.w;
            out["lambda_"] = result.lambda;
            out["steps"] = result.history.size();
            return out;
        },
        py::arg("model"), py::arg("schedule") = StepSchedule{0.5, 0.9, 0.05, 0.6},
        py::arg("lambda_") = 0.0, py::arg("update_lambda") = false, py::arg("episodes") = 1000,
        py::arg("max_steps") = 200, py::arg("seed") = 0);

    py::class_<LyapunovFn>(m, "LyapunovFn")
        .def(py::init([](Vec values, std::size_t equilibrium) {
                 return LyapunovFn{std::move(values), equilibrium};
             }),
             py::arg("values"), py::arg("equilibrium"))
        .def_readwrite("values", &LyapunovFn::values)
        .def_readwrite("equilibrium", &LyapunovFn::equilibrium)
        .def("check", [](const LyapunovFn& v) { return check_candidate(v).failures; });

    m.def("shape_model", &shape_model, py::arg("model"), py::arg("lyapunov"));
    m.def("stability_constrained_model", &stability_constrained_model, py::arg("model"),
          py::arg("lyapunov"), py::arg("beta"));
    m.def(
        "invariance_test",
        [](const Rcmdp& model, const LyapunovFn& lyapunov, std::size_t horizon, double lambda) {
            InvarianceOptions options;
            options.lambda = lambda;
            const auto report = invariance_test(model, lyapunov, horizon, options);
            py::dict out;
            out["passed"] = report.passed;
            out["policies_enumerated"] = report.policies_enumerated;
            out["optimal_sets_equal"] = report.optimal_sets_equal;
            out["max_q_offset_error"] = report.max_q_offset_error;
            out["optimal_original"] = report.optimal_original;
            out["optimal_shaped"] = report.optimal_shaped;
            return out;
        },
        py::arg("model"), py::arg("lyapunov"), py::arg("horizon"), py::arg("lambda_") = 0.0);

    m.def(
        "make_gridworld",
        [](std::size_t width, std::size_t height, std::pair<std::size_t, std::size_t> start,
           std::pair<std::size_t, std::size_t> goal,
           const std::vector<std::tuple<std::size_t, std::size_t, double>>& hazards, double slip,
           double step_reward, double goal_reward, double gamma, double beta, double psi) {
            GridSpec spec;
            spec.width = width;
            spec.height = height;
            spec.start = {start.first, start.second};
            spec.goal = {goal.first, goal.second};
            for (const auto& [x, y, cost] : hazards) spec.hazards.push_back({{x, y}, cost});
            spec.slip = slip;
            spec.step_reward = step_reward;
            spec.goal_reward = goal_reward;
            spec.gamma = gamma;
            spec.beta = beta;
            auto bench = make_gridworld(spec, psi);
            return py::make_tuple(bench.model, bench.lyapunov);
        },
        py::arg("width") = 4, py::arg("height") = 4, py::arg("start") = std::pair<std::size_t, std::size_t>{0, 0},
        py::arg("goal") = std::pair<std::size_t, std::size_t>{3, 3},
        py::arg("hazards") = std::vector<std::tuple<std::size_t, std::size_t, double>>{},
        py::arg("slip") = 0.0, py::arg("step_reward") = 0.0, py::arg("goal_reward") = 1.0,
        py::arg("gamma") = 0.95, py::arg("beta") = 0.0, py::arg("psi") = 0.0);

    m.def(
        "make_inventory",
        [](std::size_t max_stock, std::size_t order_cap, Vec demand, double holding_cost,
           double sale_price, double stockout_cost, std::size_t target, double gamma, double beta,
           double psi) {
            InventorySpec spec;
            spec.max_stock = max_stock;
            spec.order_cap = order_cap;
            spec.demand = std::move(demand);
            spec.holding_cost = holding_cost;
            spec.sale_price = sale_price;
            spec.stockout_cost = stockout_cost;
            spec.target = target;
            spec.gamma = gamma;
            spec.beta = beta;
            auto bench = make_inventory(spec, psi);
            return py::make_tuple(bench.model, bench.lyapunov);
        },
        py::arg("max_stock"), py::arg("order_cap"), py::arg("demand"), py::arg("holding_cost") = 0.1,
        py::arg("sale_price") = 1.0, py::arg("stockout_cost") = 1.0, py::arg("target") = 2,
        py::arg("gamma") = 0.95, py::arg("beta") = 0.0, py::arg("psi") = 0.0);

    m.def("policy_csv", &policy_csv, py::arg("table"), "Policy table rendered as `s,a,probability` CSV.");

    m.def(
        "run_experiment",
        [](const std::string& config_text, const std::string& command, std::uint64_t seed,
           const std::string& base_dir) {
            const ExperimentConfig config = parse_config(config_text, parse_command(command), base_dir);
            RunArtifacts artifacts;
            {
                py::gil_scoped_release release;
                artifacts = run_single(config, seed);
            }
            py::dict out;
            for (const auto& [name, contents] : artifacts.files) out[py::str(name)] = contents;
            return out;
        },
        py::arg("config"), py::arg("command"), py::arg("seed") = 0, py::arg("base_dir") = ".",
        "Runs one CLI command in memory and returns {file name: contents}.");

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
