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


#include "rcmdp/experiment.hpp"

#include "rcmdp/csv.hpp"
#include "rcmdp/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

namespace rcmdp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Typed access to a JSON object that reports the dotted field path on error
// and rejects unknown keys.
class Fields {
public:
    Fields(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(where() + " must be a JSON object");
    }

    template <class T> T get(const std::string& key, T fallback) {
        used_.insert(key);
        if (!node_.contains(key) || node_.at(key).is_null()) return fallback;
        return convert<T>(key);
    }

    template <class T> T require(const std::string& key) {
        used_.insert(key);
        if (!node_.contains(key)) throw ConfigError(where(key) + " is required");
        return convert<T>(key);
    }

    template <class T> std::optional<T> optional(const std::string& key) {
        used_.insert(key);
        if (!node_.contains(key) || node_.at(key).is_null()) return std::nullopt;
        return convert<T>(key);
    }

    const json* child(const std::string& key) {
        used_.insert(key);
        if (!node_.contains(key) || node_.at(key).is_null()) return nullptr;
        return &node_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!used_.count(key)) throw ConfigError(where(key) + ": unknown field");
    }

    std::string where(const std::string& key = {}) const {
        if (key.empty()) return path_.empty() ? std::string("config") : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    template <class T> T convert(const std::string& key) {
        try {
            return node_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + " has the wrong type");
        }
    }

    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

std::string resolve_path(const std::string& base, const std::string& path) {
    if (path.empty()) return path;
    const fs::path p(path);
    return p.is_absolute() ? path : (fs::path(base) / p).lexically_normal().string();
}

void require_file(const std::string& path, const std::string& field) {
    if (!fs::is_regular_file(path)) throw ConfigError(field + ": file '" + path + "' does not exist");
}

json cell_json(Cell c) { return json::array({c.x, c.y}); }

Cell parse_cell(const json& node, const std::string& field) {
    if (!node.is_array() || node.size() != 2)
        throw ConfigError(field + " must be a two-element array [x, y]");
    try {
        return {node[0].get<std::size_t>(), node[1].get<std::size_t>()};
    } catch (const json::exception&) {
        throw ConfigError(field + " must hold non-negative integers");
    }
}

// Validates the environment block and returns it with defaults filled in.
json resolve_environment(const json& node, const std::string& base_dir) {
    Fields f(node, "environment");
    const std::string type = f.require<std::string>("type");
    json out;
    out["type"] = type;
    if (type == "gridworld") {
        GridSpec spec;
        out["width"] = f.get<std::size_t>("width", spec.width);
        out["height"] = f.get<std::size_t>("height", spec.height);
        const json* start = f.child("start");
        const json* goal = f.child("goal");
        out["start"] = cell_json(start ? parse_cell(*start, "environment.start") : spec.start);
        out["goal"] = cell_json(goal ? parse_cell(*goal, "environment.goal") : spec.goal);
        json hazards = json::array();
        if (const json* list = f.child("hazards")) {
            if (!list->is_array()) throw ConfigError("environment.hazards must be an array");
            for (std::size_t i = 0; i < list->size(); ++i) {
                const std::string field = "environment.hazards[" + std::to_string(i) + "]";
                Fields h((*list)[i], field);
                const json* cell = h.child("cell");
                if (!cell) throw ConfigError(field + ".cell is required");
                hazards.push_back({{"cell", cell_json(parse_cell(*cell, field + ".cell"))},
                                   {"cost", h.get<double>("cost", 1.0)}});
                h.finish();
            }
        }
        out["hazards"] = hazards;
        out["slip"] = f.get<double>("slip", spec.slip);
        out["step_reward"] = f.get<double>("step_reward", spec.step_reward);
        out["goal_reward"] = f.get<double>("goal_reward", spec.goal_reward);
        out["gamma"] = f.get<double>("gamma", spec.gamma);
        out["beta"] = f.get<double>("beta", spec.beta);
        out["psi"] = f.get<double>("psi", 0.0);
    } else if (type == "inventory") {
        InventorySpec spec;
        const auto max_stock = f.get<std::size_t>("max_stock", spec.max_stock);
        out["max_stock"] = max_stock;
        out["order_cap"] = f.get<std::size_t>("order_cap", spec.order_cap);
        Vec uniform(max_stock + 1, 1.0 / static_cast<double>(max_stock + 1));
        out["demand"] = f.get<Vec>("demand", uniform);
        out["holding_cost"] = f.get<double>("holding_cost", spec.holding_cost);
        out["sale_price"] = f.get<double>("sale_price", spec.sale_price);
        out["stockout_cost"] = f.get<double>("stockout_cost", spec.stockout_cost);
        out["target"] = f.get<std::size_t>("target", spec.target);
        out["gamma"] = f.get<double>("gamma", spec.gamma);
        out["beta"] = f.get<double>("beta", spec.beta);
        out["psi"] = f.get<double>("psi", 0.0);
    } else if (type == "model_file") {
        const std::string path = resolve_path(base_dir, f.require<std::string>("path"));
        require_file(path, "environment.path");
        out["path"] = path;
    } else if (type == "dataset") {
        const std::string path = resolve_path(base_dir, f.require<std::string>("path"));
        require_file(path, "environment.path");
        out["path"] = path;
        out["delta"] = f.get<double>("delta", 0.05);
        out["gamma"] = f.get<double>("gamma", 0.9);
        const auto horizon = f.optional<std::size_t>("horizon");
        out["horizon"] = horizon ? json(*horizon) : json(nullptr);
        out["beta"] = f.get<double>("beta", 0.0);
        const auto n_states = f.optional<std::size_t>("n_states");
        const auto n_actions = f.optional<std::size_t>("n_actions");
        out["n_states"] = n_states ? json(*n_states) : json(nullptr);
        out["n_actions"] = n_actions ? json(*n_actions) : json(nullptr);
        const auto p0 = f.optional<Vec>("p0");
        out["p0"] = p0 ? json(*p0) : json(nullptr);
    } else {
        throw ConfigError("environment.type: unknown environment '" + type +
                          "' (expected gridworld, inventory, model_file or dataset)");
    }
    f.finish();
    return out;
}

StepSchedule parse_schedule(Fields& f, StepSchedule fallback) {
    fallback.a1 = f.get<double>("a1", fallback.a1);
    fallback.e1 = f.get<double>("e1", fallback.e1);
    fallback.a2 = f.get<double>("a2", fallback.a2);
    fallback.e2 = f.get<double>("e2", fallback.e2);
    return fallback;
}

json schedule_json(const StepSchedule& s) {
    return {{"a1", s.a1}, {"e1", s.e1}, {"a2", s.a2}, {"e2", s.e2}};
}

void check_schedule(const StepSchedule& schedule, const std::string& field) {
    const auto report = step_schedule_check(schedule);
    if (!report.ok) throw ConfigError(field + " step schedule: " + report.failures.front());
}

std::string lyapunov_mode_name(LyapunovMode mode) {
    switch (mode) {
    case LyapunovMode::none: return "none";
    case LyapunovMode::shaping: return "shaping";
    case LyapunovMode::stability_constraint: return "stability-constraint";
    }
    return "none";
}

std::string csv_text(const std::function<void(std::ostream&)>& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

json summary_returns(const Rcmdp& model, const PolicyTable& table, const IterationOptions& opts) {
    const double rho_r = robust_return(model, robust_policy_evaluation(model, table, Signal::reward(), opts));
    const double rho_d =
        robust_return(model, robust_policy_evaluation(model, table, Signal::constraint(), opts));
    return {{"robust_return_r", rho_r},
            {"robust_return_d", rho_d},
            {"beta", model.beta},
            {"feasible", rho_d >= model.beta}};
}

} // namespace

Command parse_command(const std::string& verb) {
    if (verb == "solve") return Command::solve;
    if (verb == "train-rcpg") return Command::train_rcpg;
    if (verb == "train-rcac") return Command::train_rcac;
    if (verb == "eval") return Command::eval;
    if (verb == "shape") return Command::shape;
    if (verb == "invariance-test") return Command::invariance_test;
    throw ConfigError("unknown command '" + verb + "'");
}

std::string to_string(Command command) {
    switch (command) {
    case Command::solve: return "solve";
    case Command::train_rcpg: return "train-rcpg";
    case Command::train_rcac: return "train-rcac";
    case Command::eval: return "eval";
    case Command::shape: return "shape";
    case Command::invariance_test: return "invariance-test";
    }
    return "solve";
}

ExperimentConfig parse_config(const std::string& text, Command command,
                              const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i + 1 < limit; ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("config parse error at line " + std::to_string(line) + ": " + e.what());
    }

    ExperimentConfig config;
    config.command = command;
    config.base_dir = base_dir;
    Fields top(doc, "");

    if (const auto declared = top.optional<std::string>("command"))
        if (parse_command(*declared) != command)
            throw ConfigError("command: config declares '" + *declared + "' but '" +
                              to_string(command) + "' was requested");

    const json* env = top.child("environment");
    if (!env) throw ConfigError("environment is required");
    config.environment_json = resolve_environment(*env, base_dir).dump();
    config.beta_override = top.optional<double>("beta");

    if (const json* node = top.child("evaluation")) {
        Fields f(*node, "evaluation");
        config.evaluation.tol = f.get<double>("tol", config.evaluation.tol);
        config.evaluation.max_iter = f.get<std::size_t>("max_iter", config.evaluation.max_iter);
        f.finish();
    }
    if (!(config.evaluation.tol > 0.0)) throw ConfigError("evaluation.tol must be positive");

    if (const json* node = top.child("lyapunov")) {
        Fields f(*node, "lyapunov");
        const std::string mode = f.get<std::string>("mode", "none");
        if (mode == "none") config.lyapunov.mode = LyapunovMode::none;
        else if (mode == "shaping") config.lyapunov.mode = LyapunovMode::shaping;
        else if (mode == "stability-constraint")
            config.lyapunov.mode = LyapunovMode::stability_constraint;
        else throw ConfigError("lyapunov.mode: unknown mode '" + mode + "'");
        config.lyapunov.file = resolve_path(base_dir, f.get<std::string>("file", ""));
        if (!config.lyapunov.file.empty()) require_file(config.lyapunov.file, "lyapunov.file");
        config.lyapunov.equilibrium = f.optional<std::size_t>("equilibrium");
        if (!config.lyapunov.file.empty() && !config.lyapunov.equilibrium)
            throw ConfigError("lyapunov.equilibrium is required with lyapunov.file");
        config.lyapunov.beta = f.get<double>("beta", 0.0);
        if (!(config.lyapunov.beta >= 0.0)) throw ConfigError("lyapunov.beta must be >= 0");
        f.finish();
    }

    if (const json* node = top.child("rcpg")) {
        Fields f(*node, "rcpg");
        RcpgConfig& c = config.rcpg;
        c.schedule = parse_schedule(f, c.schedule);
        c.horizon = f.get<std::size_t>("horizon", c.horizon);
        c.episodes = f.get<std::size_t>("episodes", c.episodes);
        c.batch_size = f.get<std::size_t>("batch_size", c.batch_size);
        c.lambda0 = f.get<double>("lambda0", c.lambda0);
        c.lambda_max = f.get<double>("lambda_max", c.lambda_max);
        try {
            c.pessimism = parse_pessimism(f.get<std::string>("pessimism", to_string(c.pessimism)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("rcpg.pessimism: ") + e.what());
        }
        c.refresh_every = f.get<std::size_t>("refresh_every", c.refresh_every);
        c.fold_signal = f.get<bool>("fold_signal", c.fold_signal);
        f.finish();
        if (c.horizon == 0) throw ConfigError("rcpg.horizon must be at least 1");
        if (c.batch_size == 0) throw ConfigError("rcpg.batch_size must be at least 1");
        if (c.refresh_every == 0) throw ConfigError("rcpg.refresh_every must be at least 1");
        if (!(c.lambda0 >= 0.0)) throw ConfigError("rcpg.lambda0 must be >= 0");
        if (!(c.lambda_max >= c.lambda0)) throw ConfigError("rcpg.lambda_max must be >= lambda0");
    }
    check_schedule(config.rcpg.schedule, "rcpg");

    if (const json* node = top.child("rcac")) {
        Fields f(*node, "rcac");
        RcacConfig& c = config.rcac;
        c.schedule = parse_schedule(f, c.schedule);
        c.lambda = f.get<double>("lambda", c.lambda);
        c.update_lambda = f.get<bool>("update_lambda", c.update_lambda);
        c.lambda_max = f.get<double>("lambda_max", c.lambda_max);
        c.episodes = f.get<std::size_t>("episodes", c.episodes);
        c.max_steps = f.get<std::size_t>("max_steps", c.max_steps);
        c.per_step_schedule = f.get<bool>("per_step_schedule", c.per_step_schedule);
        c.fold_signal = f.get<bool>("fold_signal", c.fold_signal);
        f.finish();
        if (!(c.lambda >= 0.0)) throw ConfigError("rcac.lambda must be >= 0");
        if (c.max_steps == 0) throw ConfigError("rcac.max_steps must be at least 1");
    }
    check_schedule(config.rcac.schedule, "rcac");

    if (const json* node = top.child("solve")) {
        Fields f(*node, "solve");
        config.solve.lambda = f.optional<double>("lambda");
        config.solve.iteration.tol = f.get<double>("tol", config.solve.iteration.tol);
        config.solve.iteration.max_iter =
            f.get<std::size_t>("max_iter", config.solve.iteration.max_iter);
        f.finish();
        if (config.solve.lambda && !(*config.solve.lambda >= 0.0))
            throw ConfigError("solve.lambda must be >= 0");
    }

    if (const json* node = top.child("eval")) {
        Fields f(*node, "eval");
        config.eval.policy_file = resolve_path(base_dir, f.get<std::string>("policy_file", ""));
        config.eval.lambda = f.get<double>("lambda", 0.0);
        f.finish();
        if (!(config.eval.lambda >= 0.0)) throw ConfigError("eval.lambda must be >= 0");
    }
    if (command == Command::eval) {
        if (config.eval.policy_file.empty()) throw ConfigError("eval.policy_file is required");
        require_file(config.eval.policy_file, "eval.policy_file");
    }

    if (const json* node = top.child("invariance")) {
        Fields f(*node, "invariance");
        config.invariance.horizon = f.get<std::size_t>("horizon", config.invariance.horizon);
        config.invariance.lambda = f.get<double>("lambda", config.invariance.lambda);
        f.finish();
        if (config.invariance.horizon == 0) throw ConfigError("invariance.horizon must be >= 1");
    }

    if (const json* node = top.child("seeds")) {
        try {
            if (node->is_array()) config.seeds = node->get<std::vector<std::uint64_t>>();
            else config.seeds = {node->get<std::uint64_t>()};
        } catch (const json::exception&) {
            throw ConfigError("seeds must be an integer or a list of integers");
        }
    }
    if (config.seeds.empty()) throw ConfigError("seeds must not be empty");

    if (command == Command::shape && config.lyapunov.mode == LyapunovMode::none)
        throw ConfigError("lyapunov.mode must be 'shaping' or 'stability-constraint' for shape");

    top.finish();
    return config;
}

ExperimentConfig load_config(const std::string& path, Command command) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const fs::path parent = fs::path(path).parent_path();
    return parse_config(text, command, parent.empty() ? "." : parent.string());
}

std::string resolved_config_json(const ExperimentConfig& c) {
    json doc;
    doc["command"] = to_string(c.command);
    doc["environment"] = json::parse(c.environment_json);
    doc["beta"] = c.beta_override ? json(*c.beta_override) : json(nullptr);
    doc["evaluation"] = {{"tol", c.evaluation.tol}, {"max_iter", c.evaluation.max_iter}};
    doc["lyapunov"] = {{"mode", lyapunov_mode_name(c.lyapunov.mode)},
                       {"file", c.lyapunov.file},
                       {"equilibrium", c.lyapunov.equilibrium ? json(*c.lyapunov.equilibrium)
                                                               : json(nullptr)},
                       {"beta", c.lyapunov.beta}};
    json rcpg = schedule_json(c.rcpg.schedule);
    rcpg["horizon"] = c.rcpg.horizon;
    rcpg["episodes"] = c.rcpg.episodes;
    rcpg["batch_size"] = c.rcpg.batch_size;
    rcpg["lambda0"] = c.rcpg.lambda0;
    rcpg["lambda_max"] = c.rcpg.lambda_max;
    rcpg["pessimism"] = to_string(c.rcpg.pessimism);
    rcpg["refresh_every"] = c.rcpg.refresh_every;
    rcpg["fold_signal"] = c.rcpg.fold_signal;
    doc["rcpg"] = rcpg;
    json rcac = schedule_json(c.rcac.schedule);
    rcac["lambda"] = c.rcac.lambda;
    rcac["update_lambda"] = c.rcac.update_lambda;
    rcac["lambda_max"] = c.rcac.lambda_max;
    rcac["episodes"] = c.rcac.episodes;
    rcac["max_steps"] = c.rcac.max_steps;
    rcac["per_step_schedule"] = c.rcac.per_step_schedule;
    rcac["fold_signal"] = c.rcac.fold_signal;
    doc["rcac"] = rcac;
    doc["solve"] = {{"lambda", c.solve.lambda ? json(*c.solve.lambda) : json(nullptr)},
                    {"tol", c.solve.iteration.tol},
                    {"max_iter", c.solve.iteration.max_iter}};
    doc["eval"] = {{"policy_file", c.eval.policy_file}, {"lambda", c.eval.lambda}};
    doc["invariance"] = {{"horizon", c.invariance.horizon}, {"lambda", c.invariance.lambda}};
    doc["seeds"] = c.seeds;
    return doc.dump(2) + "\n";
}

Environment build_environment(const ExperimentConfig& config) {
    const json env = json::parse(config.environment_json);
    const std::string type = env.at("type").get<std::string>();
    Environment out;
    if (type == "gridworld") {
        GridSpec spec;
        spec.width = env.at("width").get<std::size_t>();
        spec.height = env.at("height").get<std::size_t>();
        spec.start = parse_cell(env.at("start"), "environment.start");
        spec.goal = parse_cell(env.at("goal"), "environment.goal");
        for (const auto& h : env.at("hazards"))
            spec.hazards.push_back({parse_cell(h.at("cell"), "hazard"), h.at("cost").get<double>()});
        spec.slip = env.at("slip").get<double>();
        spec.step_reward = env.at("step_reward").get<double>();
        spec.goal_reward = env.at("goal_reward").get<double>();
        spec.gamma = env.at("gamma").get<double>();
        spec.beta = env.at("beta").get<double>();
        auto bench = make_gridworld(spec, env.at("psi").get<double>());
        out.model = std::move(bench.model);
        out.lyapunov = std::move(bench.lyapunov);
    } else if (type == "inventory") {
        InventorySpec spec;
        spec.max_stock = env.at("max_stock").get<std::size_t>();
        spec.order_cap = env.at("order_cap").get<std::size_t>();
        spec.demand = env.at("demand").get<Vec>();
        spec.holding_cost = env.at("holding_cost").get<double>();
        spec.sale_price = env.at("sale_price").get<double>();
        spec.stockout_cost = env.at("stockout_cost").get<double>();
        spec.target = env.at("target").get<std::size_t>();
        spec.gamma = env.at("gamma").get<double>();
        spec.beta = env.at("beta").get<double>();
        auto bench = make_inventory(spec, env.at("psi").get<double>());
        out.model = std::move(bench.model);
        out.lyapunov = std::move(bench.lyapunov);
    } else if (type == "model_file") {
        out.model = load_model(env.at("path").get<std::string>());
    } else {
        std::ifstream in(env.at("path").get<std::string>());
        std::optional<std::size_t> n_states, n_actions;
        if (!env.at("n_states").is_null()) n_states = env.at("n_states").get<std::size_t>();
        if (!env.at("n_actions").is_null()) n_actions = env.at("n_actions").get<std::size_t>();
        const TransitionDataset data = read_dataset_csv(in, n_states, n_actions);
        BuildOptions options;
        options.delta = env.at("delta").get<double>();
        options.gamma = env.at("gamma").get<double>();
        if (!env.at("horizon").is_null()) options.horizon = env.at("horizon").get<std::size_t>();
        options.beta = env.at("beta").get<double>();
        if (!env.at("p0").is_null()) options.p0 = env.at("p0").get<Vec>();
        out.model = build_from_dataset(data, options);
    }
    if (config.beta_override) out.model.beta = *config.beta_override;
    // Undiscounted invariance runs take their horizon from the test itself.
    if (config.command == Command::invariance_test && !out.model.horizon)
        out.model.horizon = config.invariance.horizon;
    require_valid(out.model);
    return out;
}

PreparedModels prepare_models(const ExperimentConfig& config) {
    Environment env = build_environment(config);
    PreparedModels out;
    if (!config.lyapunov.file.empty()) {
        std::ifstream in(config.lyapunov.file);
        out.lyapunov = read_lyapunov_csv(in, *config.lyapunov.equilibrium);
    } else if (env.lyapunov) {
        out.lyapunov = env.lyapunov;
        if (config.lyapunov.equilibrium) out.lyapunov->equilibrium = *config.lyapunov.equilibrium;
    }

    const bool needs_candidate = config.lyapunov.mode != LyapunovMode::none ||
                                 config.command == Command::invariance_test;
    if (needs_candidate) {
        if (!out.lyapunov)
            throw ConfigError("lyapunov.file is required: the environment has no bundled candidate");
        const auto report = check_candidate(*out.lyapunov);
        if (!report.ok) throw ConfigError("lyapunov candidate rejected: " + report.failures.front());
        if (out.lyapunov->values.size() != env.model.n_states)
            throw ConfigError("lyapunov candidate does not match the number of states");
    }

    switch (config.lyapunov.mode) {
    case LyapunovMode::none:
        out.training = env.model;
        out.reporting = std::move(env.model);
        break;
    case LyapunovMode::shaping:
        out.training = shape_model(env.model, *out.lyapunov);
        out.reporting = std::move(env.model);
        break;
    case LyapunovMode::stability_constraint:
        out.training = stability_constrained_model(env.model, *out.lyapunov, config.lyapunov.beta);
        out.reporting = out.training;
        break;
    }
    return out;
}

const std::string* RunArtifacts::find(const std::string& name) const {
    for (const auto& [file, contents] : files)
        if (file == name) return &contents;
    return nullptr;
}

RunArtifacts run_single(const ExperimentConfig& config, std::uint64_t seed) {
    const PreparedModels models = prepare_models(config);
    const Rcmdp& training = models.training;
    const Rcmdp& reporting = models.reporting;

    RunArtifacts out;
    out.files.emplace_back("config_resolved.json", resolved_config_json(config));
    json summary;
    summary["command"] = to_string(config.command);
    summary["seed"] = seed;

    switch (config.command) {
    case Command::solve: {
        const auto vi = robust_value_iteration(training, config.solve.lambda, config.solve.iteration);
        const Signal signal = vi.value.signal;
        const auto actions = greedy_actions(robust_q_backup(training, signal, vi.value.values));
        const PolicyTable table = deterministic_table(actions, training.n_actions);
        out.files.emplace_back("metrics.csv", csv_text([&](std::ostream& os) {
            os << "iteration,residual\n";
            for (std::size_t i = 0; i < vi.residuals.size(); ++i)
                os << i << ',' << csv::format(vi.residuals[i]) << '\n';
        }));
        out.files.emplace_back("policy.csv", csv_text([&](std::ostream& os) { write_policy_csv(os, table); }));
        out.files.emplace_back("values.csv", csv_text([&](std::ostream& os) {
            write_values_csv(os, vi.value.values);
        }));
        summary.update(summary_returns(reporting, table, config.evaluation));
        summary["optimal_return"] = robust_return(training, vi.value);
        summary["iterations"] = vi.residuals.size();
        summary["lambda"] = config.solve.lambda ? *config.solve.lambda : 0.0;
        break;
    }
    case Command::train_rcpg: {
        RcpgConfig rc = config.rcpg;
        rc.seed = seed;
        rc.evaluation = config.evaluation;
        const auto result = rcpg_train(training, rc, std::nullopt, &reporting);
        const PolicyTable table = result.state.policy.table();
        out.files.emplace_back("metrics.csv", csv_text([&](std::ostream& os) {
            write_rcpg_history_csv(os, result.history);
        }));
        out.files.emplace_back("policy.csv", csv_text([&](std::ostream& os) { write_policy_csv(os, table); }));
        const auto values = robust_policy_evaluation(reporting, table, Signal::reward(), config.evaluation);
        out.files.emplace_back("values.csv", csv_text([&](std::ostream& os) {
            write_values_csv(os, values.values);
        }));
        summary.update(summary_returns(reporting, table, config.evaluation));
        summary["lambda"] = result.state.lambda;
        summary["episodes"] = result.state.k;
        break;
    }
    case Command::train_rcac: {
        RcacConfig ac = config.rcac;
        ac.seed = seed;
        const auto result = rcac_train(training, ac);
        const PolicyTable table = result.policy.table();
        out.files.emplace_back("metrics.csv", csv_text([&](std::ostream& os) {
            write_rcac_history_csv(os, result.history);
        }));
        out.files.emplace_back("policy.csv", csv_text([&](std::ostream& os) { write_policy_csv(os, table); }));
        out.files.emplace_back("values.csv", csv_text([&](std::ostream& os) {
            write_values_csv(os, result.critic.w);
        }));
        summary.update(summary_returns(reporting, table, config.evaluation));
        summary["lambda"] = result.lambda;
        summary["steps"] = result.history.size();
        break;
    }
    case Command::eval: {
        std::ifstream in(config.eval.policy_file);
        const PolicyTable table = read_policy_csv(in, training.n_states, training.n_actions);
        const auto v = robust_policy_evaluation(reporting, table, Signal::reward(), config.evaluation);
        const auto u = robust_policy_evaluation(reporting, table, Signal::constraint(), config.evaluation);
        const auto w = robust_policy_evaluation(reporting, table, Signal::combined(config.eval.lambda),
                                                config.evaluation);
        out.files.emplace_back("metrics.csv", csv_text([&](std::ostream& os) {
            os << "s,value_r,value_d,value_combined\n";
            for (std::size_t s = 0; s < reporting.n_states; ++s)
                os << s << ',' << csv::format(v.values[s]) << ',' << csv::format(u.values[s]) << ','
                   << csv::format(w.values[s]) << '\n';
        }));
        out.files.emplace_back("policy.csv", csv_text([&](std::ostream& os) { write_policy_csv(os, table); }));
        out.files.emplace_back("values.csv", csv_text([&](std::ostream& os) {
            write_values_csv(os, v.values);
        }));
        const double rho_r = robust_return(reporting, v);
        const double rho_d = robust_return(reporting, u);
        summary["robust_return_r"] = rho_r;
        summary["robust_return_d"] = rho_d;
        summary["beta"] = reporting.beta;
        summary["feasible"] = rho_d >= reporting.beta;
        summary["lambda"] = config.eval.lambda;
        summary["lagrangian"] = rho_r + config.eval.lambda * (rho_d - reporting.beta);
        summary["robust_return_combined"] = robust_return(reporting, w);
        break;
    }
    case Command::shape: {
        out.files.emplace_back("model.json", model_to_json(training, 1) + "\n");
        summary["lyapunov_mode"] = lyapunov_mode_name(config.lyapunov.mode);
        summary["beta"] = training.beta;
        summary["candidate_ok"] = true;
        break;
    }
    case Command::invariance_test: {
        Rcmdp model = reporting;
        model.gamma = 1.0;
        const auto report = invariance_test(model, *models.lyapunov, config.invariance.horizon,
                                            {config.invariance.lambda, 1e-9, 4000000});
        out.files.emplace_back("metrics.csv", csv_text([&](std::ostream& os) {
            os << "set,policy_code\n";
            for (auto code : report.optimal_original) os << "original," << code << '\n';
            for (auto code : report.optimal_shaped) os << "shaped," << code << '\n';
        }));
        summary["horizon"] = report.horizon;
        summary["policies_enumerated"] = report.policies_enumerated;
        summary["optimal_sets_equal"] = report.optimal_sets_equal;
        summary["max_q_offset_error"] = report.max_q_offset_error;
        summary["zero_terminal_sets_equal"] = report.zero_terminal_sets_equal;
        summary["passed"] = report.passed;
        break;
    }
    }
    json warnings = json::array();
    if (summary.contains("feasible") && !summary.at("feasible").get<bool>())
        warnings.push_back("robust constraint return is below the budget beta");
    summary["warnings"] = warnings;
    out.files.emplace_back("summary.json", summary.dump(2) + "\n");
    return out;
}

std::vector<std::string> run(const ExperimentConfig& config, const std::string& out_dir) {
    std::vector<std::future<RunArtifacts>> jobs;
    for (auto seed : config.seeds)
        jobs.push_back(std::async(std::launch::async, [&config, seed] { return run_single(config, seed); }));

    std::vector<RunArtifacts> results;
    std::exception_ptr failure;
    for (auto& job : jobs) {
        try {
            results.push_back(job.get());
        } catch (...) {
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<std::string> dirs;
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        const fs::path dir = fs::path(out_dir) / ("seed_" + std::to_string(config.seeds[i]));
        fs::create_directories(dir);
        for (const auto& [name, contents] : results[i].files)
            write_file_atomic((dir / name).string(), contents);
        dirs.push_back(dir.string());
    }
    return dirs;
}

std::size_t episodes_to_threshold(const std::vector<double>& returns,
                                  const std::vector<std::size_t>& episodes, double fraction) {
    if (returns.empty() || returns.size() != episodes.size())
        throw std::invalid_argument("episodes_to_threshold needs aligned, non-empty series");
    const double final_value = returns.back();
    const double threshold = final_value - (1.0 - fraction) * std::abs(final_value);
    for (std::size_t i = 0; i < returns.size(); ++i)
        if (returns[i] >= threshold) return episodes[i];
    return episodes.back();
}

std::string compare(const std::vector<std::string>& run_dirs, double fraction) {
    if (run_dirs.size() < 2) throw std::invalid_argument("compare needs at least two run directories");

    struct SeedRow {
        std::string seed;
        std::size_t episodes = 0;
        double final_r = 0.0;
        double final_d = 0.0;
        bool feasible = false;
    };
    auto load_run = [&](const fs::path& dir, const std::string& label) {
        const fs::path metrics = dir / "metrics.csv";
        const csv::Table table = csv::read_file(metrics.string());
        try {
            csv::require_columns(table, {"k", "robust_return_r", "robust_return_d", "lambda"});
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(metrics.string() + ": " + e.what());
        }
        if (table.rows.empty()) throw std::invalid_argument(metrics.string() + ": no rows");
        std::vector<double> returns;
        std::vector<std::size_t> episodes;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            returns.push_back(table.number(i, "robust_return_r"));
            episodes.push_back(table.index(i, "k"));
        }
        SeedRow row;
        row.seed = label;
        row.episodes = episodes_to_threshold(returns, episodes, fraction);
        const fs::path summary_path = dir / "summary.json";
        if (fs::is_regular_file(summary_path)) {
            const json summary = json::parse(read_file(summary_path.string()));
            row.final_r = summary.at("robust_return_r").get<double>();
            row.final_d = summary.at("robust_return_d").get<double>();
            row.feasible = summary.at("feasible").get<bool>();
        } else {
            row.final_r = returns.back();
            row.final_d = table.number(table.rows.size() - 1, "robust_return_d");
            row.feasible = false;
        }
        return row;
    };

    std::ostringstream out;
    out << "arm,kind,seed,episodes_to_threshold,final_return_r,final_return_d,feasible_rate,"
           "delta_episodes_vs_first\n";
    double first_median = 0.0;
    for (std::size_t arm = 0; arm < run_dirs.size(); ++arm) {
        const fs::path dir(run_dirs[arm]);
        std::vector<SeedRow> rows;
        if (fs::is_regular_file(dir / "metrics.csv")) {
            rows.push_back(load_run(dir, dir.filename().string()));
        } else {
            if (!fs::is_directory(dir))
                throw std::invalid_argument("run directory '" + dir.string() + "' does not exist");
            std::vector<fs::path> seeds;
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.is_directory() && entry.path().filename().string().rfind("seed_", 0) == 0)
                    seeds.push_back(entry.path());
            std::sort(seeds.begin(), seeds.end());
            if (seeds.empty())
                throw std::invalid_argument("'" + dir.string() + "' holds no metrics.csv or seed_* runs");
            for (const auto& seed_dir : seeds)
                rows.push_back(load_run(seed_dir, seed_dir.filename().string().substr(5)));
        }

        std::vector<double> counts;
        std::vector<double> finals_r, finals_d;
        double feasible = 0.0;
        for (const auto& row : rows) {
            out << arm << ",seed," << row.seed << ',' << row.episodes << ',' << csv::format(row.final_r)
                << ',' << csv::format(row.final_d) << ',' << (row.feasible ? 1 : 0) << ",\n";
            counts.push_back(static_cast<double>(row.episodes));
            finals_r.push_back(row.final_r);
            finals_d.push_back(row.final_d);
            feasible += row.feasible ? 1.0 : 0.0;
        }
        auto median = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        };
        const double m = median(counts);
        if (arm == 0) first_median = m;
        out << arm << ",median,," << csv::format(m) << ',' << csv::format(median(finals_r)) << ','
            << csv::format(median(finals_d)) << ','
            << csv::format(feasible / static_cast<double>(rows.size())) << ','
            << csv::format(m - first_median) << '\n';
    }
    return out.str();
}

} // namespace rcmdp
