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
#include "rcmdp/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// RCMDP_LOG selects verbosity: 0 silent, 1 (default) summary lines, 2 details.
int log_level() {
    const char* raw = std::getenv("RCMDP_LOG");
    if (!raw || !*raw) return 1;
    const std::string value(raw);
    if (value == "quiet" || value == "0") return 0;
    if (value == "debug" || value == "2") return 2;
    return 1;
}

void log(int level, const std::string& message) {
    if (log_level() >= level) std::cerr << "[rcmdp] " << message << '\n';
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw rcmdp::ConfigError("--seed: empty entry in '" + text + "'");
        std::size_t used = 0;
        unsigned long long value = 0;
        try {
            value = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.front() == '-')
            throw rcmdp::ConfigError("--seed: '" + item + "' is not a non-negative integer");
        seeds.push_back(value);
    }
    if (seeds.empty()) throw rcmdp::ConfigError("--seed: no seeds given");
    return seeds;
}

int run_command(const std::string& verb, const std::string& config_path, const std::string& out_dir,
                const std::string& seed_text) {
    try {
        rcmdp::ExperimentConfig config = rcmdp::load_config(config_path, rcmdp::parse_command(verb));
        if (!seed_text.empty()) config.seeds = parse_seeds(seed_text);
        log(2, "resolved config:\n" + rcmdp::resolved_config_json(config));
        const auto dirs = rcmdp::run(config, out_dir);
        for (const auto& dir : dirs) log(1, verb + " wrote " + dir);
        return kExitOk;
    } catch (const rcmdp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int compare_command(const std::vector<std::string>& dirs, const std::string& out_path, double fraction) {
    try {
        const std::string table = rcmdp::compare(dirs, fraction);
        if (out_path.empty()) {
            std::cout << table;
        } else {
            const auto parent = std::filesystem::path(out_path).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            rcmdp::write_file_atomic(out_path, table);
            log(1, "compare wrote " + out_path);
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust constrained MDP solver and learners"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "runs", seed_text;
    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"solve", "Robust value iteration (optionally Lagrangian at fixed lambda)"},
        {"train-rcpg", "Robust constrained policy gradient"},
        {"train-rcac", "Robust constrained actor-critic"},
        {"eval", "Robust evaluation of a policy CSV"},
        {"shape", "Emit the Lyapunov-shaped or stability-constrained model"},
        {"invariance-test", "Check optimal-policy invariance under Lyapunov shaping"},
    };
    for (const auto& [verb, help] : verbs) {
        auto* sub = app.add_subcommand(verb, help);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed_text, "Seed or comma-separated seed list");
    }

    std::vector<std::string> compare_dirs;
    std::string compare_out;
    double fraction = 0.9;
    auto* cmp = app.add_subcommand("compare", "Episodes-to-threshold comparison across runs");
    cmp->add_option("runs", compare_dirs, "Run directories (arms)")->required()->expected(2, -1);
    cmp->add_option("--out", compare_out, "Write the table here instead of stdout");
    cmp->add_option("--fraction", fraction, "Threshold fraction of the final return")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const auto* chosen = app.get_subcommands().front();
    if (chosen->get_name() == "compare") return compare_command(compare_dirs, compare_out, fraction);
    return run_command(chosen->get_name(), config_path, out_dir, seed_text);
}
