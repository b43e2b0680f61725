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

#include "rcmdp/actor_critic.hpp"
#include "rcmdp/envs.hpp"
#include "rcmdp/lyapunov.hpp"
#include "rcmdp/rcpg.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcmdp {

/// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { solve, train_rcpg, train_rcac, eval, shape, invariance_test };

Command parse_command(const std::string& verb);
std::string to_string(Command command);

enum class LyapunovMode { none, shaping, stability_constraint };

struct LyapunovOptions {
    LyapunovMode mode = LyapunovMode::none;
    /// CSV `s,value`; when empty the environment's bundled candidate is used.
    std::string file;
    std::optional<std::size_t> equilibrium;
    double beta = 0.0;
};

struct SolveOptions {
    std::optional<double> lambda;
    IterationOptions iteration;
};

struct EvalOptions {
    std::string policy_file;
    double lambda = 0.0;
};

struct InvarianceConfig {
    std::size_t horizon = 3;
    double lambda = 0.0;
};

/// Fully-defaulted experiment description. `environment` keeps the raw JSON
/// environment block (already validated) so it can be echoed back.
struct ExperimentConfig {
    Command command = Command::solve;
    std::string environment_json;
    std::optional<double> beta_override;
    LyapunovOptions lyapunov;
    RcpgConfig rcpg;
    RcacConfig rcac;
    SolveOptions solve;
    EvalOptions eval;
    InvarianceConfig invariance;
    IterationOptions evaluation;
    std::vector<std::uint64_t> seeds{0};
    /// Directory that relative paths in the config resolve against.
    std::string base_dir = ".";
};

/// Parses a JSON config; throws ConfigError naming the line or field at fault.
ExperimentConfig parse_config(const std::string& text, Command command,
                              const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path, Command command);

/// JSON echo of the resolved config with every default filled in.
std::string resolved_config_json(const ExperimentConfig& config);

/// The environment's model plus its bundled Lyapunov candidate, if any.
struct Environment {
    Rcmdp model;
    std::optional<LyapunovFn> lyapunov;
};

Environment build_environment(const ExperimentConfig& config);

/// Model after applying the Lyapunov option (shaping or stability constraint).
struct PreparedModels {
    Rcmdp training;
    /// Model whose robust returns are reported (the unshaped one under shaping).
    Rcmdp reporting;
    std::optional<LyapunovFn> lyapunov;
};

PreparedModels prepare_models(const ExperimentConfig& config);

/// In-memory artifacts of one (config, seed) run, keyed by file name.
struct RunArtifacts {
    std::vector<std::pair<std::string, std::string>> files;

    const std::string* find(const std::string& name) const;
};

RunArtifacts run_single(const ExperimentConfig& config, std::uint64_t seed);

/// Runs every seed (concurrently) and writes `<out>/seed_<n>/<file>` atomically.
/// Returns the run directories.
std::vector<std::string> run(const ExperimentConfig& config, const std::string& out_dir);

/// Episodes-to-threshold comparison across run directories. Each directory is
/// either a single run (contains metrics.csv) or holds seed_* subdirectories.
/// Throws std::invalid_argument on schema problems.
std::string compare(const std::vector<std::string>& run_dirs, double fraction = 0.9);

/// First k whose robust_return_r reaches the threshold implied by the final
/// value: final - (1 - fraction) |final|.
std::size_t episodes_to_threshold(const std::vector<double>& returns,
                                  const std::vector<std::size_t>& episodes, double fraction);

} // namespace rcmdp
