// Copyright 2026 The stein-sense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "stein_sense/gauss_core.hpp"

namespace stein {

enum class Experiment { Fig1, Fig2a, Fig2b, Risk, Bayes, Selfcheck };

std::string_view to_string(Experiment e);
/// Throws ConfigError for an unknown name.
Experiment parse_experiment(std::string_view name);

/// Resource grid. Log-spaced grids round to integers and drop duplicates,
/// so they can hold fewer than `points` values.
struct NGrid {
    int min = 1;
    int max = 1;
    int points = 1;
    bool log_spaced = false;

    std::vector<int> values() const;
};

/// Parses "c*I(n)", "I(n)", or dense rows "a,b;c,d". `field` names the
/// option in error messages. Throws ConfigError.
SPDMatrix parse_spd(std::string_view spec, std::string_view field);

/// Parses "v1,v2,...". Throws ConfigError.
Vector parse_vector(std::string_view text, std::string_view field);

/// Everything a run needs, fully resolved. Matrix fields keep their textual
/// spec so the manifest can echo them verbatim.
struct ExperimentConfig {
    Experiment experiment = Experiment::Fig1;
    Vector theta;
    std::optional<std::string> sigma;
    std::optional<std::string> delta;
    std::optional<std::string> xi;
    double width = 1.0;
    NGrid n_grid;
    std::uint64_t reps = 100'000;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
    /// 0 means hardware concurrency. Never affects results.
    unsigned threads = 0;
};

/// Values given explicitly on the command line. Unset fields fall back to
/// the config file, then to the experiment defaults.
struct ConfigOverrides {
    std::optional<std::string> theta;
    std::optional<std::string> sigma;
    std::optional<std::string> delta;
    std::optional<std::string> xi;
    std::optional<double> width;
    std::optional<int> n_min;
    std::optional<int> n_max;
    std::optional<int> n_points;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;
};

/// Defaults for `experiment`, then the JSON file at `config_path` (a plain
/// config object or a manifest.json, whose "config" member is used), then
/// `flags`. Theta, sigma and delta default as a bundle: once theta is given,
/// the matrices must be given too. Throws ConfigError naming the field.
ExperimentConfig parse_config(Experiment experiment,
                              const std::optional<std::filesystem::path>& config_path,
                              const ConfigOverrides& flags);

/// Throws ConfigError if the config is inconsistent.
void validate_config(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

/// Build identifier recorded in manifests.
std::string_view version_string();

struct RunResult {
    std::vector<std::filesystem::path> outputs;
    /// false when a selfcheck failed.
    bool passed = true;
};

/// Runs the experiment, writes its CSVs and manifest.json into out_dir.
/// Throws ConfigError or IOError.
RunResult run(const ExperimentConfig& config);

/// The four parameters of the fig2b sweep: the fig2a theta with its
/// deviation from the component mean rescaled so that v(theta) takes each
/// value in `isotropies`.
std::vector<Vector> fig2b_thetas(const Vector& base, const std::vector<double>& isotropies);

/// Isotropy targets used by fig2b.
std::vector<double> fig2b_isotropies();

}  // namespace stein
