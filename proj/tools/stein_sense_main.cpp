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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "stein_sense/errors.hpp"
#include "stein_sense/experiments.hpp"

namespace {

// Exit codes: 0 ok, 1 selfcheck failure, 2 usage or config error, 3 other.
constexpr int kSelfcheckFailed = 1;
constexpr int kConfigFailed = 2;
constexpr int kRuntimeFailed = 3;

std::optional<unsigned> threads_from_env() {
    const char* env = std::getenv("STEIN_SENSE_THREADS");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(env, &used);
        if (used != std::string(env).size()) {
            throw std::invalid_argument(env);
        }
        return static_cast<unsigned>(v);
    } catch (const std::exception&) {
        throw stein::ConfigError(std::string("STEIN_SENSE_THREADS: '") + env +
                                 "' is not a non-negative integer");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"James-Stein, MLE and Bayes risk experiments for Gaussian sensing models"};
    app.set_version_flag("--version", std::string(stein::version_string()));

    std::string experiment;
    std::optional<std::string> config_file;
    stein::ConfigOverrides flags;

    app.add_option("experiment", experiment, "fig1, fig2a, fig2b, risk, bayes or selfcheck")->required();
    app.add_option("--config", config_file, "JSON config or a previous manifest.json");
    app.add_option("--theta", flags.theta, "parameter vector, e.g. 0.5,-0.2,0.3,0.1");
    app.add_option("--sigma", flags.sigma, "measurement covariance, 'c*I(n)' or rows 'a,b;c,d'");
    app.add_option("--delta", flags.delta, "noise-channel covariance (noisy strategies)");
    app.add_option("--xi", flags.xi, "prior covariance (bayes)");
    app.add_option("--B", flags.width, "probe width (fig2a, fig2b)");
    app.add_option("--n-min", flags.n_min, "smallest resource count");
    app.add_option("--n-max", flags.n_max, "largest resource count");
    app.add_option("--n-points", flags.n_points, "grid size");
    app.add_option("--reps", flags.reps, "Monte-Carlo repetitions per point");
    app.add_option("--seed", flags.seed, "RNG seed");
    app.add_option("--out", flags.out_dir, "output directory");
    app.add_option("--threads", flags.threads, "worker threads, 0 = all cores (env STEIN_SENSE_THREADS)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!flags.threads) {
            flags.threads = threads_from_env();
        }
        const stein::Experiment which = stein::parse_experiment(experiment);
        std::optional<std::filesystem::path> path;
        if (config_file) {
            path = *config_file;
        }
        const stein::ExperimentConfig config = stein::parse_config(which, path, flags);
        const stein::RunResult result = stein::run(config);
        for (const auto& p : result.outputs) {
            std::cout << p.string() << '\n';
        }
        std::cout << (config.out_dir / "manifest.json").string() << '\n';
        if (!result.passed) {
            std::cerr << "stein-sense: selfcheck failed, see " << result.outputs.front().string() << '\n';
            return kSelfcheckFailed;
        }
        return 0;
    } catch (const stein::ConfigError& e) {
        std::cerr << "stein-sense: config error: " << e.what() << '\n';
        return kConfigFailed;
    } catch (const std::exception& e) {
        std::cerr << "stein-sense: " << e.what() << '\n';
        return kRuntimeFailed;
    }
}
