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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <variant>

#include "stein_sense/errors.hpp"
#include "stein_sense/estimators.hpp"
#include "stein_sense/experiments.hpp"
#include "stein_sense/postselect.hpp"
#include "stein_sense/replicate.hpp"
#include "stein_sense/risk_engine.hpp"
#include "stein_sense/sensing_models.hpp"

namespace stein {

namespace {

// Reps for the plain (t = 1) baseline in the PAD denominator.
constexpr std::uint64_t kBaselineReps = 100'000;

// A CSV with a one-line header. Numbers are written with 17 significant
// digits so a read-back reproduces the double exactly.
class CsvTable {
public:
    using Cell = std::variant<double, long long, std::string>;

    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<Cell> row) {
        if (row.size() != header_.size()) {
            throw Error("csv row has " + std::to_string(row.size()) + " cells, header has " +
                        std::to_string(header_.size()));
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const double* d = std::get_if<double>(&row[i]); d && !std::isfinite(*d)) {
                throw Error("non-finite value in csv column " + header_[i]);
            }
        }
        rows_.push_back(std::move(row));
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IOError("cannot open " + path.string() + " for writing");
        }
        write_row(out, header_);
        for (const auto& row : rows_) {
            std::vector<std::string> text;
            text.reserve(row.size());
            for (const auto& cell : row) {
                text.push_back(format(cell));
            }
            write_row(out, text);
        }
        out.flush();
        if (!out) {
            throw IOError("write to " + path.string() + " failed");
        }
    }

private:
    static std::string format(const Cell& cell) {
        if (const double* d = std::get_if<double>(&cell)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", *d);
            return buf;
        }
        if (const long long* i = std::get_if<long long>(&cell)) {
            return std::to_string(*i);
        }
        return std::get<std::string>(cell);
    }

    static void write_row(std::ostream& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i > 0 ? "," : "") << cells[i];
        }
        out << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

// Values first, then their standard errors in the same order.
std::vector<std::string> with_se(std::vector<std::string> lead, const std::vector<std::string>& values) {
    lead.insert(lead.end(), values.begin(), values.end());
    for (const auto& v : values) {
        lead.push_back(v + "_se");
    }
    return lead;
}

std::optional<SPDMatrix> optional_spd(const std::optional<std::string>& spec, const char* field) {
    if (!spec) {
        return std::nullopt;
    }
    return parse_spd(*spec, field);
}

// Independent stream for (curve, N), so one point does not depend on the
// rest of the grid.
SeededRng point_rng(const SeededRng& root, std::uint64_t curve, int n) {
    return rng_fork(rng_fork(root, curve), static_cast<std::uint64_t>(n));
}

long long as_ll(int n) { return static_cast<long long>(n); }

std::filesystem::path run_fig1(const ExperimentConfig& c, const SeededRng& root) {
    const SPDMatrix sigma = parse_spd(*c.sigma, "sigma");
    const SPDMatrix delta = parse_spd(*c.delta, "delta");
    const Vector nu = Vector::Zero(c.theta.size());

    CsvTable table(with_se({"N"}, {"ad_sep_noisy_js", "ad_seq_noisy_js", "ad_seq_noiseless_js",
                                   "ad_seq_vs_sep_js"}));
    for (int n : c.n_grid.values()) {
        struct Pair {
            RiskEstimate mle;
            RiskEstimate js;
        };
        auto risks = [&](Strategy s) {
            const auto d = is_noisy(s) ? std::optional(delta) : std::nullopt;
            const ModelPoint p = model_distribution(s, c.theta, sigma, d, n);
            const auto curve = static_cast<std::uint64_t>(s);
            return Pair{risk_mle_exact(p.gamma_n),
                        risk_js_semianalytic(c.theta, p.gamma_n, nu, c.reps, point_rng(root, curve, n))};
        };
        const Pair sep_noisy = risks(Strategy::SeparateNoisy);
        const Pair seq_noisy = risks(Strategy::SequentialNoisy);
        const Pair seq_clean = risks(Strategy::SequentialNoiseless);

        const Ratio a = advantage(sep_noisy.js, sep_noisy.mle);
        const Ratio b = advantage(seq_noisy.js, seq_noisy.mle);
        const Ratio d = advantage(seq_clean.js, seq_clean.mle);
        const Ratio e = advantage(seq_noisy.js, sep_noisy.js);
        table.add({as_ll(n), a.value, b.value, d.value, e.value, a.std_error, b.std_error, d.std_error,
                   e.std_error});
    }
    const auto path = c.out_dir / "fig1.csv";
    table.write(path);
    return path;
}

std::filesystem::path run_fig2a(const ExperimentConfig& c, const SeededRng& root) {
    const ProbeModel probe(c.theta, c.width);
    const auto points = pad_curve(c.n_grid.values(), probe, c.reps, root, {}, kBaselineReps);

    CsvTable table(with_se({"N"}, {"risk_pmle", "risk_pmjs", "risk_mle", "risk_mjs", "ad_pmjs_pmle",
                                   "ad_mjs_mle"}));
    for (const PadPoint& p : points) {
        table.add({as_ll(p.n), p.risk_pmle.value, p.risk_pmjs.value, p.risk_mle.value, p.risk_mjs.value,
                   p.ad_post.value, p.ad_plain.value, p.risk_pmle.std_error, p.risk_pmjs.std_error,
                   p.risk_mle.std_error, p.risk_mjs.std_error, p.ad_post.std_error, p.ad_plain.std_error});
    }
    const auto path = c.out_dir / "fig2a.csv";
    table.write(path);
    return path;
}

std::filesystem::path run_fig2b(const ExperimentConfig& c, const SeededRng& root) {
    const std::vector<double> targets = fig2b_isotropies();
    const std::vector<Vector> thetas = fig2b_thetas(c.theta, targets);
    const std::vector<int> grid = c.n_grid.values();

    std::vector<std::string> header = {"theta_id", "v_theta"};
    for (Index i = 0; i < c.theta.size(); ++i) {
        header.push_back("theta_" + std::to_string(i));
    }
    header.push_back("N");
    CsvTable table(with_se(header, {"pad"}));
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        const ProbeModel probe(thetas[j], c.width);
        const auto points = pad_curve(grid, probe, c.reps, rng_fork(root, j), {}, kBaselineReps);
        for (const PadPoint& p : points) {
            std::vector<CsvTable::Cell> row = {static_cast<long long>(j), isotropy(thetas[j])};
            for (Index i = 0; i < thetas[j].size(); ++i) {
                row.emplace_back(thetas[j](i));
            }
            row.emplace_back(as_ll(p.n));
            row.emplace_back(p.pad.value);
            row.emplace_back(p.pad.std_error);
            table.add(std::move(row));
        }
    }
    const auto path = c.out_dir / "fig2b.csv";
    table.write(path);
    return path;
}

std::filesystem::path run_risk(const ExperimentConfig& c, const SeededRng& root) {
    const SPDMatrix sigma = parse_spd(*c.sigma, "sigma");
    const auto delta = optional_spd(c.delta, "delta");
    const Index dim = c.theta.size();
    const bool with_mjs = dim >= 4;
    const Vector nu = Vector::Zero(dim);

    std::vector<std::string> values = {"risk_mle", "risk_js"};
    if (with_mjs) {
        values.emplace_back("risk_mjs");
    }
    CsvTable table(with_se({"strategy", "N"}, values));

    std::vector<Strategy> strategies = {Strategy::SeparateNoiseless, Strategy::SequentialNoiseless};
    if (delta) {
        strategies.push_back(Strategy::SeparateNoisy);
        strategies.push_back(Strategy::SequentialNoisy);
    }
    for (Strategy s : strategies) {
        const auto curve = static_cast<std::uint64_t>(s);
        for (int n : c.n_grid.values()) {
            const ModelPoint p = model_distribution(s, c.theta, sigma, is_noisy(s) ? delta : std::nullopt, n);
            const RiskEstimate mle = risk_mle_exact(p.gamma_n);
            const RiskEstimate js = risk_js_semianalytic(c.theta, p.gamma_n, nu, c.reps, point_rng(root, curve, n));
            std::vector<CsvTable::Cell> row = {std::string(to_string(s)), as_ll(n), mle.value, js.value};
            std::vector<double> errors = {mle.std_error, js.std_error};
            if (with_mjs) {
                const RiskEstimate mjs =
                    risk_mjs_semianalytic(c.theta, p.gamma_n, c.reps, point_rng(root, 16 + curve, n));
                row.emplace_back(mjs.value);
                errors.push_back(mjs.std_error);
            }
            row.insert(row.end(), errors.begin(), errors.end());
            table.add(std::move(row));
        }
    }
    const auto path = c.out_dir / "risk.csv";
    table.write(path);
    return path;
}

std::filesystem::path run_bayes(const ExperimentConfig& c, const SeededRng& root) {
    const SPDMatrix sigma = parse_spd(*c.sigma, "sigma");
    const auto delta = optional_spd(c.delta, "delta");
    const GaussianPrior prior{c.theta, parse_spd(*c.xi, "xi")};
    const Index dim = c.theta.size();
    const Strategy strategy = delta ? Strategy::SeparateNoisy : Strategy::SeparateNoiseless;

    std::vector<std::pair<std::string, EstimatorKind>> kinds = {
        {"mle", Mle{}}, {"js", NuJSConfig{}}, {"bayes", Bayes{prior}}};
    if (dim >= 4) {
        kinds.insert(kinds.begin() + 2, {"mjs", MeanJS{}});
    }
    std::vector<std::string> values;
    for (const auto& [name, kind] : kinds) {
        values.push_back("risk_" + name);
    }
    for (const auto& [name, kind] : kinds) {
        values.push_back("risk_" + name + "_mc");
    }
    CsvTable table(with_se({"N"}, values));

    for (int n : c.n_grid.values()) {
        const SPDMatrix gamma = model_distribution(strategy, c.theta, sigma, delta, n).gamma_n;
        std::vector<CsvTable::Cell> row = {as_ll(n)};
        std::vector<double> errors;
        std::vector<RiskEstimate> estimates;
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            estimates.push_back(bayes_risk_table(kinds[k].second, gamma, prior, c.reps, point_rng(root, k, n)));
        }
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            estimates.push_back(bayes_risk_mc(kinds[k].second, prior, gamma, c.reps, point_rng(root, 16 + k, n)));
        }
        for (const RiskEstimate& r : estimates) {
            row.emplace_back(r.value);
            errors.push_back(r.std_error);
        }
        row.insert(row.end(), errors.begin(), errors.end());
        table.add(std::move(row));
    }
    const auto path = c.out_dir / "bayes.csv";
    table.write(path);
    return path;
}

struct CheckRow {
    std::string check;
    long long item;
    double value;
    double value_se;
    double target;
    double tolerance;
    bool passed;
};

std::filesystem::path run_selfcheck(const ExperimentConfig& c, const SeededRng& root, bool& passed) {
    std::vector<CheckRow> rows;

    // Ancilla covariance identity on random SPD pairs, dimensions 2..8.
    {
        SeededRng rng = rng_fork(root, 1);
        for (int i = 0; i < 100; ++i) {
            const Index dim = 2 + static_cast<Index>(rng() % 7);
            const SPDMatrix a = random_spd(dim, rng, 0.1, 10.0);
            const SPDMatrix a_anc = random_spd(dim, rng, 0.1, 10.0);
            const double d = lemma1_check(a, a_anc);
            rows.push_back({"lemma1", i, d, 0.0, 0.0, 1e-9, d <= 1e-9});
        }
    }

    // Rejection sampler: acceptance rate against 1 / M.
    {
        struct Case {
            double delta;
            double t;
            double width;
        };
        const std::vector<Case> cases = {
            {0.0, 0.5, 1.0}, {1.0, 0.5, 1.0}, {0.05, 0.2, 1.0}, {0.3, 0.8, 1.0}, {0.5, 0.3, 2.0}};
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const Case& k = cases[i];
            const Vector theta0 = Vector::Zero(4);
            const Vector theta = Vector::Constant(4, k.delta / 2.0);
            const double expected = 1.0 / envelope_constant(theta - theta0, k.t, k.width);
            SeededRng rng = rng_fork(root, 100 + i);
            std::uint64_t attempts = 0;
            for (std::uint64_t r = 0; r < c.reps; ++r) {
                attempts += sample_postselected(theta, theta0, k.t, k.width, rng).attempts;
            }
            const double rate = static_cast<double>(c.reps) / static_cast<double>(attempts);
            const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(attempts));
            rows.push_back({"acceptance_rate", static_cast<long long>(i), rate, se, expected, 4.0 * se,
                            std::abs(rate - expected) <= 4.0 * se});
        }
    }

    // Bayes ordering R_B < R_JS < R_MLE on random instances.
    {
        SeededRng rng = rng_fork(root, 2);
        int resolved = 0;
        const int instances = 20;
        for (int i = 0; i < instances; ++i) {
            const Index dim = 3 + static_cast<Index>(rng() % 6);
            const SPDMatrix gamma = random_spd(dim, rng, 0.2, 2.0);
            const GaussianPrior prior{rng.normal_vector(dim), random_spd(dim, rng, 0.2, 2.0)};
            const SeededRng table_rng = rng_fork(root, 1000 + static_cast<std::uint64_t>(i));
            const RiskEstimate mle = bayes_risk_table(Mle{}, gamma, prior, c.reps, table_rng);
            const RiskEstimate js = bayes_risk_table(NuJSConfig{}, gamma, prior, c.reps, table_rng);
            const RiskEstimate bayes = bayes_risk_table(Bayes{prior}, gamma, prior, c.reps, table_rng);
            // The MLE and Bayes rows are exact; only the JS row carries error.
            const Ordering lo = compare_less(bayes.value, js.value, js.std_error);
            const Ordering hi = compare_less(js.value, mle.value, js.std_error);
            rows.push_back({"bayes_lt_js", i, js.value - bayes.value, js.std_error, 0.0, 4.0 * js.std_error,
                            lo != Ordering::Violated});
            rows.push_back({"js_lt_mle", i, mle.value - js.value, js.std_error, 0.0, 4.0 * js.std_error,
                            hi != Ordering::Violated});
            if (lo == Ordering::Holds && hi == Ordering::Holds) {
                ++resolved;
            }
        }
        rows.push_back({"bayes_resolved", instances, static_cast<double>(resolved), 0.0, 18.0, 0.0,
                        resolved >= 18});
    }

    CsvTable table({"check", "item", "value", "value_se", "target", "tolerance", "passed"});
    passed = true;
    for (const CheckRow& r : rows) {
        passed = passed && r.passed;
        table.add({r.check, r.item, r.value, r.value_se, r.target, r.tolerance, static_cast<long long>(r.passed)});
    }
    const auto path = c.out_dir / "selfcheck.csv";
    table.write(path);
    return path;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::vector<double> fig2b_isotropies() { return {5e-4, 2e-3, 1e-2, 5e-2}; }

std::vector<Vector> fig2b_thetas(const Vector& base, const std::vector<double>& isotropies) {
    const double v0 = isotropy(base);
    if (!(v0 > 0.0)) {
        throw InvalidArgument("fig2b needs an anisotropic base theta");
    }
    const Vector centre = Vector::Constant(base.size(), base.mean());
    std::vector<Vector> out;
    out.reserve(isotropies.size());
    for (double v : isotropies) {
        if (!(v >= 0.0)) {
            throw InvalidArgument("isotropy targets must be non-negative");
        }
        out.push_back(centre + std::sqrt(v / v0) * (base - centre));
    }
    return out;
}

RunResult run(const ExperimentConfig& config) {
    validate_config(config);
    const auto started = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();

    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) {
        throw IOError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
    }
    set_worker_threads(config.threads);

    const SeededRng root(config.seed);
    RunResult result;
    switch (config.experiment) {
        case Experiment::Fig1: result.outputs.push_back(run_fig1(config, root)); break;
        case Experiment::Fig2a: result.outputs.push_back(run_fig2a(config, root)); break;
        case Experiment::Fig2b: result.outputs.push_back(run_fig2b(config, root)); break;
        case Experiment::Risk: result.outputs.push_back(run_risk(config, root)); break;
        case Experiment::Bayes: result.outputs.push_back(run_bayes(config, root)); break;
        case Experiment::Selfcheck: result.outputs.push_back(run_selfcheck(config, root, result.passed)); break;
    }

    const double duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json manifest;
    manifest["config"] = to_json(config);
    manifest["seed"] = config.seed;
    manifest["version"] = version_string();
    manifest["started_at"] = utc_timestamp(started);
    manifest["duration_s"] = duration;
    std::vector<std::string> outputs;
    for (const auto& p : result.outputs) {
        outputs.push_back(p.string());
    }
    manifest["outputs"] = outputs;

    const auto path = config.out_dir / "manifest.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IOError("cannot open " + path.string() + " for writing");
    }
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw IOError("write to " + path.string() + " failed");
    }
    return result;
}

}  // namespace stein
