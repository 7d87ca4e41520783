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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stein_sense/errors.hpp"
#include "stein_sense/experiments.hpp"

#ifndef STEIN_SENSE_VERSION
#define STEIN_SENSE_VERSION "unknown"
#endif

namespace stein {

namespace {

using nlohmann::json;

// Defaults for the fig1 and fig2 experiments.
const char* const kFig1Theta = "0.5,-0.2,0.3,0.1";
const char* const kFig1Cov = "4*I(4)";

Vector fig2_theta() { return Vector{{1.0, -2.0, 3.0, 1.5}} / 30.0; }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

[[noreturn]] void fail(std::string_view field, const std::string& what) {
    throw ConfigError(std::string(field) + ": " + what);
}

double parse_number(std::string_view text, std::string_view field) {
    const std::string_view t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
        fail(field, "'" + std::string(t) + "' is not a finite number");
    }
    return value;
}

// "I(n)" with the size parsed out; nullopt if `s` is not of that form.
std::optional<Index> identity_size(std::string_view s, std::string_view field) {
    s = trim(s);
    if (s.size() < 4 || s.substr(0, 2) != "I(" || s.back() != ')') {
        return std::nullopt;
    }
    const std::string_view inner = trim(s.substr(2, s.size() - 3));
    long long n = 0;
    const auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), n);
    if (inner.empty() || ec != std::errc() || ptr != inner.data() + inner.size() || n < 1) {
        fail(field, "identity size in '" + std::string(s) + "' must be a positive integer");
    }
    return static_cast<Index>(n);
}

// Matrix fields in a JSON file may be a spec string or an array of rows.
std::string matrix_text(const json& value, std::string_view field) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (!value.is_array() || value.empty()) {
        fail(field, "expected a matrix spec string or a non-empty array of rows");
    }
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_array()) {
            fail(field, "row " + std::to_string(i) + " is not an array");
        }
        if (i > 0) {
            os << ';';
        }
        for (std::size_t j = 0; j < value[i].size(); ++j) {
            if (!value[i][j].is_number()) {
                fail(field, "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is not a number");
            }
            os << (j > 0 ? "," : "") << value[i][j].get<double>();
        }
    }
    return os.str();
}

Vector json_vector(const json& value, std::string_view field) {
    if (value.is_string()) {
        return parse_vector(value.get<std::string>(), field);
    }
    if (!value.is_array() || value.empty()) {
        fail(field, "expected a non-empty array of numbers");
    }
    Vector v(static_cast<Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) {
            fail(field, "entry " + std::to_string(i) + " is not a number");
        }
        v(static_cast<Index>(i)) = value[i].get<double>();
    }
    return v;
}

template <typename T>
T json_number(const json& value, std::string_view field) {
    if constexpr (std::is_floating_point_v<T>) {
        if (!value.is_number()) {
            fail(field, "expected a number");
        }
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!value.is_number_unsigned()) {
            fail(field, "expected a non-negative integer");
        }
    } else {
        if (!value.is_number_integer()) {
            fail(field, "expected an integer");
        }
    }
    return value.get<T>();
}

// Line number of a byte offset, for JSON parse errors.
std::size_t line_of(const std::string& text, std::size_t byte) {
    const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
    return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IOError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        json doc = json::parse(text);
        if (!doc.is_object()) {
            throw ConfigError(path.string() + ":1: top level must be a JSON object");
        }
        // A manifest carries its config under "config".
        if (doc.contains("config") && doc["config"].is_object()) {
            return doc["config"];
        }
        return doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ":" + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
}

ExperimentConfig defaults(Experiment experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    switch (experiment) {
        case Experiment::Fig1:
            c.theta = parse_vector(kFig1Theta, "theta");
            c.sigma = kFig1Cov;
            c.delta = kFig1Cov;
            c.n_grid = NGrid{8, 512, 13, true};
            break;
        case Experiment::Fig2a:
        case Experiment::Fig2b:
            c.theta = fig2_theta();
            c.width = 1.0;
            c.n_grid = NGrid{5, 200, 40, false};
            c.reps = 2000;
            break;
        case Experiment::Risk:
        case Experiment::Bayes:
            c.theta = parse_vector(kFig1Theta, "theta");
            c.sigma = kFig1Cov;
            c.n_grid = NGrid{8, 512, 13, true};
            break;
        case Experiment::Selfcheck:
            c.theta = parse_vector(kFig1Theta, "theta");
            c.n_grid = NGrid{1, 1, 1, false};
            break;
    }
    return c;
}

void apply_file(ExperimentConfig& c, const json& doc) {
    static const std::set<std::string> known = {"experiment", "theta", "sigma", "delta", "xi",
                                                "B", "n_min", "n_max", "n_points", "n_spacing",
                                                "reps", "seed", "out", "threads"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown field '" + key + "'");
        }
    }
    if (doc.contains("experiment")) {
        const json& e = doc["experiment"];
        if (!e.is_string() || parse_experiment(e.get<std::string>()) != c.experiment) {
            throw ConfigError("experiment: does not match the requested experiment '" +
                              std::string(to_string(c.experiment)) + "'");
        }
    }
    if (doc.contains("theta")) {
        c.theta = json_vector(doc["theta"], "theta");
        // The default matrices belong to the default theta.
        c.sigma.reset();
        c.delta.reset();
    }
    auto matrix = [&](const char* key, std::optional<std::string>& slot) {
        if (doc.contains(key)) {
            slot = doc[key].is_null() ? std::nullopt : std::optional(matrix_text(doc[key], key));
        }
    };
    matrix("sigma", c.sigma);
    matrix("delta", c.delta);
    matrix("xi", c.xi);
    if (doc.contains("B")) c.width = json_number<double>(doc["B"], "B");
    if (doc.contains("n_min")) c.n_grid.min = json_number<int>(doc["n_min"], "n_min");
    if (doc.contains("n_max")) c.n_grid.max = json_number<int>(doc["n_max"], "n_max");
    if (doc.contains("n_points")) c.n_grid.points = json_number<int>(doc["n_points"], "n_points");
    if (doc.contains("n_spacing")) {
        const json& s = doc["n_spacing"];
        if (s == "log") {
            c.n_grid.log_spaced = true;
        } else if (s == "linear") {
            c.n_grid.log_spaced = false;
        } else {
            fail("n_spacing", "expected \"log\" or \"linear\"");
        }
    }
    if (doc.contains("reps")) c.reps = json_number<std::uint64_t>(doc["reps"], "reps");
    if (doc.contains("seed")) c.seed = json_number<std::uint64_t>(doc["seed"], "seed");
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) {
            fail("out", "expected a path string");
        }
        c.out_dir = doc["out"].get<std::string>();
    }
    if (doc.contains("threads")) c.threads = json_number<unsigned>(doc["threads"], "threads");
}

void apply_flags(ExperimentConfig& c, const ConfigOverrides& f) {
    if (f.theta) {
        c.theta = parse_vector(*f.theta, "theta");
        c.sigma.reset();
        c.delta.reset();
    }
    if (f.sigma) c.sigma = *f.sigma;
    if (f.delta) c.delta = *f.delta;
    if (f.xi) c.xi = *f.xi;
    if (f.width) c.width = *f.width;
    if (f.n_min) c.n_grid.min = *f.n_min;
    if (f.n_max) c.n_grid.max = *f.n_max;
    if (f.n_points) c.n_grid.points = *f.n_points;
    if (f.reps) c.reps = *f.reps;
    if (f.seed) c.seed = *f.seed;
    if (f.out_dir) c.out_dir = *f.out_dir;
    if (f.threads) c.threads = *f.threads;
}

void check_matrix(const std::optional<std::string>& spec, const char* field, Index dim, bool required,
                  Experiment e) {
    if (!spec) {
        if (required) {
            fail(field, "required for experiment " + std::string(to_string(e)));
        }
        return;
    }
    const SPDMatrix m = parse_spd(*spec, field);
    if (m.dim() != dim) {
        fail(field, "dimension " + std::to_string(m.dim()) + " does not match theta dimension " +
                        std::to_string(dim));
    }
}

}  // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::Fig1: return "fig1";
        case Experiment::Fig2a: return "fig2a";
        case Experiment::Fig2b: return "fig2b";
        case Experiment::Risk: return "risk";
        case Experiment::Bayes: return "bayes";
        case Experiment::Selfcheck: return "selfcheck";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name) {
    for (Experiment e : {Experiment::Fig1, Experiment::Fig2a, Experiment::Fig2b, Experiment::Risk,
                         Experiment::Bayes, Experiment::Selfcheck}) {
        if (to_string(e) == name) {
            return e;
        }
    }
    throw ConfigError("experiment: unknown experiment '" + std::string(name) +
                      "' (expected fig1, fig2a, fig2b, risk, bayes or selfcheck)");
}

std::vector<int> NGrid::values() const {
    std::vector<int> out;
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        const double x = log_spaced ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
                                    : min + f * (max - min);
        const int n = static_cast<int>(std::lround(x));
        if (out.empty() || out.back() != n) {
            out.push_back(n);
        }
    }
    return out;
}

Vector parse_vector(std::string_view text, std::string_view field) {
    const std::string_view t = trim(text);
    if (t.empty()) {
        fail(field, "empty vector");
    }
    const auto parts = split(t, ',');
    Vector v(static_cast<Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        v(static_cast<Index>(i)) = parse_number(parts[i], field);
    }
    return v;
}

SPDMatrix parse_spd(std::string_view spec, std::string_view field) {
    const std::string_view s = trim(spec);
    if (s.empty()) {
        fail(field, "empty matrix spec");
    }
    try {
        if (const auto n = identity_size(s, field)) {
            return SPDMatrix::identity(*n);
        }
        if (const auto star = s.find('*'); star != std::string_view::npos) {
            const auto n = identity_size(s.substr(star + 1), field);
            if (!n) {
                fail(field, "expected 'c*I(n)', got '" + std::string(s) + "'");
            }
            const double c = parse_number(s.substr(0, star), field);
            if (!(c > 0.0)) {
                fail(field, "scale in '" + std::string(s) + "' must be positive");
            }
            return SPDMatrix::identity(*n, c);
        }
        const auto rows = split(s, ';');
        const auto dim = static_cast<Index>(rows.size());
        Matrix m(dim, dim);
        for (Index i = 0; i < dim; ++i) {
            const auto entries = split(rows[static_cast<std::size_t>(i)], ',');
            if (static_cast<Index>(entries.size()) != dim) {
                fail(field, "row " + std::to_string(i) + " has " + std::to_string(entries.size()) +
                                " entries, expected " + std::to_string(dim));
            }
            for (Index j = 0; j < dim; ++j) {
                m(i, j) = parse_number(entries[static_cast<std::size_t>(j)], field);
            }
        }
        return SPDMatrix::validate(m);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(field, e.what());
    }
}

ExperimentConfig parse_config(Experiment experiment,
                              const std::optional<std::filesystem::path>& config_path,
                              const ConfigOverrides& flags) {
    ExperimentConfig c = defaults(experiment);
    if (config_path) {
        const json doc = load_json(*config_path);
        try {
            apply_file(c, doc);
        } catch (const ConfigError& e) {
            throw ConfigError(config_path->string() + ": " + e.what());
        }
    }
    apply_flags(c, flags);
    validate_config(c);
    return c;
}

void validate_config(const ExperimentConfig& c) {
    const Index n = c.theta.size();
    if (n < 1) {
        fail("theta", "must not be empty");
    }
    if (c.reps < 100) {
        fail("reps", "must be >= 100, got " + std::to_string(c.reps));
    }
    if (c.n_grid.min < 1) {
        fail("n_min", "must be >= 1");
    }
    if (c.n_grid.max < c.n_grid.min) {
        fail("n_max", "must be >= n_min");
    }
    if (c.n_grid.points < 1) {
        fail("n_points", "must be >= 1");
    }
    if (c.n_grid.points == 1 && c.n_grid.max != c.n_grid.min) {
        fail("n_points", "a single-point grid needs n_min == n_max");
    }
    const Experiment e = c.experiment;
    switch (e) {
        case Experiment::Fig1:
            if (n < 3) fail("theta", "James-Stein needs dimension >= 3");
            check_matrix(c.sigma, "sigma", n, true, e);
            check_matrix(c.delta, "delta", n, true, e);
            break;
        case Experiment::Fig2a:
        case Experiment::Fig2b:
            if (n < 4) fail("theta", "postselection experiments need dimension >= 4");
            if (!(c.width > 0.0) || !std::isfinite(c.width)) fail("B", "must be a positive number");
            break;
        case Experiment::Risk:
            if (n < 3) fail("theta", "James-Stein needs dimension >= 3");
            check_matrix(c.sigma, "sigma", n, true, e);
            check_matrix(c.delta, "delta", n, false, e);
            break;
        case Experiment::Bayes:
            if (n < 3) fail("theta", "James-Stein needs dimension >= 3");
            check_matrix(c.sigma, "sigma", n, true, e);
            check_matrix(c.delta, "delta", n, false, e);
            check_matrix(c.xi, "xi", n, true, e);
            break;
        case Experiment::Selfcheck:
            break;
    }
}

nlohmann::json to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["theta"] = std::vector<double>(c.theta.data(), c.theta.data() + c.theta.size());
    auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
    j["sigma"] = opt(c.sigma);
    j["delta"] = opt(c.delta);
    j["xi"] = opt(c.xi);
    j["B"] = c.width;
    j["n_min"] = c.n_grid.min;
    j["n_max"] = c.n_grid.max;
    j["n_points"] = c.n_grid.points;
    j["n_spacing"] = c.n_grid.log_spaced ? "log" : "linear";
    j["reps"] = c.reps;
    j["seed"] = c.seed;
    j["out"] = c.out_dir.string();
    j["threads"] = c.threads;
    return j;
}

std::string_view version_string() { return STEIN_SENSE_VERSION; }

}  // namespace stein
