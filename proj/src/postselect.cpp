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

#include "stein_sense/postselect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stein_sense/errors.hpp"
#include "stein_sense/estimators.hpp"
#include "stein_sense/replicate.hpp"

namespace stein {

namespace {

void require_transmission(double t) {
    if (!(t > 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "transmission t must lie in (0, 1], got " << t;
        throw InvalidArgument(os.str());
    }
}

void require_width(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw InvalidArgument("probe width B must be positive");
    }
}

void require_same_dim(Index a, Index b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(a) +
                                " and " + std::to_string(b) + " differ");
    }
}

// 1 + (t^2 - 1) e^{-s}, rewritten to avoid cancellation when s and t are small.
double pass_norm(double delta_sq, double t, double width) {
    const double s = delta_sq / width;
    return -std::expm1(-s) + t * t * std::exp(-s);
}

// log of the N(mu, B/4 I) density at x.
double log_phi(const Vector& x, const Vector& mu, double width) {
    const double n = static_cast<double>(x.size());
    return 0.5 * n * std::log(2.0 / (std::numbers::pi * width)) - 2.0 * (x - mu).squaredNorm() / width;
}

// f(x) / (M g(x)) = (a - b)^2 / (a^2 + b^2) with a, b the two amplitude
// terms; evaluated through r = b / a in log space.
double acceptance_ratio(const Vector& x, const Vector& theta, const Vector& theta0, double t,
                        double width) {
    if (t == 1.0) {
        return 1.0;
    }
    const double delta_sq = (theta - theta0).squaredNorm();
    const double log_r = std::log1p(-t) - 0.5 * delta_sq / width -
                         ((x - theta0).squaredNorm() - (x - theta).squaredNorm()) / width;
    if (log_r <= 0.0) {
        const double r = std::exp(log_r);
        return (1.0 - r) * (1.0 - r) / (1.0 + r * r);
    }
    const double s = std::exp(-log_r);
    return (s - 1.0) * (s - 1.0) / (s * s + 1.0);
}

}  // namespace

ProbeModel::ProbeModel(Vector theta, double width) : theta_(std::move(theta)), width_(width) {
    require_width(width_);
    if (theta_.size() < 4) {
        throw InvalidArgument("probe dimension must be >= 4, got " + std::to_string(theta_.size()));
    }
}

double ProbeModel::normalization() const { return std::sqrt(2.0 / (std::numbers::pi * width_)); }

double overlap(const Vector& theta, const Vector& theta0, double width) {
    require_width(width);
    require_same_dim(theta.size(), theta0.size(), "overlap");
    return std::exp(-(theta - theta0).squaredNorm() / (2.0 * width));
}

double pass_probability(const Vector& delta, double t, double width) {
    require_transmission(t);
    require_width(width);
    return pass_norm(delta.squaredNorm(), t, width);
}

double postselected_pdf(const Vector& x, const Vector& theta, const Vector& theta0, double t,
                        double width) {
    require_transmission(t);
    require_width(width);
    require_same_dim(x.size(), theta.size(), "postselected_pdf(x, theta)");
    require_same_dim(theta.size(), theta0.size(), "postselected_pdf(theta, theta0)");
    const double delta_sq = (theta - theta0).squaredNorm();
    const double n = static_cast<double>(x.size());
    const double a = std::exp(-(x - theta).squaredNorm() / width);
    const double b = (1.0 - t) * std::exp(-0.5 * delta_sq / width - (x - theta0).squaredNorm() / width);
    const double cn = std::pow(2.0 / (std::numbers::pi * width), 0.5 * n);
    return cn * (a - b) * (a - b) / pass_norm(delta_sq, t, width);
}

double envelope_constant(const Vector& delta, double t, double width) {
    require_transmission(t);
    require_width(width);
    const double delta_sq = delta.squaredNorm();
    const double e = std::exp(-delta_sq / width);
    return (1.0 + (1.0 - t) * (1.0 - t) * e) / pass_norm(delta_sq, t, width);
}

double mixture_weight(const Vector& delta, double t, double width) {
    require_transmission(t);
    require_width(width);
    const double e = std::exp(-delta.squaredNorm() / width);
    return 1.0 / (1.0 + (1.0 - t) * (1.0 - t) * e);
}

double proposal_pdf(const Vector& x, const Vector& theta, const Vector& theta0, double t,
                    double width) {
    require_same_dim(x.size(), theta.size(), "proposal_pdf(x, theta)");
    require_same_dim(theta.size(), theta0.size(), "proposal_pdf(theta, theta0)");
    const double p = mixture_weight(theta - theta0, t, width);
    return p * std::exp(log_phi(x, theta, width)) + (1.0 - p) * std::exp(log_phi(x, theta0, width));
}

PostselectedDraw sample_postselected(const Vector& theta, const Vector& theta0, double t,
                                     double width, SeededRng& rng, std::uint64_t max_attempts) {
    require_transmission(t);
    require_width(width);
    require_same_dim(theta.size(), theta0.size(), "sample_postselected");
    if (max_attempts < 1) {
        throw InvalidArgument("max_attempts must be >= 1");
    }
    const double p = mixture_weight(theta - theta0, t, width);
    const double sd = std::sqrt(width / 4.0);
    for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        const Vector& centre = rng.uniform() < p ? theta : theta0;
        Vector x = centre + sd * rng.normal_vector(theta.size());
        if (rng.uniform() <= acceptance_ratio(x, theta, theta0, t, width)) {
            return PostselectedDraw{std::move(x), attempt};
        }
    }
    std::ostringstream os;
    os << "rejection sampler exceeded " << max_attempts << " attempts (t = " << t
       << ", |delta| = " << (theta - theta0).norm() << ")";
    throw MaxAttemptsExceeded(os.str());
}

StrategyTrace run_iterative_strategy(const ProbeModel& probe, int measurements,
                                     StrategyEstimator estimator, SeededRng& rng,
                                     const StrategyOptions& options) {
    if (measurements < 1) {
        throw InvalidArgument("strategy needs at least one measurement");
    }
    if (!(options.t_min > 0.0 && options.t_min <= 1.0)) {
        throw InvalidArgument("t_min must lie in (0, 1]");
    }
    const Index n = probe.dim();
    const double b = probe.width();
    const double spread_dof =
        options.spread == SpreadMeasure::PooledPerComponent ? static_cast<double>(n) : 1.0;

    FilterState state{Vector::Zero(n), 1.0, {}, 0};
    state.estimates.reserve(static_cast<std::size_t>(measurements));

    // Welford accumulators over the per-measurement estimates.
    Vector mean = Vector::Zero(n);
    double sum_sq_dev = 0.0;

    StrategyTrace trace;
    trace.records.reserve(static_cast<std::size_t>(measurements));
    for (int k = 1; k <= measurements; ++k) {
        const double t = state.t;
        PostselectedDraw draw =
            sample_postselected(probe.theta(), state.theta0, t, b, rng, options.max_attempts);
        const Vector y = state.theta0 + t * (draw.x - state.theta0);
        const SPDMatrix cov = SPDMatrix::identity(n, t * t * b / 4.0);
        Vector est = estimator == StrategyEstimator::Mle ? y : estimate_mjs(y, cov);

        state.k = k;
        const Vector d = est - mean;
        mean += d / static_cast<double>(k);
        sum_sq_dev += d.dot(est - mean);
        state.estimates.push_back(std::move(est));

        TraceRecord rec;
        rec.k = k;
        rec.t = t;
        rec.theta_bar = mean;
        rec.risk = (mean - probe.theta()).squaredNorm();
        rec.attempts = draw.attempts;
        if (k >= 2) {
            const double sigma = std::sqrt(std::max(0.0, sum_sq_dev) / (spread_dof * (k - 1)));
            const double delta_hat = sigma / std::sqrt(static_cast<double>(k));
            rec.delta_hat = delta_hat;
            if (options.adaptive && delta_hat < 0.3 * state.t) {
                state.t = std::max(3.0 * delta_hat, options.t_min);
                state.theta0 = mean;
            }
        }
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

double isotropy(const Vector& theta) {
    if (theta.size() == 0) {
        return 0.0;
    }
    return (theta.array() - theta.mean()).square().sum();
}

std::vector<PadPoint> pad_curve(const std::vector<int>& n_values, const ProbeModel& probe,
                                std::uint64_t reps, const SeededRng& rng,
                                const StrategyOptions& options, std::uint64_t baseline_reps) {
    if (n_values.empty()) {
        throw InvalidArgument("pad_curve: empty N grid");
    }
    if (reps < 100) {
        throw InvalidArgument("PAD needs reps >= 100");
    }
    for (int n : n_values) {
        if (n < 1) {
            throw InvalidArgument("pad_curve: N must be >= 1");
        }
    }
    const int n_max = *std::max_element(n_values.begin(), n_values.end());
    const std::size_t points = n_values.size();

    // Channels: [pMLE at each N..., pmJS at each N...].
    const SeededRng strategy_rng = rng_fork(rng, 0);
    const Moments post = replicate(reps, 2 * points, strategy_rng, [&](SeededRng& r, std::span<double> out) {
        SeededRng mle_rng = rng_fork(r, 0);
        SeededRng mjs_rng = rng_fork(r, 1);
        const StrategyTrace mle = run_iterative_strategy(probe, n_max, StrategyEstimator::Mle, mle_rng, options);
        const StrategyTrace mjs = run_iterative_strategy(probe, n_max, StrategyEstimator::MeanJS, mjs_rng, options);
        for (std::size_t i = 0; i < points; ++i) {
            const auto k = static_cast<std::size_t>(n_values[i] - 1);
            out[i] = mle.records[k].risk;
            out[points + i] = mjs.records[k].risk;
        }
    });

    std::vector<PadPoint> result;
    result.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        PadPoint p;
        p.n = n_values[i];
        p.risk_pmle = RiskEstimate{post.mean(i), post.std_error(i), post.count(), RiskMethod::MonteCarlo};
        p.risk_pmjs = RiskEstimate{post.mean(points + i), post.std_error(points + i), post.count(),
                                   RiskMethod::MonteCarlo};
        const SPDMatrix gamma = SPDMatrix::identity(probe.dim(), probe.position_variance() / p.n);
        p.risk_mle = risk_mle_exact(gamma);
        p.risk_mjs = risk_mjs_semianalytic(probe.theta(), gamma, baseline_reps,
                                           rng_fork(rng, 1 + static_cast<std::uint64_t>(p.n)));
        p.ad_post = advantage(p.risk_pmjs, p.risk_pmle);
        p.ad_plain = advantage(p.risk_mjs, p.risk_mle);
        p.pad = ratio_of(p.ad_post, p.ad_plain);
        result.push_back(p);
    }
    return result;
}

PadPoint pad(int n, const ProbeModel& probe, std::uint64_t reps, const SeededRng& rng,
             const StrategyOptions& options, std::uint64_t baseline_reps) {
    return pad_curve({n}, probe, reps, rng, options, baseline_reps).front();
}

}  // namespace stein
