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
#include <optional>
#include <vector>

#include "stein_sense/gauss_core.hpp"
#include "stein_sense/risk_engine.hpp"

namespace stein {

/// Position-encoded Gaussian probe |psi_theta> with amplitude
/// C^{n/2} exp(-|x - theta|^2 / B). Its position law is N(theta, B/4 I).
class ProbeModel {
public:
    /// Throws InvalidArgument unless B > 0 and dim(theta) >= 4.
    ProbeModel(Vector theta, double width);

    const Vector& theta() const { return theta_; }
    double width() const { return width_; }
    Index dim() const { return theta_.size(); }
    /// C = sqrt(2 / (pi B)).
    double normalization() const;
    /// Per-component variance of an unfiltered position measurement, B/4.
    double position_variance() const { return width_ / 4.0; }

private:
    Vector theta_;
    double width_;
};

/// <psi_theta0 | psi_theta> = exp(-|theta - theta0|^2 / 2B).
double overlap(const Vector& theta, const Vector& theta0, double width);

/// |K psi_theta|^2 = 1 + (t^2 - 1) exp(-|delta|^2 / B).
double pass_probability(const Vector& delta, double t, double width);

/// Small-displacement approximation of pass_probability: t^2.
inline double pass_probability_small_delta(double t) { return t * t; }

/// Exact position density of a probe that passed the filter centred on
/// theta0 with transmission t.
double postselected_pdf(const Vector& x, const Vector& theta, const Vector& theta0, double t,
                        double width);

/// Rejection envelope: f <= M g with
///   M = (1 + (1-t)^2 e) / (1 + (t^2-1) e),   e = exp(-|delta|^2 / B)
double envelope_constant(const Vector& delta, double t, double width);

/// Weight p of N(theta, B/4 I) in the proposal
/// g = p N(theta, B/4 I) + (1-p) N(theta0, B/4 I),  p = 1 / (1 + (1-t)^2 e).
double mixture_weight(const Vector& delta, double t, double width);

/// Density of the proposal mixture g.
double proposal_pdf(const Vector& x, const Vector& theta, const Vector& theta0, double t,
                    double width);

inline constexpr std::uint64_t kDefaultMaxAttempts = 1'000'000;

struct PostselectedDraw {
    Vector x;
    std::uint64_t attempts = 0;
};

/// Exact draw from postselected_pdf by rejection from the mixture
/// proposal. Acceptance probability per attempt is 1 / envelope_constant.
/// Throws MaxAttemptsExceeded after `max_attempts` rejections.
PostselectedDraw sample_postselected(const Vector& theta, const Vector& theta0, double t,
                                     double width, SeededRng& rng,
                                     std::uint64_t max_attempts = kDefaultMaxAttempts);

enum class StrategyEstimator { Mle, MeanJS };

/// How the spread sigma_k of the per-measurement estimates is measured.
enum class SpreadMeasure {
    /// sqrt(sum_j |est_j - mean|^2 / (k-1)): sigma_k / sqrt(k) then tracks
    /// |delta|, the quantity the filter must stay small against.
    Total,
    /// sqrt(sum_j |est_j - mean|^2 / (n (k-1))): per-component pooled.
    PooledPerComponent,
};

struct StrategyOptions {
    /// false pins t at 1 for the whole run (no postselection).
    bool adaptive = true;
    double t_min = 1e-4;
    std::uint64_t max_attempts = kDefaultMaxAttempts;
    SpreadMeasure spread = SpreadMeasure::Total;
};

/// State carried between measurements of the adaptive strategy.
struct FilterState {
    Vector theta0;
    double t = 1.0;
    std::vector<Vector> estimates;
    int k = 0;
};

struct TraceRecord {
    int k = 0;
    /// Transmission used for measurement k.
    double t = 1.0;
    Vector theta_bar;
    /// Estimated error of theta_bar; undefined for k = 1.
    std::optional<double> delta_hat;
    /// |theta_bar - theta|^2.
    double risk = 0.0;
    /// Probes sent through the filter for this measurement.
    std::uint64_t attempts = 0;
};

struct StrategyTrace {
    std::vector<TraceRecord> records;
};

/// Adaptive postselection run of `measurements` detector clicks:
/// start from theta0 = 0, t = 1; for each k draw X_k through the filter,
/// rescale Y_k = theta0 + t (X_k - theta0), estimate from Y_k alone with
/// covariance t^2 (B/4) I, average all per-measurement estimates into
/// theta_bar_k, and once sigma_k / sqrt(k) < 0.3 t (k >= 2) set
/// t <- 3 sigma_k / sqrt(k) (floored at t_min) and theta0 <- theta_bar_k.
/// sigma_k is the sample spread of the estimates (see SpreadMeasure).
StrategyTrace run_iterative_strategy(const ProbeModel& probe, int measurements,
                                     StrategyEstimator estimator, SeededRng& rng,
                                     const StrategyOptions& options = {});

/// Sum of squared deviations of the components from their mean.
double isotropy(const Vector& theta);

/// Postselected and plain risks at one N, with both advantages and their
/// ratio PAD = AD(pmJS, pMLE) / AD(mJS, MLE).
struct PadPoint {
    int n = 0;
    RiskEstimate risk_pmle;
    RiskEstimate risk_pmjs;
    RiskEstimate risk_mle;
    RiskEstimate risk_mjs;
    Ratio ad_post;
    Ratio ad_plain;
    Ratio pad;
};

/// Runs `reps` independent strategy pairs (MLE and mean-JS variants) up to
/// max(n_values) and averages R_N at each requested N. The plain baseline
/// applies the estimators to the sample mean of N unfiltered probes,
/// N(theta, B/(4N) I), through the risk engine.
std::vector<PadPoint> pad_curve(const std::vector<int>& n_values, const ProbeModel& probe,
                                std::uint64_t reps, const SeededRng& rng,
                                const StrategyOptions& options = {},
                                std::uint64_t baseline_reps = 100'000);

/// Single-N convenience wrapper around pad_curve. Needs reps >= 100.
PadPoint pad(int n, const ProbeModel& probe, std::uint64_t reps, const SeededRng& rng,
             const StrategyOptions& options = {}, std::uint64_t baseline_reps = 100'000);

}  // namespace stein
