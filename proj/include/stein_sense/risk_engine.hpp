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
#include <string>
#include <string_view>
#include <vector>

#include "stein_sense/estimators.hpp"
#include "stein_sense/gauss_core.hpp"
#include "stein_sense/sensing_models.hpp"

namespace stein {

enum class RiskMethod { Exact, SemiAnalytic, MonteCarlo };

std::string_view to_string(RiskMethod m);

/// Squared-error risk E|estimate - theta|^2 with its Monte-Carlo standard
/// error (zero exactly when the value is closed-form).
struct RiskEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t reps = 1;
    RiskMethod method = RiskMethod::Exact;
};

/// A derived quantity with a first-order propagated standard error.
struct Ratio {
    double value = 0.0;
    double std_error = 0.0;
};

/// AD(1, 2) curve over resource counts. ad_values[i] is R(second)/R(first)
/// at n_values[i].
struct AdvantageCurve {
    std::vector<int> n_values;
    std::vector<double> ad_values;
    std::vector<std::string> labels;
};

/// Tr(gamma): the MLE is unbiased with covariance gamma.
RiskEstimate risk_mle_exact(const SPDMatrix& gamma);

/// Mean of |estimate(Z) - theta|^2 over Z ~ N(point.loc, point.gamma_n);
/// the estimator uses point.gamma_n as its data covariance.
RiskEstimate risk_mc(const EstimatorKind& kind, const ModelPoint& point, std::uint64_t reps,
                     const SeededRng& rng);

/// Tr(G) - (n-2)^2 E[1 / ((Z-nu)^T G^-2 (Z-nu))], Z ~ N(theta, G), with
/// Monte Carlo only in the expectation. An empty `nu` means the origin.
RiskEstimate risk_js_semianalytic(const Vector& theta, const SPDMatrix& gamma, const Vector& nu,
                                  std::uint64_t reps, const SeededRng& rng);

/// Tr(G) - (n-3)^2 E[1 / ((Z-Z_m)^T G^-2 (Z-Z_m))], Z ~ N(theta, G).
RiskEstimate risk_mjs_semianalytic(const Vector& theta, const SPDMatrix& gamma,
                                   std::uint64_t reps, const SeededRng& rng);

/// AD = r2 / r1. Throws DivisionByZero when r1 is zero.
Ratio advantage(const RiskEstimate& r1, const RiskEstimate& r2);

/// Ratio of two ratios, a / b, with first-order error propagation.
Ratio ratio_of(const Ratio& a, const Ratio& b);

/// Bayes risk by joint simulation: theta ~ N(prior), Z ~ N(theta, gamma).
RiskEstimate bayes_risk_mc(const EstimatorKind& kind, const GaussianPrior& prior,
                           const SPDMatrix& gamma, std::uint64_t reps, const SeededRng& rng);

/// Closed-form Bayes risks:
///   MLE     Tr(G)
///   Bayes   Tr(G) - Tr[G (G + X)^-1 G]       (estimator matched to `prior`)
///   NuJS    Tr(G) - (n-2)^2 E[1 / ((Y-nu)^T G^-2 (Y-nu))]
///   MeanJS  Tr(G) - (n-3)^2 E[1 / ((Y-Y_m)^T G^-2 (Y-Y_m))]
/// with Y ~ N(theta0, G + X) sampled for the two James-Stein rows.
RiskEstimate bayes_risk_table(const EstimatorKind& kind, const SPDMatrix& gamma,
                              const GaussianPrior& prior, std::uint64_t reps, const SeededRng& rng);

/// Least-squares slope of log(1 - ad) against log N. Needs >= 5 points.
/// Throws NonPositiveGap if any 1 - ad <= 0.
double scaling_exponent(const AdvantageCurve& curve);

/// Outcome of a strict inequality a < b tested against Monte-Carlo noise.
enum class Ordering { Holds, Unresolved, Violated };

std::string_view to_string(Ordering o);

/// Holds if b - a >= sigmas * se, Violated if a - b >= sigmas * se,
/// otherwise Unresolved.
Ordering compare_less(double a, double b, double se, double sigmas = 4.0);

}  // namespace stein
