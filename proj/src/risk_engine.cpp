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

#include "stein_sense/risk_engine.hpp"

#include <cmath>
#include <functional>

#include "stein_sense/errors.hpp"
#include "stein_sense/replicate.hpp"

namespace stein {

namespace {

void require_reps(std::uint64_t reps) {
    if (reps < 2) {
        throw InvalidArgument("Monte-Carlo risk needs reps >= 2");
    }
}

RiskEstimate from_moments(const Moments& m, RiskMethod method, double scale = 1.0,
                          double offset = 0.0) {
    return RiskEstimate{offset + scale * m.mean(), std::abs(scale) * m.std_error(), m.count(), method};
}

// Mean of 1 / |metric^-1 (Z - centre(Z))|^2 with Z ~ N(mean, sample_cov).
Moments inverse_quad_moments(const Vector& mean, const SPDMatrix& sample_cov,
                             const SPDMatrix& metric,
                             const std::function<Vector(const Vector&)>& centre,
                             std::uint64_t reps, const SeededRng& rng) {
    return replicate(reps, 1, rng, [&](SeededRng& r, std::span<double> out) {
        const Vector z = mvn_sample(mean, sample_cov, r);
        const double q = quad_form_inv2(z - centre(z), metric);
        out[0] = q < kDegenerateShrinkage ? 0.0 : 1.0 / q;
    });
}

}  // namespace

std::string_view to_string(RiskMethod m) {
    switch (m) {
        case RiskMethod::Exact: return "exact";
        case RiskMethod::SemiAnalytic: return "semi_analytic";
        case RiskMethod::MonteCarlo: return "monte_carlo";
    }
    return "unknown";
}

std::string_view to_string(Ordering o) {
    switch (o) {
        case Ordering::Holds: return "holds";
        case Ordering::Unresolved: return "unresolved";
        case Ordering::Violated: return "violated";
    }
    return "unknown";
}

RiskEstimate risk_mle_exact(const SPDMatrix& gamma) {
    return RiskEstimate{gamma.trace(), 0.0, 1, RiskMethod::Exact};
}

RiskEstimate risk_mc(const EstimatorKind& kind, const ModelPoint& point, std::uint64_t reps,
                     const SeededRng& rng) {
    require_reps(reps);
    const BoundEstimator estimator(kind, point.gamma_n);
    const Moments m = replicate(reps, 1, rng, [&](SeededRng& r, std::span<double> out) {
        const Vector z = mvn_sample(point.loc, point.gamma_n, r);
        out[0] = (estimator(z) - point.theta).squaredNorm();
    });
    return from_moments(m, RiskMethod::MonteCarlo);
}

RiskEstimate risk_js_semianalytic(const Vector& theta, const SPDMatrix& gamma, const Vector& nu,
                                  std::uint64_t reps, const SeededRng& rng) {
    require_reps(reps);
    const Index n = gamma.dim();
    check_estimator_dim(NuJSConfig{nu}, n);
    if (theta.size() != n) {
        throw DimensionMismatch("risk_js_semianalytic: theta and gamma dimensions differ");
    }
    const Vector target = nu.size() == 0 ? Vector::Zero(n) : nu;
    const Moments m = inverse_quad_moments(
        theta, gamma, gamma, [&](const Vector&) { return target; }, reps, rng);
    const double k = static_cast<double>(n - 2);
    return from_moments(m, RiskMethod::SemiAnalytic, -k * k, gamma.trace());
}

RiskEstimate risk_mjs_semianalytic(const Vector& theta, const SPDMatrix& gamma,
                                   std::uint64_t reps, const SeededRng& rng) {
    require_reps(reps);
    const Index n = gamma.dim();
    check_estimator_dim(MeanJS{}, n);
    if (theta.size() != n) {
        throw DimensionMismatch("risk_mjs_semianalytic: theta and gamma dimensions differ");
    }
    const Moments m = inverse_quad_moments(theta, gamma, gamma, mean_vector, reps, rng);
    const double k = static_cast<double>(n - 3);
    return from_moments(m, RiskMethod::SemiAnalytic, -k * k, gamma.trace());
}

Ratio advantage(const RiskEstimate& r1, const RiskEstimate& r2) {
    if (r1.value == 0.0) {
        throw DivisionByZero("advantage: reference risk is zero");
    }
    const double ratio = r2.value / r1.value;
    if (r2.value == 0.0) {
        return Ratio{0.0, r2.std_error / r1.value};
    }
    const double rel = std::hypot(r1.std_error / r1.value, r2.std_error / r2.value);
    return Ratio{ratio, std::abs(ratio) * rel};
}

Ratio ratio_of(const Ratio& a, const Ratio& b) {
    if (b.value == 0.0) {
        throw DivisionByZero("ratio_of: denominator is zero");
    }
    const double ratio = a.value / b.value;
    if (a.value == 0.0) {
        return Ratio{0.0, a.std_error / std::abs(b.value)};
    }
    const double rel = std::hypot(a.std_error / a.value, b.std_error / b.value);
    return Ratio{ratio, std::abs(ratio) * rel};
}

RiskEstimate bayes_risk_mc(const EstimatorKind& kind, const GaussianPrior& prior,
                           const SPDMatrix& gamma, std::uint64_t reps, const SeededRng& rng) {
    require_reps(reps);
    if (prior.theta0.size() != gamma.dim() || prior.xi.dim() != gamma.dim()) {
        throw DimensionMismatch("bayes_risk_mc: prior and gamma dimensions differ");
    }
    const BoundEstimator estimator(kind, gamma);
    const Moments m = replicate(reps, 1, rng, [&](SeededRng& r, std::span<double> out) {
        const Vector theta = mvn_sample(prior.theta0, prior.xi, r);
        const Vector z = mvn_sample(theta, gamma, r);
        out[0] = (estimator(z) - theta).squaredNorm();
    });
    return from_moments(m, RiskMethod::MonteCarlo);
}

RiskEstimate bayes_risk_table(const EstimatorKind& kind, const SPDMatrix& gamma,
                              const GaussianPrior& prior, std::uint64_t reps, const SeededRng& rng) {
    const Index n = gamma.dim();
    if (prior.theta0.size() != n || prior.xi.dim() != n) {
        throw DimensionMismatch("bayes_risk_table: prior and gamma dimensions differ");
    }
    check_estimator_dim(kind, n);
    const double tr = gamma.trace();

    if (std::holds_alternative<Mle>(kind)) {
        return RiskEstimate{tr, 0.0, 1, RiskMethod::Exact};
    }
    if (std::holds_alternative<Bayes>(kind)) {
        const SPDMatrix total = gamma + prior.xi;
        const double reduction = (gamma.matrix() * total.solve(gamma.matrix())).trace();
        return RiskEstimate{tr - reduction, 0.0, 1, RiskMethod::Exact};
    }

    require_reps(reps);
    const SPDMatrix marginal = gamma + prior.xi;
    if (const auto* js = std::get_if<NuJSConfig>(&kind)) {
        const Vector target = js->nu.size() == 0 ? Vector::Zero(n) : js->nu;
        const Moments m = inverse_quad_moments(
            prior.theta0, marginal, gamma, [&](const Vector&) { return target; }, reps, rng);
        const double k = static_cast<double>(n - 2);
        return from_moments(m, RiskMethod::SemiAnalytic, -k * k, tr);
    }
    const Moments m = inverse_quad_moments(prior.theta0, marginal, gamma, mean_vector, reps, rng);
    const double k = static_cast<double>(n - 3);
    return from_moments(m, RiskMethod::SemiAnalytic, -k * k, tr);
}

double scaling_exponent(const AdvantageCurve& curve) {
    const std::size_t count = curve.n_values.size();
    if (curve.ad_values.size() != count) {
        throw DimensionMismatch("scaling_exponent: n_values and ad_values lengths differ");
    }
    if (count < 5) {
        throw InvalidArgument("scaling_exponent needs at least 5 points");
    }
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double gap = 1.0 - curve.ad_values[i];
        if (!(gap > 0.0)) {
            throw NonPositiveGap("scaling_exponent: 1 - AD <= 0 at N = " +
                                 std::to_string(curve.n_values[i]));
        }
        if (curve.n_values[i] < 1) {
            throw InvalidArgument("scaling_exponent: N must be positive");
        }
        const double x = std::log(static_cast<double>(curve.n_values[i]));
        const double y = std::log(gap);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double c = static_cast<double>(count);
    const double denom = c * sxx - sx * sx;
    if (denom <= 0.0) {
        throw InvalidArgument("scaling_exponent: N values must not all be equal");
    }
    return (c * sxy - sx * sy) / denom;
}

Ordering compare_less(double a, double b, double se, double sigmas) {
    if (b > a && b - a >= sigmas * se) {
        return Ordering::Holds;
    }
    if (a > b && a - b >= sigmas * se) {
        return Ordering::Violated;
    }
    return Ordering::Unresolved;
}

}  // namespace stein
