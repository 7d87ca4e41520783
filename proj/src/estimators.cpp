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

#include "stein_sense/estimators.hpp"

#include <sstream>

#include "stein_sense/errors.hpp"

namespace stein {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_same_dim(Index a, Index b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimensions " << a << " and " << b << " differ";
        throw DimensionMismatch(os.str());
    }
}

void require_min_dim(Index n, Index min, const char* what) {
    if (n < min) {
        std::ostringstream os;
        os << what << " needs dimension >= " << min << ", got " << n;
        throw DimensionTooSmall(os.str());
    }
}

// z - k S^{-1} d / |S^{-1} d|^2 with d = z - target.
Vector shrink(const Vector& z, const Vector& d, const SPDMatrix& cov, double k) {
    const Vector w = cov.solve(d);
    const double q = w.squaredNorm();
    if (q < kDegenerateShrinkage) {
        return z;
    }
    return z - (k / q) * w;
}

Vector resolve_nu(const Vector& nu, Index n) {
    return nu.size() == 0 ? Vector::Zero(n) : nu;
}

}  // namespace

std::string describe(const EstimatorKind& kind) {
    return std::visit(overloaded{[](const Mle&) { return std::string("MLE"); },
                                 [](const NuJSConfig&) { return std::string("NuJS"); },
                                 [](const MeanJS&) { return std::string("MeanJS"); },
                                 [](const Bayes&) { return std::string("Bayes"); }},
                      kind);
}

void check_estimator_dim(const EstimatorKind& kind, Index n) {
    std::visit(overloaded{[](const Mle&) {},
                          [n](const NuJSConfig& c) {
                              require_min_dim(n, 3, "James-Stein (fixed target)");
                              if (c.nu.size() != 0) {
                                  require_same_dim(c.nu.size(), n, "shrinkage target");
                              }
                          },
                          [n](const MeanJS&) { require_min_dim(n, 4, "James-Stein (mean target)"); },
                          [n](const Bayes& b) {
                              require_same_dim(b.prior.theta0.size(), n, "prior mean");
                              require_same_dim(b.prior.xi.dim(), n, "prior covariance");
                          }},
               kind);
}

Vector estimate_mle(const Vector& z) { return z; }

Vector estimate_nu_js(const Vector& z, const SPDMatrix& cov, const Vector& nu) {
    require_min_dim(z.size(), 3, "James-Stein (fixed target)");
    require_same_dim(z.size(), cov.dim(), "estimate_nu_js");
    require_same_dim(z.size(), nu.size(), "estimate_nu_js");
    return shrink(z, z - nu, cov, static_cast<double>(z.size() - 2));
}

Vector mean_vector(const Vector& z) {
    if (z.size() == 0) {
        return z;
    }
    return Vector::Constant(z.size(), z.mean());
}

Vector estimate_mjs(const Vector& z, const SPDMatrix& cov) {
    require_min_dim(z.size(), 4, "James-Stein (mean target)");
    require_same_dim(z.size(), cov.dim(), "estimate_mjs");
    return shrink(z, z - mean_vector(z), cov, static_cast<double>(z.size() - 3));
}

Vector estimate_bayes(const Vector& z, const SPDMatrix& gamma, const GaussianPrior& prior) {
    require_same_dim(z.size(), gamma.dim(), "estimate_bayes");
    require_same_dim(z.size(), prior.theta0.size(), "estimate_bayes");
    require_same_dim(z.size(), prior.xi.dim(), "estimate_bayes");
    const SPDMatrix total = gamma + prior.xi;
    return prior.theta0 + prior.xi.matrix() * total.solve(Vector(z - prior.theta0));
}

BoundEstimator::BoundEstimator(EstimatorKind kind, SPDMatrix cov)
    : kind_(std::move(kind)), cov_(std::move(cov)) {
    check_estimator_dim(kind_, cov_.dim());
    if (const auto* c = std::get_if<NuJSConfig>(&kind_)) {
        nu_ = resolve_nu(c->nu, cov_.dim());
    } else if (const auto* b = std::get_if<Bayes>(&kind_)) {
        gamma_plus_xi_ = cov_ + b->prior.xi;
    }
}

Vector BoundEstimator::operator()(const Vector& z) const {
    require_same_dim(z.size(), cov_.dim(), "estimator input");
    return std::visit(
        overloaded{[&](const Mle&) { return z; },
                   [&](const NuJSConfig&) {
                       return shrink(z, z - nu_, cov_, static_cast<double>(z.size() - 2));
                   },
                   [&](const MeanJS&) {
                       return shrink(z, z - mean_vector(z), cov_, static_cast<double>(z.size() - 3));
                   },
                   [&](const Bayes& b) {
                       const Vector r = z - b.prior.theta0;
                       return Vector(b.prior.theta0 + b.prior.xi.matrix() * gamma_plus_xi_->solve(r));
                   }},
        kind_);
}

}  // namespace stein
