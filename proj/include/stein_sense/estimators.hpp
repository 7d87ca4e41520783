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

#include <optional>
#include <string>
#include <variant>

#include "stein_sense/gauss_core.hpp"

namespace stein {

/// Below this value of the shrinkage denominator the James-Stein estimators
/// return their input unchanged (z == target is a measure-zero event).
inline constexpr double kDegenerateShrinkage = 1e-30;

struct Mle {};

/// Fixed-target James-Stein, shrinking towards `nu`. An empty `nu` means
/// the origin of whatever dimension the data has.
struct NuJSConfig {
    Vector nu;
};

/// James-Stein shrinking towards the component mean of the data.
struct MeanJS {};

struct GaussianPrior {
    Vector theta0;
    SPDMatrix xi;
};

/// Posterior-mean estimator under a Gaussian prior.
struct Bayes {
    GaussianPrior prior;
};

using EstimatorKind = std::variant<Mle, NuJSConfig, MeanJS, Bayes>;

std::string describe(const EstimatorKind& kind);

/// Throws DimensionTooSmall or DimensionMismatch if `kind` cannot be used
/// on n-dimensional data.
void check_estimator_dim(const EstimatorKind& kind, Index n);

Vector estimate_mle(const Vector& z);

/// z - (n-2) S^{-1}(z-nu) / [(z-nu)^T S^{-2} (z-nu)]. Plain form, no
/// positive-part clipping.
Vector estimate_nu_js(const Vector& z, const SPDMatrix& cov, const Vector& nu);

/// Constant vector holding the arithmetic mean of z.
Vector mean_vector(const Vector& z);

/// z - (n-3) S^{-1}(z-z_m) / [(z-z_m)^T S^{-2} (z-z_m)].
Vector estimate_mjs(const Vector& z, const SPDMatrix& cov);

/// (G^{-1} + X^{-1})^{-1} (G^{-1} z + X^{-1} theta0), evaluated as
/// theta0 + X (G + X)^{-1} (z - theta0).
Vector estimate_bayes(const Vector& z, const SPDMatrix& gamma, const GaussianPrior& prior);

/// An estimator bound to a data covariance, with any factorizations it
/// needs prepared once. Cheap to call repeatedly inside MC loops.
class BoundEstimator {
public:
    BoundEstimator(EstimatorKind kind, SPDMatrix cov);

    Vector operator()(const Vector& z) const;
    const EstimatorKind& kind() const { return kind_; }
    const SPDMatrix& cov() const { return cov_; }

private:
    EstimatorKind kind_;
    SPDMatrix cov_;
    Vector nu_;
    std::optional<SPDMatrix> gamma_plus_xi_;
};

}  // namespace stein
