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

#include "stein_sense/sensing_models.hpp"

#include <algorithm>

#include "stein_sense/errors.hpp"

namespace stein {

namespace {

void require_same_dim(Index a, Index b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(a) +
                                " and " + std::to_string(b) + " differ");
    }
}

}  // namespace

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::SeparateNoiseless: return "separate_noiseless";
        case Strategy::SequentialNoiseless: return "sequential_noiseless";
        case Strategy::SeparateNoisy: return "separate_noisy";
        case Strategy::SequentialNoisy: return "sequential_noisy";
    }
    return "unknown";
}

bool is_noisy(Strategy s) {
    return s == Strategy::SeparateNoisy || s == Strategy::SequentialNoisy;
}

ModelPoint model_distribution(Strategy strategy, const Vector& theta, const SPDMatrix& sigma,
                              const std::optional<SPDMatrix>& delta, int n_resources) {
    if (n_resources < 1) {
        throw InvalidArgument("resource count N must be >= 1, got " + std::to_string(n_resources));
    }
    require_same_dim(theta.size(), sigma.dim(), "model_distribution(theta, sigma)");
    if (is_noisy(strategy)) {
        if (!delta) {
            throw MissingNoiseMatrix(std::string("strategy ") + std::string(to_string(strategy)) +
                                     " needs a noise covariance delta");
        }
        require_same_dim(theta.size(), delta->dim(), "model_distribution(theta, delta)");
    } else if (delta) {
        throw InvalidArgument(std::string("strategy ") + std::string(to_string(strategy)) +
                              " is noiseless but a noise covariance was given");
    }

    const double n = static_cast<double>(n_resources);
    auto gamma = [&]() -> SPDMatrix {
        switch (strategy) {
            case Strategy::SeparateNoiseless: return sigma.scaled(1.0 / n);
            case Strategy::SequentialNoiseless: return sigma.scaled(1.0 / (n * n));
            case Strategy::SeparateNoisy: return (sigma + *delta).scaled(1.0 / n);
            case Strategy::SequentialNoisy: return sigma.scaled(1.0 / (n * n)) + delta->scaled(1.0 / n);
        }
        throw InvalidArgument("unknown strategy");
    }();
    return ModelPoint{theta, theta, std::move(gamma), n_resources};
}

GaussianState apply_noise_channel(const GaussianState& state, const Vector& theta,
                                  const SPDMatrix& delta) {
    require_same_dim(state.mean.size(), theta.size(), "apply_noise_channel(state, theta)");
    require_same_dim(state.cov.dim(), delta.dim(), "apply_noise_channel(state, delta)");
    require_same_dim(state.mean.size(), state.cov.dim(), "apply_noise_channel(state)");
    return GaussianState{state.mean + theta, state.cov + delta};
}

ModelPoint measurement_distribution(const SPDMatrix& a, const SPDMatrix& a_anc, const Vector& theta) {
    require_same_dim(a.dim(), a_anc.dim(), "measurement_distribution(A, A_anc)");
    require_same_dim(a.dim(), theta.size(), "measurement_distribution(A, theta)");
    return ModelPoint{theta, theta, a + a_anc, 1};
}

double lemma1_check(const SPDMatrix& a, const SPDMatrix& a_anc) {
    require_same_dim(a.dim(), a_anc.dim(), "lemma1_check");
    const Matrix a_inv = a.inverse();
    const Matrix b_inv = a_anc.inverse();
    const SPDMatrix precision_sum = SPDMatrix::validate(0.5 * ((a_inv + b_inv) + (a_inv + b_inv).transpose()));
    const Matrix middle = precision_sum.inverse();

    const Matrix m1 = a_inv - a_inv * middle * a_inv;
    const Matrix m2 = b_inv - b_inv * middle * b_inv;
    const Matrix m3 = b_inv * middle * a_inv;
    const Matrix m4 = a_inv * middle * b_inv;
    const Matrix target = (a + a_anc).inverse();

    double worst = 0.0;
    for (const Matrix* m : {&m1, &m2, &m3, &m4}) {
        worst = std::max(worst, (*m - target).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace stein
