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
#include <string_view>

#include "stein_sense/gauss_core.hpp"

namespace stein {

/// How N uses of the encoding unitary (or noisy channel) are spent.
enum class Strategy {
    SeparateNoiseless,   ///< N probes, one use each, average the outcomes
    SequentialNoiseless, ///< one probe, N uses in sequence, divide by N
    SeparateNoisy,
    SequentialNoisy,
};

std::string_view to_string(Strategy s);
bool is_noisy(Strategy s);

struct GaussianState {
    Vector mean;
    SPDMatrix cov;
};

/// Sampling law the estimators see: data ~ N(loc, gamma_n).
struct ModelPoint {
    Vector theta;
    Vector loc;
    SPDMatrix gamma_n;
    int n_resources = 1;
};

/// Effective covariance for each strategy:
///   separate noiseless   S / N
///   sequential noiseless S / N^2
///   separate noisy       (S + D) / N
///   sequential noisy     S / N^2 + D / N
/// Throws MissingNoiseMatrix if a noisy strategy has no `delta`, and
/// InvalidArgument if a noiseless one is given one or N < 1.
ModelPoint model_distribution(Strategy strategy, const Vector& theta, const SPDMatrix& sigma,
                              const std::optional<SPDMatrix>& delta, int n_resources);

/// Random-displacement channel: mean r -> r + theta, cov A -> A + D.
GaussianState apply_noise_channel(const GaussianState& state, const Vector& theta,
                                  const SPDMatrix& delta);

/// Outcome law of the ancilla-assisted joint measurement: N(theta, A + A_anc).
ModelPoint measurement_distribution(const SPDMatrix& a, const SPDMatrix& a_anc,
                                    const Vector& theta);

/// Builds the four completing-the-square matrices
///   M1 = A^-1 - A^-1 (A^-1 + B^-1)^-1 A^-1
///   M2 = B^-1 - B^-1 (A^-1 + B^-1)^-1 B^-1
///   M3 = B^-1 (A^-1 + B^-1)^-1 A^-1
///   M4 = A^-1 (A^-1 + B^-1)^-1 B^-1
/// (B = A_anc) from their definitions and returns the largest entrywise
/// deviation of any of them from (A + B)^-1. Zero in exact arithmetic.
double lemma1_check(const SPDMatrix& a, const SPDMatrix& a_anc);

}  // namespace stein
