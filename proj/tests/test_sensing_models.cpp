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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "stein_sense/errors.hpp"
#include "stein_sense/sensing_models.hpp"

namespace stein {
namespace {

const Vector kTheta{{0.5, -0.2, 0.3, 0.1}};

TEST(ModelDistribution, Examples) {
    const SPDMatrix sigma = SPDMatrix::identity(4, 4.0);
    const ModelPoint seq = model_distribution(Strategy::SequentialNoiseless, kTheta, sigma, std::nullopt, 2);
    EXPECT_LT((seq.gamma_n.matrix() - Matrix::Identity(4, 4)).norm(), 1e-15);
    EXPECT_EQ(seq.loc, kTheta);
    EXPECT_EQ(seq.n_resources, 2);

    const ModelPoint noisy = model_distribution(Strategy::SeparateNoisy, kTheta, sigma, sigma, 1);
    EXPECT_LT((noisy.gamma_n.matrix() - 8.0 * Matrix::Identity(4, 4)).norm(), 1e-15);

    Matrix m(4, 4);
    m << 2, 0.1, 0, 0, 0.1, 1, 0.2, 0, 0, 0.2, 3, 0.4, 0, 0, 0.4, 1.5;
    const ModelPoint one = model_distribution(Strategy::SeparateNoiseless, kTheta, spd_validate(m), std::nullopt, 1);
    EXPECT_EQ(one.gamma_n.matrix(), m);
}

TEST(ModelDistribution, AllFourLaws) {
    SeededRng rng(12);
    const SPDMatrix sigma = random_spd(4, rng);
    const SPDMatrix delta = random_spd(4, rng);
    const Matrix s = sigma.matrix();
    const Matrix d = delta.matrix();
    for (int n : {1, 3, 17}) {
        const double nd = n;
        EXPECT_LT((model_distribution(Strategy::SeparateNoiseless, kTheta, sigma, std::nullopt, n).gamma_n.matrix() -
                   s / nd).norm(), 1e-14);
        EXPECT_LT((model_distribution(Strategy::SequentialNoiseless, kTheta, sigma, std::nullopt, n).gamma_n.matrix() -
                   s / (nd * nd)).norm(), 1e-14);
        EXPECT_LT((model_distribution(Strategy::SeparateNoisy, kTheta, sigma, delta, n).gamma_n.matrix() -
                   (s + d) / nd).norm(), 1e-14);
        EXPECT_LT((model_distribution(Strategy::SequentialNoisy, kTheta, sigma, delta, n).gamma_n.matrix() -
                   (s / (nd * nd) + d / nd)).norm(), 1e-14);
    }
}

TEST(ModelDistribution, Errors) {
    const SPDMatrix sigma = SPDMatrix::identity(4);
    EXPECT_THROW(model_distribution(Strategy::SeparateNoisy, kTheta, sigma, std::nullopt, 3), MissingNoiseMatrix);
    EXPECT_THROW(model_distribution(Strategy::SequentialNoisy, kTheta, sigma, std::nullopt, 3), MissingNoiseMatrix);
    EXPECT_THROW(model_distribution(Strategy::SeparateNoiseless, kTheta, sigma, sigma, 3), InvalidArgument);
    EXPECT_THROW(model_distribution(Strategy::SeparateNoiseless, kTheta, sigma, std::nullopt, 0), InvalidArgument);
    EXPECT_THROW(model_distribution(Strategy::SeparateNoiseless, Vector::Zero(3), sigma, std::nullopt, 1),
                 DimensionMismatch);
    EXPECT_THROW(model_distribution(Strategy::SeparateNoisy, kTheta, sigma, SPDMatrix::identity(3), 1),
                 DimensionMismatch);
}

TEST(ModelDistribution, NoiselessTraceRatioIsN) {
    const SPDMatrix sigma = SPDMatrix::identity(4, 4.0);
    for (int n = 1; n <= 1000; ++n) {
        const double sep = model_distribution(Strategy::SeparateNoiseless, kTheta, sigma, std::nullopt, n).gamma_n.trace();
        const double seq = model_distribution(Strategy::SequentialNoiseless, kTheta, sigma, std::nullopt, n).gamma_n.trace();
        ASSERT_LE(std::abs(sep / seq / n - 1.0), 4.0 * std::numeric_limits<double>::epsilon()) << "N = " << n;
    }
}

TEST(ModelDistribution, NoisyMleAdvantageApproachesConstant) {
    const SPDMatrix sigma = SPDMatrix::identity(4, 4.0);
    double previous = 0.0;
    for (int n = 1; n <= 1000; ++n) {
        const double sep = model_distribution(Strategy::SeparateNoisy, kTheta, sigma, sigma, n).gamma_n.trace();
        const double seq = model_distribution(Strategy::SequentialNoisy, kTheta, sigma, sigma, n).gamma_n.trace();
        const double ad = sep / seq;
        ASSERT_GT(ad, previous);
        ASSERT_LT(ad, 2.0);
        previous = ad;
    }
    EXPECT_NEAR(previous, 2.0, 0.01);
}

TEST(ApplyNoiseChannel, DirectRule) {
    const GaussianState s{Vector::Zero(2), SPDMatrix::identity(2)};
    const GaussianState out = apply_noise_channel(s, Vector{{1.0, 0.0}}, SPDMatrix::identity(2));
    EXPECT_EQ(out.mean, (Vector{{1.0, 0.0}}));
    EXPECT_LT((out.cov.matrix() - 2.0 * Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(ApplyNoiseChannel, IdentityLimit) {
    SeededRng rng(2);
    const GaussianState s{rng.normal_vector(3), random_spd(3, rng)};
    const GaussianState out = apply_noise_channel(s, Vector::Zero(3), SPDMatrix::identity(3, 1e-12));
    EXPECT_LT((out.mean - s.mean).norm(), 1e-10);
    EXPECT_LT((out.cov.matrix() - s.cov.matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ApplyNoiseChannel, ComposesToClosedForm) {
    SeededRng rng(3);
    const GaussianState s{rng.normal_vector(4), random_spd(4, rng)};
    const Vector theta = rng.normal_vector(4);
    const SPDMatrix delta = random_spd(4, rng);
    GaussianState cur = s;
    for (int i = 0; i < 3; ++i) {
        cur = apply_noise_channel(cur, theta, delta);
    }
    EXPECT_LT((cur.mean - (s.mean + 3.0 * theta)).norm(), 1e-13);
    EXPECT_LT((cur.cov.matrix() - (s.cov.matrix() + 3.0 * delta.matrix())).norm(), 1e-13);
    EXPECT_THROW(apply_noise_channel(s, Vector::Zero(3), delta), DimensionMismatch);
}

TEST(MeasurementDistribution, Examples) {
    const ModelPoint a = measurement_distribution(SPDMatrix::identity(4), SPDMatrix::identity(4), kTheta);
    EXPECT_LT((a.gamma_n.matrix() - 2.0 * Matrix::Identity(4, 4)).norm(), 1e-15);
    EXPECT_EQ(a.loc, kTheta);
    EXPECT_EQ(a.n_resources, 1);

    const ModelPoint b = measurement_distribution(SPDMatrix::identity(4, 3.0), SPDMatrix::identity(4, 1e-12), kTheta);
    EXPECT_LT((b.gamma_n.matrix() - 3.0 * Matrix::Identity(4, 4)).norm(), 1e-11);

    const Vector t2{{1.0, 2.0}};
    const ModelPoint c = measurement_distribution(SPDMatrix::diagonal(Vector{{1.0, 2.0}}),
                                                  SPDMatrix::diagonal(Vector{{3.0, 4.0}}), t2);
    EXPECT_EQ(c.gamma_n.matrix(), Vector(Vector{{4.0, 6.0}}).asDiagonal().toDenseMatrix());
    EXPECT_THROW(measurement_distribution(SPDMatrix::identity(2), SPDMatrix::identity(3), t2), DimensionMismatch);
}

TEST(AncillaIdentity, HandCases) {
    EXPECT_LE(lemma1_check(SPDMatrix::identity(2), SPDMatrix::identity(2)), 1e-12);
    EXPECT_LE(lemma1_check(SPDMatrix::identity(2, 2.0), SPDMatrix::identity(2)), 1e-12);
    EXPECT_THROW(lemma1_check(SPDMatrix::identity(2), SPDMatrix::identity(4)), DimensionMismatch);
}

TEST(AncillaIdentity, RandomPairs) {
    SeededRng rng(77);
    for (int i = 0; i < 100; ++i) {
        const Index dim = 2 + static_cast<Index>(rng() % 7);
        const SPDMatrix a = random_spd(dim, rng, 0.1, 10.0);
        const SPDMatrix b = random_spd(dim, rng, 0.1, 10.0);
        EXPECT_LE(lemma1_check(a, b), 1e-9) << "pair " << i << " dim " << dim;
    }
}

}  // namespace
}  // namespace stein
