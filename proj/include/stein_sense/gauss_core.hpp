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

#include <array>
#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace stein {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Symmetric positive-definite matrix with its Cholesky factor cached at
/// construction. Every inverse application goes through the factor.
///
/// Inputs whose asymmetry is within 1e-12 of the largest entry are
/// symmetrized as (M + M^T) / 2 before factoring. Diagonal inputs take a
/// fast path that skips the dense factorization.
class SPDMatrix {
public:
    static constexpr double kSymmetryTolerance = 1e-12;

    /// Throws NotSymmetric, NotPositiveDefinite, or DimensionMismatch
    /// (non-square or empty input).
    static SPDMatrix validate(const Matrix& raw);
    static SPDMatrix identity(Index dim, double scale = 1.0);
    static SPDMatrix diagonal(const Vector& entries);

    Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }
    bool is_diagonal() const { return diagonal_; }
    double trace() const { return entries_.trace(); }

    /// Lower-triangular L with L L^T equal to the matrix.
    Matrix lower() const;

    /// L * x, mapping a standard normal vector onto this covariance.
    Vector apply_factor(const Vector& x) const;

    /// S^{-1} v by factored solves.
    Vector solve(const Vector& v) const;
    Matrix solve(const Matrix& m) const;

    /// Explicit inverse. Only for checks that need the matrix itself.
    Matrix inverse() const;

    /// c * S for c > 0.
    SPDMatrix scaled(double c) const;

    friend SPDMatrix operator+(const SPDMatrix& a, const SPDMatrix& b);

private:
    SPDMatrix(Matrix entries, bool diagonal);

    Matrix entries_;
    bool diagonal_ = false;
    Vector diag_sqrt_;
    Eigen::LLT<Matrix> llt_;
};

inline SPDMatrix spd_validate(const Matrix& raw) { return SPDMatrix::validate(raw); }

/// v^T S^{-2} v, computed as |S^{-1} v|^2 from one factored solve.
double quad_form_inv2(const Vector& v, const SPDMatrix& cov);

namespace detail {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11 "Random123").
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key);

}  // namespace detail

/// Counter-based generator: the key is the seed, the high half of the
/// 128-bit counter is the stream, the low half counts blocks. A stream is a
/// disjoint counter range, so forking is O(1) and never overlaps.
///
/// Satisfies UniformRandomBitGenerator. Values are not shared between
/// threads; a worker receives its own fork.
class SeededRng {
public:
    using result_type = std::uint64_t;

    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Uniform draw on the open interval (0, 1).
    double uniform();
    double normal();
    Vector normal_vector(Index dim);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Child stream derived from the parent's (seed, stream). Pure: the parent
/// is untouched and the same index always yields the same child.
SeededRng rng_fork(const SeededRng& parent, std::uint64_t child_index);

/// One draw from N(mean, cov). Throws DimensionMismatch.
Vector mvn_sample(const Vector& mean, const SPDMatrix& cov, SeededRng& rng);

/// Q diag(lambda) Q^T with Q Haar-random orthogonal and the eigenvalues
/// log-uniform on [min_eig, max_eig].
SPDMatrix random_spd(Index dim, SeededRng& rng, double min_eig = 0.5, double max_eig = 2.0);

}  // namespace stein
