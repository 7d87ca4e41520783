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

#include "stein_sense/gauss_core.hpp"

#include <cmath>
#include <sstream>

#include "stein_sense/errors.hpp"

namespace stein {

namespace {

std::string dims(Index r, Index c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

bool off_diagonal_zero(const Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

SPDMatrix::SPDMatrix(Matrix entries, bool diagonal)
    : entries_(std::move(entries)), diagonal_(diagonal) {
    if (diagonal_) {
        const Vector d = entries_.diagonal();
        if (!(d.array() > 0.0).all()) {
            throw NotPositiveDefinite("diagonal covariance has a non-positive entry");
        }
        diag_sqrt_ = d.array().sqrt();
        return;
    }
    llt_.compute(entries_);
    if (llt_.info() != Eigen::Success) {
        throw NotPositiveDefinite("Cholesky factorization failed for " +
                                  dims(entries_.rows(), entries_.cols()) + " matrix");
    }
}

SPDMatrix SPDMatrix::validate(const Matrix& raw) {
    if (raw.rows() != raw.cols()) {
        throw DimensionMismatch("covariance must be square, got " + dims(raw.rows(), raw.cols()));
    }
    if (raw.rows() < 1) {
        throw DimensionMismatch("covariance must have dimension >= 1");
    }
    if (!raw.allFinite()) {
        throw InvalidArgument("covariance has non-finite entries");
    }
    const double scale = raw.cwiseAbs().maxCoeff();
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * scale) {
        std::ostringstream os;
        os << "matrix is not symmetric (max |M - M^T| = " << asym << ")";
        throw NotSymmetric(os.str());
    }
    Matrix sym = 0.5 * (raw + raw.transpose());
    const bool diag = off_diagonal_zero(sym);
    return SPDMatrix(std::move(sym), diag);
}

SPDMatrix SPDMatrix::identity(Index dim, double scale) {
    return diagonal(Vector::Constant(dim, scale));
}

SPDMatrix SPDMatrix::diagonal(const Vector& entries) {
    if (entries.size() < 1) {
        throw DimensionMismatch("covariance must have dimension >= 1");
    }
    return SPDMatrix(Matrix(entries.asDiagonal()), true);
}

Matrix SPDMatrix::lower() const {
    if (diagonal_) {
        return Matrix(diag_sqrt_.asDiagonal());
    }
    return llt_.matrixL();
}

Vector SPDMatrix::apply_factor(const Vector& x) const {
    if (diagonal_) {
        return diag_sqrt_.cwiseProduct(x);
    }
    return llt_.matrixL() * x;
}

Vector SPDMatrix::solve(const Vector& v) const {
    if (v.size() != dim()) {
        throw DimensionMismatch("solve: vector has dimension " + std::to_string(v.size()) +
                                ", matrix has " + std::to_string(dim()));
    }
    if (diagonal_) {
        return v.cwiseQuotient(entries_.diagonal());
    }
    return llt_.solve(v);
}

Matrix SPDMatrix::solve(const Matrix& m) const {
    if (m.rows() != dim()) {
        throw DimensionMismatch("solve: right-hand side has " + std::to_string(m.rows()) +
                                " rows, matrix has dimension " + std::to_string(dim()));
    }
    if (diagonal_) {
        return entries_.diagonal().cwiseInverse().asDiagonal() * m;
    }
    return llt_.solve(m);
}

Matrix SPDMatrix::inverse() const {
    return solve(Matrix(Matrix::Identity(dim(), dim())));
}

SPDMatrix SPDMatrix::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidArgument("SPD scale factor must be positive and finite");
    }
    return SPDMatrix(c * entries_, diagonal_);
}

SPDMatrix operator+(const SPDMatrix& a, const SPDMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cannot add " + std::to_string(a.dim()) + "- and " +
                                std::to_string(b.dim()) + "-dimensional covariances");
    }
    return SPDMatrix(a.entries_ + b.entries_, a.diagonal_ && b.diagonal_);
}

double quad_form_inv2(const Vector& v, const SPDMatrix& cov) {
    if (v.size() != cov.dim()) {
        throw DimensionMismatch("quad_form_inv2: vector has dimension " +
                                std::to_string(v.size()) + ", covariance has " +
                                std::to_string(cov.dim()));
    }
    return cov.solve(v).squaredNorm();
}

namespace detail {

PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
    constexpr std::uint64_t kMul0 = 0xD2511F53;
    constexpr std::uint64_t kMul1 = 0xCD9E8D57;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = kMul0 * ctr[0];
        const std::uint64_t p1 = kMul1 * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

}  // namespace detail

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

void SeededRng::refill() {
    const detail::PhiloxBlock ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_),
                                  static_cast<std::uint32_t>(stream_ >> 32)};
    const detail::PhiloxKey key{static_cast<std::uint32_t>(seed_),
                                static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = detail::philox4x32_10(ctr, key);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
    ++block_;
}

SeededRng::result_type SeededRng::operator()() {
    if (buffered_ == 0) {
        refill();
    }
    return buffer_[2 - buffered_--];
}

double SeededRng::uniform() {
    // 53 random bits shifted by half an ulp: never exactly 0 or 1.
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::normal() { return normal_(*this); }

Vector SeededRng::normal_vector(Index dim) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) {
        v[i] = normal();
    }
    return v;
}

SeededRng rng_fork(const SeededRng& parent, std::uint64_t child_index) {
    const std::uint64_t child = splitmix64(parent.stream() ^ splitmix64(child_index + 1));
    return SeededRng(parent.seed(), child);
}

Vector mvn_sample(const Vector& mean, const SPDMatrix& cov, SeededRng& rng) {
    if (mean.size() != cov.dim()) {
        throw DimensionMismatch("mvn_sample: mean has dimension " + std::to_string(mean.size()) +
                                ", covariance has " + std::to_string(cov.dim()));
    }
    return mean + cov.apply_factor(rng.normal_vector(cov.dim()));
}

SPDMatrix random_spd(Index dim, SeededRng& rng, double min_eig, double max_eig) {
    if (dim < 1) {
        throw InvalidArgument("random_spd: dimension must be >= 1");
    }
    if (!(min_eig > 0.0 && max_eig >= min_eig)) {
        throw InvalidArgument("random_spd: need 0 < min_eig <= max_eig");
    }
    Matrix g(dim, dim);
    for (Index j = 0; j < dim; ++j) {
        for (Index i = 0; i < dim; ++i) {
            g(i, j) = rng.normal();
        }
    }
    // Sign-fixing the QR factor makes Q Haar distributed.
    const Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < dim; ++j) {
        if (r(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    Vector eig(dim);
    const double lo = std::log(min_eig);
    const double hi = std::log(max_eig);
    for (Index i = 0; i < dim; ++i) {
        eig(i) = std::exp(lo + (hi - lo) * rng.uniform());
    }
    return SPDMatrix::validate(q * eig.asDiagonal() * q.transpose());
}

}  // namespace stein
