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

#include "stein_sense/replicate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "stein_sense/errors.hpp"

namespace stein {

namespace {

constexpr std::uint64_t kBlockSize = 1024;

std::atomic<unsigned> g_threads{0};

}  // namespace

Moments::Moments(std::size_t channels) : mean_(channels, 0.0), m2_(channels, 0.0) {}

void Moments::add(std::span<const double> values) {
    if (values.size() != mean_.size()) {
        throw DimensionMismatch("Moments::add: wrong channel count");
    }
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean_[i];
        mean_[i] += d / n;
        m2_[i] += d * (values[i] - mean_[i]);
    }
}

void Moments::merge(const Moments& other) {
    if (other.mean_.size() != mean_.size()) {
        throw DimensionMismatch("Moments::merge: wrong channel count");
    }
    if (other.count_ == 0) {
        return;
    }
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        const double d = other.mean_[i] - mean_[i];
        mean_[i] += d * nb / n;
        m2_[i] += other.m2_[i] + d * d * na * nb / n;
    }
    count_ += other.count_;
}

double Moments::variance(std::size_t channel) const {
    if (count_ < 2) {
        return 0.0;
    }
    return m2_.at(channel) / static_cast<double>(count_ - 1);
}

double Moments::std_error(std::size_t channel) const {
    if (count_ < 2) {
        return 0.0;
    }
    return std::sqrt(variance(channel) / static_cast<double>(count_));
}

void set_worker_threads(unsigned threads) { g_threads.store(threads); }

unsigned worker_threads() {
    const unsigned t = g_threads.load();
    if (t != 0) {
        return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Moments replicate(std::uint64_t reps, std::size_t channels, const SeededRng& parent,
                  const ReplicateBody& body) {
    const std::uint64_t blocks = (reps + kBlockSize - 1) / kBlockSize;
    std::vector<Moments> partial(blocks, Moments(channels));
    std::vector<std::exception_ptr> errors(blocks);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
        std::vector<double> out(channels);
        for (std::uint64_t b = next++; b < blocks; b = next++) {
            try {
                const std::uint64_t end = std::min(reps, (b + 1) * kBlockSize);
                for (std::uint64_t i = b * kBlockSize; i < end; ++i) {
                    SeededRng rng = rng_fork(parent, i);
                    std::fill(out.begin(), out.end(), 0.0);
                    body(rng, out);
                    partial[b].add(out);
                }
            } catch (...) {
                errors[b] = std::current_exception();
            }
        }
    };

    const auto threads =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_threads(), std::max<std::uint64_t>(blocks, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    Moments total(channels);
    for (std::uint64_t b = 0; b < blocks; ++b) {
        if (errors[b]) {
            std::rethrow_exception(errors[b]);
        }
        total.merge(partial[b]);
    }
    return total;
}

}  // namespace stein
