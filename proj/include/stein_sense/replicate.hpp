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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stein_sense/gauss_core.hpp"

namespace stein {

/// Running mean / second central moment for several channels at once.
/// merge() is Chan's parallel update, so block partials combine exactly
/// the same way no matter which thread produced them.
class Moments {
public:
    explicit Moments(std::size_t channels = 1);

    void add(std::span<const double> values);
    void merge(const Moments& other);

    std::size_t channels() const { return mean_.size(); }
    std::uint64_t count() const { return count_; }
    double mean(std::size_t channel = 0) const { return mean_.at(channel); }
    /// Unbiased sample variance.
    double variance(std::size_t channel = 0) const;
    /// sqrt(variance / count).
    double std_error(std::size_t channel = 0) const;

private:
    std::uint64_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

/// Number of worker threads used by replicate(). 0 means hardware
/// concurrency. Results do not depend on this setting.
void set_worker_threads(unsigned threads);
unsigned worker_threads();

/// Body of one replicate: draws from its private stream and writes one
/// value per channel.
using ReplicateBody = std::function<void(SeededRng& rng, std::span<double> out)>;

/// Runs `reps` independent replicates. Replicate i uses rng_fork(parent, i).
Moments replicate(std::uint64_t reps, std::size_t channels, const SeededRng& parent,
                  const ReplicateBody& body);

}  // namespace stein
