// Copyright 2026 The eitcool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Seeding and uniform draws shared by every stochastic kernel. Only the raw
// engine output is used so results do not depend on the standard library's
// distribution implementations.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace eitcool {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the index-th independent stream derived from `base`.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::size_t index) noexcept {
  return splitmix64(base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// 53 random bits in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index n with cdf[n-1] <= u < cdf[n]; the last entry absorbs rounding.
  std::size_t sample(const std::vector<double>& cdf) {
    const double u = uniform();
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (u < cdf[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace eitcool
