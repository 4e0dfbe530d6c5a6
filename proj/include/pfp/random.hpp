// Copyright 2026 The PFP Authors
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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pfp/error.hpp"
#include "pfp/matrix.hpp"

namespace pfp {

struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(RngSeed, RngSeed) = default;
};

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Fixed stream identifiers. Every randomized operation draws from a stream
/// derived from its seed and one of these tags, so that e.g. the sketching
/// matrix is the same in the private and non-private range finders.
namespace stream {
inline constexpr std::uint64_t kSketch = 1;
inline constexpr std::uint64_t kRangeNoise = 2;
inline constexpr std::uint64_t kProjectionNoise = 3;
inline constexpr std::uint64_t kResponseNoise = 4;
inline constexpr std::uint64_t kPowerIteration = 5;
inline constexpr std::uint64_t kGenerator = 6;
inline constexpr std::uint64_t kDatabase = 7;
}  // namespace stream

inline RngSeed derive_seed(RngSeed seed, std::uint64_t tag) {
  return RngSeed{detail::mix64(seed.value ^ detail::mix64(tag * detail::kGolden))};
}

/// Counter-based uniform stream: output i is mix64(seed + (i + 1) * golden),
/// i.e. SplitMix64 addressed by position. The sequence depends on nothing
/// but the seed and the number of values drawn.
class CounterRng {
 public:
  explicit CounterRng(RngSeed seed) : seed_(seed.value) {}

  std::uint64_t next_u64() {
    ++counter_;
    return detail::mix64(seed_ + counter_ * detail::kGolden);
  }

  /// Uniform on (0, 1].
  double uniform_open_closed() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Standard normals by Box–Muller; each pair of uniforms yields two samples.
class GaussianStream {
 public:
  explicit GaussianStream(RngSeed seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform_open_closed();
    const double u2 = rng_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  CounterRng rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                                   double mean, double stddev, RngSeed seed) {
  require(stddev >= 0.0 && std::isfinite(stddev),
          "gaussian_matrix: stddev must be finite and non-negative");
  require(std::isfinite(mean), "gaussian_matrix: mean must be finite");
  DenseMatrix out(rows, cols, mean);
  if (stddev == 0.0) return out;
  GaussianStream g(seed);
  for (double& v : out.data()) v = mean + stddev * g.next();
  return out;
}

inline std::vector<double> gaussian_vector(std::size_t n, RngSeed seed) {
  std::vector<double> out(n);
  GaussianStream g(seed);
  for (double& v : out) v = g.next();
  return out;
}

}  // namespace pfp
