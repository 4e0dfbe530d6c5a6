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

// Reconstruction attack against low-rank release mechanisms.
//
// A bit database of length k·n is written into the first k rows of an m×n
// matrix (all other rows zero). The mechanism under test is applied, the first
// k rows of its output are rounded to {0, 1} and compared with the original
// bits. An accurate enough rank-k release recovers almost every bit, which no
// (ε, δ)-private mechanism can allow.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfp/error.hpp"
#include "pfp/matrix.hpp"
#include "pfp/privacy.hpp"
#include "pfp/random.hpp"
#include "pfp/sketch.hpp"

namespace pfp {

class BitDatabase {
 public:
  BitDatabase() = default;
  explicit BitDatabase(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) require(b <= 1, "BitDatabase: entries must be 0 or 1");
  }

  static BitDatabase random(std::size_t length, RngSeed seed) {
    CounterRng rng(derive_seed(seed, stream::kDatabase));
    std::vector<std::uint8_t> bits(length);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    return BitDatabase(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  double fraction_of_ones() const {
    if (bits_.empty()) return 0.0;
    std::size_t ones = 0;
    for (auto b : bits_) ones += b;
    return static_cast<double>(ones) / static_cast<double>(bits_.size());
  }

  friend bool operator==(const BitDatabase&, const BitDatabase&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct AttackReport {
  double recovered_fraction = 0.0;
  std::size_t hamming_distance = 0;
  std::string mechanism_label;
  double noise_sigma_effective = 0.0;
};

/// A mechanism maps an m×n matrix (and a seed for its own randomness) to an
/// m×n matrix.
struct Mechanism {
  std::string label;
  double noise_sigma_effective = 0.0;
  std::function<DenseMatrix(const DenseMatrix&, RngSeed)> apply;
};

inline DenseMatrix encode_database(const BitDatabase& d, std::size_t m, std::size_t k) {
  require(k >= 1, "encode_database: k must be >= 1");
  require(m >= k, "encode_database: m must be >= k");
  require(d.size() > 0 && d.size() % k == 0,
          "encode_database: database length must be a positive multiple of k");
  const std::size_t n = d.size() / k;
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = d[i * n + j];
  return a;
}

/// Nearest of {0, 1}; exactly 0.5 rounds to 1.
inline std::uint8_t round_bit(double v) { return v >= 0.5 ? 1 : 0; }

inline BitDatabase decode_database(const DenseMatrix& a, std::size_t k) {
  require(k <= a.rows(), "decode_database: k exceeds row count");
  std::vector<std::uint8_t> bits;
  bits.reserve(k * a.cols());
  for (std::size_t i = 0; i < k; ++i)
    for (double v : a.row(i)) bits.push_back(round_bit(v));
  return BitDatabase(std::move(bits));
}

inline AttackReport attack(const BitDatabase& d, std::size_t m, std::size_t k,
                           const Mechanism& mechanism, RngSeed seed) {
  const DenseMatrix encoded = encode_database(d, m, k);
  const DenseMatrix released = mechanism.apply(encoded, seed);
  require(released.rows() == encoded.rows() && released.cols() == encoded.cols(),
          "attack: mechanism changed the matrix shape");
  const BitDatabase guess = decode_database(released, k);
  AttackReport report;
  for (std::size_t i = 0; i < d.size(); ++i) report.hamming_distance += guess[i] != d[i];
  report.recovered_fraction = 1.0 - static_cast<double>(report.hamming_distance) /
                                        static_cast<double>(d.size());
  report.mechanism_label = mechanism.label;
  report.noise_sigma_effective = mechanism.noise_sigma_effective;
  return report;
}

inline Mechanism identity_mechanism() {
  return {"identity", 0.0, [](const DenseMatrix& a, RngSeed) { return a; }};
}

/// Additive N(0, sigma²) noise with no privacy calibration; used to chart how
/// recovery depends on the noise level.
inline Mechanism gaussian_noise_mechanism(double sigma) {
  require(sigma >= 0.0, "gaussian_noise_mechanism: sigma must be non-negative");
  return {"gaussian(sigma=" + std::to_string(sigma) + ")", sigma,
          [sigma](const DenseMatrix& a, RngSeed seed) {
            return add(a, gaussian_matrix(a.rows(), a.cols(), 0.0, sigma,
                                          derive_seed(seed, stream::kResponseNoise)));
          }};
}

inline Mechanism randomized_response_mechanism(const PrivacyBudget& budget) {
  return {"randomized_response", gaussian_mechanism_sigma(1.0, budget),
          [budget](const DenseMatrix& a, RngSeed seed) {
            return randomized_response(a, budget, seed);
          }};
}

/// pfp with the given sketch shape; the seed passed to apply replaces the one
/// in params. The reported sigma is the projection noise scale at α = 1.
inline Mechanism pfp_mechanism(const SketchParams& params, const PrivacyBudget& budget,
                               CoherenceMode mode,
                               std::optional<double> alpha = std::nullopt) {
  return {"pfp", projection_noise_scale(params.k(), budget.halved()),
          [params, budget, mode, alpha](const DenseMatrix& a, RngSeed seed) {
            return pfp(a, params.with_seed(seed), budget, mode, alpha).b;
          }};
}

}  // namespace pfp
