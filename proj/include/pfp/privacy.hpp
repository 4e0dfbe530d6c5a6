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
#include <cstddef>
#include <optional>
#include <string>

#include "pfp/error.hpp"
#include "pfp/linalg.hpp"
#include "pfp/matrix.hpp"
#include "pfp/random.hpp"

namespace pfp {

/// (ε, δ) with 0 < ε ≤ 1 and 0 < δ < 1.
class PrivacyBudget {
 public:
  PrivacyBudget(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
    require(epsilon > 0.0 && epsilon <= 1.0,
            "PrivacyBudget: epsilon must lie in (0, 1], got " + std::to_string(epsilon));
    require(delta > 0.0 && delta < 1.0,
            "PrivacyBudget: delta must lie in (0, 1), got " + std::to_string(delta));
  }

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  /// The (ε/2, δ/2) share given to each of two sequential stages.
  PrivacyBudget halved() const { return PrivacyBudget(epsilon_ / 2.0, delta_ / 2.0); }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  double epsilon_;
  double delta_;
};

/// A composed guarantee. Unlike PrivacyBudget it may exceed 1.
struct ComposedBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct NoiseCalibration {
  double sigma = 0.0;
  double sensitivity = 0.0;
  PrivacyBudget budget;
};

namespace testing {

/// Replaces the calibrated noise scale of a noisy operation (0 disables the
/// noise). Only honoured in builds defining PFP_ENABLE_TEST_HOOKS; elsewhere
/// setting it is an error.
struct NoiseOverride {
  std::optional<double> scale;
};

}  // namespace testing

namespace detail {

inline double resolve_noise_scale(double calibrated,
                                  const testing::NoiseOverride& override_scale) {
  if (!override_scale.scale) return calibrated;
#ifdef PFP_ENABLE_TEST_HOOKS
  require(*override_scale.scale >= 0.0, "NoiseOverride: scale must be non-negative");
  return *override_scale.scale;
#else
  throw InvalidArgument("NoiseOverride is a test hook and is disabled in this build");
#endif
}

}  // namespace detail

/// σ = c · ε⁻¹ · sqrt(ln(1.25/δ)), natural logarithm.
inline double gaussian_mechanism_sigma(double sensitivity, const PrivacyBudget& budget) {
  require(sensitivity > 0.0, "gaussian_mechanism_sigma: sensitivity must be positive");
  return sensitivity / budget.epsilon() * std::sqrt(std::log(1.25 / budget.delta()));
}

inline NoiseCalibration calibrate_gaussian(double sensitivity, const PrivacyBudget& budget) {
  return {gaussian_mechanism_sigma(sensitivity, budget), sensitivity, budget};
}

/// k-fold composition: (kε, kδ).
inline ComposedBudget basic_composition(std::size_t k, const PrivacyBudget& per_step) {
  require(k >= 1, "basic_composition: k must be >= 1");
  const double kd = static_cast<double>(k);
  return {kd * per_step.epsilon(), kd * per_step.delta()};
}

/// k-fold advanced composition: ε′ = sqrt(2k ln(1/δ′)) ε + 2kε², δ = kδ + δ′.
inline ComposedBudget advanced_composition(std::size_t k, const PrivacyBudget& per_step,
                                           double delta_prime) {
  require(k >= 1, "advanced_composition: k must be >= 1");
  require(delta_prime > 0.0 && delta_prime < 1.0,
          "advanced_composition: delta_prime must lie in (0, 1)");
  const double kd = static_cast<double>(k);
  const double eps = per_step.epsilon();
  return {std::sqrt(2.0 * kd * std::log(1.0 / delta_prime)) * eps + 2.0 * kd * eps * eps,
          kd * per_step.delta() + delta_prime};
}

/// Input perturbation: a + N with N i.i.d. N(0, σ²), σ calibrated for unit
/// ℓ2 sensitivity (a unit row change is a unit change of the flattened matrix).
inline DenseMatrix randomized_response(const DenseMatrix& a, const PrivacyBudget& budget,
                                       RngSeed seed,
                                       const testing::NoiseOverride& noise = {}) {
  const double sigma = detail::resolve_noise_scale(gaussian_mechanism_sigma(1.0, budget), noise);
  if (sigma == 0.0) return a;
  return add(a, gaussian_matrix(a.rows(), a.cols(), 0.0, sigma,
                                derive_seed(seed, stream::kResponseNoise)));
}

/// Output of every approximation routine.
struct ApproxResult {
  DenseMatrix b;
  double alpha_used = 1.0;
  double rho_range = 0.0;
  double rho_proj = 0.0;
  double achieved_error = 0.0;
  std::optional<PrivacyBudget> budget_spent;

  // Error decomposition (pfp only; zero elsewhere):
  // ‖A−B‖ ≤ range_error + truncation_error + projection_noise_norm.
  double range_error = 0.0;
  double truncation_error = 0.0;
  double projection_noise_norm = 0.0;
  double projection_noise_bound = 0.0;  // sqrt(k Σ α_i² ρ² n)
};

/// Randomized response followed by the best rank-k truncation.
inline ApproxResult rr_low_rank_baseline(const DenseMatrix& a, std::size_t k,
                                         const PrivacyBudget& budget, RngSeed seed,
                                         const testing::NoiseOverride& noise = {}) {
  require(k >= 1 && k <= std::min(a.rows(), a.cols()),
          "rr_low_rank_baseline: k must lie in [1, min(rows, cols)]");
  const DenseMatrix perturbed = randomized_response(a, budget, seed, noise);
  ApproxResult out;
  out.b = best_rank_k(svd_oracle(perturbed), k);
  out.achieved_error = frobenius_distance(a, out.b);
  out.budget_spent = budget;
  return out;
}

}  // namespace pfp
