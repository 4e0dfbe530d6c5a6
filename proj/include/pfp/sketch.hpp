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

// Sketch-then-project low-rank approximation.
//
// The non-private baseline draws a Gaussian test matrix Ω (n×k), forms
// Y = AΩ, orthonormalizes it into W and returns W Wᵀ A. The private
// find-and-project pipeline (pfp) splits (ε, δ) in half between
//
//   1. a range finder that perturbs Y with N(0, ρ_r²) noise before
//      orthonormalizing,
//   2. an optional pruning step that zeroes basis entries above α, and
//   3. a projection that releases Wᵀ A + N, with the noise on row i scaled by
//      α_i = ‖w_i‖_∞, and returns W (Wᵀ A + N).
//
// Both sketches are drawn from streams derived from SketchParams::seed, so
// with noise disabled and α = 1 pfp reproduces hmt_low_rank bit for bit.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pfp/coherence.hpp"
#include "pfp/error.hpp"
#include "pfp/linalg.hpp"
#include "pfp/matrix.hpp"
#include "pfp/privacy.hpp"
#include "pfp/random.hpp"

namespace pfp {

inline constexpr double kMinAlpha = 1e-6;

/// Target rank r, oversampling p and the derived sketch size k = r + p.
class SketchParams {
 public:
  SketchParams(std::size_t target_rank, std::size_t oversampling, RngSeed seed)
      : target_rank_(target_rank), oversampling_(oversampling), seed_(seed) {
    require(target_rank >= 2, "SketchParams: target rank must be >= 2");
    require(oversampling >= 2, "SketchParams: oversampling must be >= 2");
  }

  /// Oversampling defaults to r + 1.
  static SketchParams with_default_oversampling(std::size_t target_rank, RngSeed seed) {
    return SketchParams(target_rank, target_rank + 1, seed);
  }

  std::size_t target_rank() const { return target_rank_; }
  std::size_t oversampling() const { return oversampling_; }
  std::size_t k() const { return target_rank_ + oversampling_; }
  RngSeed seed() const { return seed_; }

  SketchParams with_seed(RngSeed seed) const {
    return SketchParams(target_rank_, oversampling_, seed);
  }

  void validate_for(const DenseMatrix& a) const {
    require(k() <= std::min(a.rows(), a.cols()),
            "SketchParams: k = r + p = " + std::to_string(k()) +
                " exceeds min(rows, cols) = " +
                std::to_string(std::min(a.rows(), a.cols())));
  }

 private:
  std::size_t target_rank_;
  std::size_t oversampling_;
  RngSeed seed_;
};

struct RangeResult {
  DenseMatrix w;
  double rho_range = 0.0;
  std::size_t k_effective = 0;
};

enum class CoherenceMode { c_coherent, mu0_coherent };

/// ρ = 2 ε⁻¹ sqrt(2k ln(4k/δ)).
inline double range_finder_noise_scale(std::size_t k, const PrivacyBudget& budget) {
  require(k >= 1, "range_finder_noise_scale: k must be >= 1");
  const double kd = static_cast<double>(k);
  return 2.0 / budget.epsilon() * std::sqrt(2.0 * kd * std::log(4.0 * kd / budget.delta()));
}

/// ρ = 2 ε⁻¹ sqrt(8k ln(4k/δ) ln(2/δ)).
inline double projection_noise_scale(std::size_t k, const PrivacyBudget& budget) {
  require(k >= 1, "projection_noise_scale: k must be >= 1");
  const double kd = static_cast<double>(k);
  return 2.0 / budget.epsilon() *
         std::sqrt(8.0 * kd * std::log(4.0 * kd / budget.delta()) *
                   std::log(2.0 / budget.delta()));
}

namespace detail {

inline DenseMatrix sketch_matrix(const DenseMatrix& a, const SketchParams& params) {
  const DenseMatrix omega = gaussian_matrix(a.cols(), params.k(), 0.0, 1.0,
                                            derive_seed(params.seed(), stream::kSketch));
  return multiply(a, omega);
}

}  // namespace detail

inline ApproxResult hmt_low_rank(const DenseMatrix& a, const SketchParams& params) {
  params.validate_for(a);
  const DenseMatrix w = gram_schmidt(detail::sketch_matrix(a, params));
  ApproxResult out;
  out.b = project_onto_range(w, a);
  out.achieved_error = frobenius_distance(a, out.b);
  out.range_error = out.achieved_error;
  return out;
}

inline RangeResult private_range_finder(const DenseMatrix& a, const SketchParams& params,
                                        const PrivacyBudget& budget,
                                        const testing::NoiseOverride& noise = {}) {
  params.validate_for(a);
  const double rho =
      detail::resolve_noise_scale(range_finder_noise_scale(params.k(), budget), noise);
  DenseMatrix y = detail::sketch_matrix(a, params);
  if (rho > 0.0)
    y = add(y, gaussian_matrix(a.rows(), params.k(), 0.0, rho,
                               derive_seed(params.seed(), stream::kRangeNoise)));
  RangeResult out;
  out.w = gram_schmidt(y);
  out.rho_range = rho;
  out.k_effective = out.w.cols();
  return out;
}

struct ProjectionResult {
  DenseMatrix b;
  double rho = 0.0;
  std::vector<double> alphas;  // ‖w_i‖_∞ per column
};

/// B = W (Wᵀ A + N), N_ij ~ N(0, α_i² ρ²). Columns of w need norm ≤ 1 but
/// need not be orthonormal (pruned bases are accepted as-is).
inline ProjectionResult private_projection_detailed(const DenseMatrix& a, const DenseMatrix& w,
                                                    const PrivacyBudget& budget, RngSeed seed,
                                                    const testing::NoiseOverride& noise = {}) {
  require(w.rows() == a.rows(), "private_projection: row counts differ");
  for (double norm : column_norms(w))
    require(norm <= 1.0 + kUnitColumnSlack,
            "private_projection: basis column norm exceeds 1");
  ProjectionResult out;
  if (w.cols() == 0) {
    out.b = DenseMatrix(a.rows(), a.cols());
    return out;
  }
  out.rho = detail::resolve_noise_scale(projection_noise_scale(w.cols(), budget), noise);
  out.alphas.resize(w.cols());
  for (std::size_t i = 0; i < w.cols(); ++i) out.alphas[i] = norm_inf(w.column(i));

  DenseMatrix released = multiply_at_b(w, a);
  if (out.rho > 0.0) {
    GaussianStream g(derive_seed(seed, stream::kProjectionNoise));
    for (std::size_t i = 0; i < released.rows(); ++i) {
      const double s = out.alphas[i] * out.rho;
      for (double& v : released.row(i)) v += s * g.next();
    }
  }
  out.b = multiply(w, released);
  return out;
}

inline DenseMatrix private_projection(const DenseMatrix& a, const DenseMatrix& w,
                                      const PrivacyBudget& budget, RngSeed seed,
                                      const testing::NoiseOverride& noise = {}) {
  return private_projection_detailed(a, w, budget, seed, noise).b;
}

/// The α equalizing the truncation term C k ‖A‖_F / (α√m) and the projection
/// term α k √n ln(4k/δ) / ε, clamped to [1e-6, 1].
inline double select_alpha(double a_frobenius, double c, std::size_t k, std::size_t m,
                           std::size_t n, const PrivacyBudget& budget) {
  require(a_frobenius >= 0.0 && c > 0.0 && k >= 1 && m >= 1 && n >= 1,
          "select_alpha: arguments must be positive");
  const double raw = std::sqrt(c * a_frobenius * budget.epsilon() /
                               (std::sqrt(static_cast<double>(m) * static_cast<double>(n)) *
                                std::log(4.0 * static_cast<double>(k) / budget.delta())));
  return std::clamp(raw, kMinAlpha, 1.0);
}

/// Whether m ≥ R k ln R, the size regime in which the μ0 analysis applies
/// (the asymptotic constant taken as 1).
inline bool mu0_regime_satisfied(std::size_t m, std::size_t data_rank, std::size_t k) {
  const double r = static_cast<double>(data_rank);
  return r <= 1.0 || static_cast<double>(m) >= r * static_cast<double>(k) * std::log(r);
}

/// Private find and project. Total privacy cost (ε, δ) by basic composition
/// of two (ε/2, δ/2) stages.
///
/// α comes from alpha_override when given. Otherwise c_coherent mode picks it
/// with select_alpha from C and ‖A‖_F measured directly on the data; that
/// auxiliary measurement is not privatized. mu0_coherent mode uses α = 1 and
/// touches the data only through the two private stages.
inline ApproxResult pfp(const DenseMatrix& a, const SketchParams& params,
                        const PrivacyBudget& budget, CoherenceMode mode,
                        std::optional<double> alpha_override = std::nullopt,
                        const testing::NoiseOverride& noise = {}) {
  params.validate_for(a);
  if (alpha_override)
    require(*alpha_override > 0.0 && *alpha_override <= 1.0,
            "pfp: alpha must lie in (0, 1]");
  const PrivacyBudget stage = budget.halved();

  const RangeResult range = private_range_finder(a, params, stage, noise);

  double alpha = 1.0;
  if (alpha_override) {
    alpha = *alpha_override;
  } else if (mode == CoherenceMode::c_coherent) {
    const double fro = frobenius_norm(a);
    alpha = fro == 0.0 ? 1.0
                       : select_alpha(fro, c_coherence(a), params.k(), a.rows(), a.cols(),
                                      budget);
  }
  const DenseMatrix pruned = alpha >= 1.0 ? range.w : prune_entries(range.w, alpha);

  const ProjectionResult projection =
      private_projection_detailed(a, pruned, stage, params.seed(), noise);

  ApproxResult out;
  out.b = projection.b;
  out.alpha_used = alpha;
  out.rho_range = range.rho_range;
  out.rho_proj = projection.rho;
  out.achieved_error = frobenius_distance(a, out.b);
  const ComposedBudget spent = basic_composition(2, stage);
  out.budget_spent = PrivacyBudget(spent.epsilon, spent.delta);

  const DenseMatrix range_proj = multiply(range.w, multiply_at_b(range.w, a));
  const DenseMatrix pruned_proj = multiply(pruned, multiply_at_b(pruned, a));
  out.range_error = frobenius_distance(a, range_proj);
  out.truncation_error = frobenius_distance(range_proj, pruned_proj);
  out.projection_noise_norm = frobenius_distance(out.b, pruned_proj);
  double alpha_sq = 0.0;
  for (double ai : projection.alphas) alpha_sq += ai * ai;
  out.projection_noise_bound =
      std::sqrt(static_cast<double>(pruned.cols()) * alpha_sq * projection.rho *
                projection.rho * static_cast<double>(a.cols()));
  return out;
}

}  // namespace pfp
