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

// Coherence measures and the empirical checks that relate them to the
// pruning and projection steps of the private pipeline.
//
//  * C-coherence: the smallest C with max_i ‖e_iᵀA‖ ≤ C‖A‖_F/√m.
//  * μ0-coherence: (m/r)·max_j ‖U_(j)‖² for the rank-r left singular factor.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pfp/error.hpp"
#include "pfp/linalg.hpp"
#include "pfp/matrix.hpp"
#include "pfp/random.hpp"

namespace pfp {

/// Singular values at or below this fraction of σ_1 count as zero.
inline constexpr double kDefaultRankTolerance = 1e-9;

inline constexpr double kUnitColumnSlack = 1e-10;

// Constants standing in for the unspecified O(·) factors of the ℓ∞ basis
// bound. Reporting only; the algorithms never use them.
inline constexpr double kLinfLeadingConstant = 4.0;
inline constexpr double kLinfLogConstant = 8.0;
inline constexpr double kPerturbConditionConstant = 40.0;

struct CoherenceReport {
  double c_coherence = 0.0;
  double mu0_coherence = 0.0;
  std::size_t rank_used = 0;
  double max_row_norm = 0.0;
  double frobenius_norm = 0.0;
  std::vector<double> row_norms;
};

struct Mu0Result {
  double mu0 = 0.0;
  std::size_t rank_used = 0;
};

inline double c_coherence(const DenseMatrix& a) {
  const double fro = frobenius_norm(a);
  if (fro == 0.0) throw InvalidArgument("c_coherence: undefined for the zero matrix");
  const auto norms = row_norms(a);
  const double max_row = *std::max_element(norms.begin(), norms.end());
  return max_row * std::sqrt(static_cast<double>(a.rows())) / fro;
}

/// μ0 of an m×r matrix with orthonormal columns.
inline double mu0_of_basis(const DenseMatrix& u) {
  require(u.cols() > 0, "mu0_of_basis: basis has no columns");
  double worst = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    const auto r = u.row(i);
    worst = std::max(worst, dot(r, r));
  }
  return static_cast<double>(u.rows()) / static_cast<double>(u.cols()) * worst;
}

/// μ0 from a precomputed decomposition; useful when the caller already paid
/// for the SVD.
inline Mu0Result mu0_from_svd(const SvdResult& svd,
                              double rank_tolerance = kDefaultRankTolerance) {
  require(rank_tolerance > 0.0, "mu0_coherence: rank_tolerance must be positive");
  const std::size_t r = numerical_rank(svd.singular_values, rank_tolerance);
  if (r == 0) throw InvalidArgument("mu0_coherence: undefined for the zero matrix");
  const std::size_t m = svd.u.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t t = 0; t < r; ++t) s += svd.u(i, t) * svd.u(i, t);
    worst = std::max(worst, s);
  }
  return {static_cast<double>(m) / static_cast<double>(r) * worst, r};
}

inline Mu0Result mu0_coherence(const DenseMatrix& a,
                               double rank_tolerance = kDefaultRankTolerance) {
  if (frobenius_norm(a) == 0.0)
    throw InvalidArgument("mu0_coherence: undefined for the zero matrix");
  return mu0_from_svd(svd_oracle(a), rank_tolerance);
}

inline CoherenceReport coherence_report(const SvdResult& svd, const DenseMatrix& a,
                                        double rank_tolerance = kDefaultRankTolerance) {
  CoherenceReport report;
  report.row_norms = row_norms(a);
  report.frobenius_norm = frobenius_norm(a);
  report.max_row_norm =
      report.row_norms.empty()
          ? 0.0
          : *std::max_element(report.row_norms.begin(), report.row_norms.end());
  report.c_coherence = c_coherence(a);
  const Mu0Result mu = mu0_from_svd(svd, rank_tolerance);
  report.mu0_coherence = mu.mu0;
  report.rank_used = mu.rank_used;
  return report;
}

inline CoherenceReport coherence_report(const DenseMatrix& a,
                                        double rank_tolerance = kDefaultRankTolerance) {
  if (frobenius_norm(a) == 0.0)
    throw InvalidArgument("coherence_report: undefined for the zero matrix");
  return coherence_report(svd_oracle(a), a, rank_tolerance);
}

/// Zeroes every entry whose magnitude is strictly larger than alpha.
inline DenseMatrix prune_entries(const DenseMatrix& w, double alpha) {
  require(alpha > 0.0, "prune_entries: alpha must be positive");
  for (double norm : column_norms(w))
    require(norm <= 1.0 + kUnitColumnSlack,
            "prune_entries: basis column norm exceeds 1");
  DenseMatrix out = w;
  for (double& v : out.data())
    if (std::abs(v) > alpha) v = 0.0;
  return out;
}

struct TruncationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ‖W W_αᵀ A − W Wᵀ A‖_F against C k ‖A‖_F / (α √m).
inline TruncationCheck truncation_error_check(const DenseMatrix& a,
                                              const DenseMatrix& w, double alpha) {
  require(w.rows() == a.rows(), "truncation_error_check: row counts differ");
  const DenseMatrix pruned = prune_entries(w, alpha);
  const DenseMatrix exact = multiply(w, multiply_at_b(w, a));
  const DenseMatrix truncated = multiply(w, multiply_at_b(pruned, a));
  TruncationCheck out;
  out.lhs = frobenius_distance(truncated, exact);
  const double fro = frobenius_norm(a);
  const double c = fro == 0.0 ? 1.0 : c_coherence(a);
  out.rhs = c * static_cast<double>(w.cols()) * fro /
            (alpha * std::sqrt(static_cast<double>(a.rows())));
  out.holds = out.lhs <= out.rhs + 1e-8;
  return out;
}

struct LinfBoundCheck {
  double observed_linf = 0.0;
  double bound = 0.0;
  double mu0 = 0.0;
  std::size_t rank = 0;
  // Whether m ≥ 40·k(r+k)·ln(r+k), the size regime the perturbation
  // argument needs; reported, not enforced.
  bool perturb_condition_met = false;
};

/// Forms Ỹ = AΩ + N (Ω standard Gaussian n×k, N i.i.d. N(0, sigma²)),
/// orthonormalizes it and compares the largest basis entry against
/// sqrt(4 r μ0 / m) + 8 sqrt(k ln m / m).
inline LinfBoundCheck linf_basis_bound_check(const DenseMatrix& a, std::size_t k,
                                             double sigma, RngSeed seed,
                                             double rank_tolerance = kDefaultRankTolerance) {
  const std::size_t m = a.rows();
  require(k >= 1 && m >= k, "linf_basis_bound_check: need 1 <= k <= m");
  require(sigma >= 0.0, "linf_basis_bound_check: sigma must be non-negative");
  const Mu0Result mu = mu0_coherence(a, rank_tolerance);

  const DenseMatrix omega =
      gaussian_matrix(a.cols(), k, 0.0, 1.0, derive_seed(seed, stream::kSketch));
  DenseMatrix y = multiply(a, omega);
  if (sigma > 0.0)
    y = add(y, gaussian_matrix(m, k, 0.0, sigma, derive_seed(seed, stream::kRangeNoise)));
  const DenseMatrix w = gram_schmidt(y);

  LinfBoundCheck out;
  out.mu0 = mu.mu0;
  out.rank = mu.rank_used;
  out.observed_linf = max_abs(w);
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  const double rd = static_cast<double>(mu.rank_used);
  out.bound = std::sqrt(kLinfLeadingConstant * rd * mu.mu0 / md) +
              kLinfLogConstant * std::sqrt(kd * std::log(md) / md);
  out.perturb_condition_met =
      md >= kPerturbConditionConstant * kd * (rd + kd) * std::log(rd + kd);
  return out;
}

}  // namespace pfp
