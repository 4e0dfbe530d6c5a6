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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "pfp/error.hpp"
#include "pfp/matrix.hpp"
#include "pfp/random.hpp"

namespace pfp {

inline constexpr double kGramSchmidtDropTolerance = 1e-12;
inline constexpr double kOrthonormalityCheckTolerance = 1e-8;
inline constexpr double kJacobiTolerance = 1e-14;
inline constexpr int kJacobiMaxSweeps = 60;
inline constexpr std::size_t kSvdOracleMaxDimension = 1024;

namespace detail {

// Column-major scratch: column j lives in cols[j] (contiguous).
using Columns = std::vector<std::vector<double>>;

inline Columns to_columns(const DenseMatrix& a) {
  Columns c(a.cols(), std::vector<double>(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) c[j][i] = r[j];
  }
  return c;
}

inline DenseMatrix from_columns(const Columns& c, std::size_t rows) {
  DenseMatrix a(rows, c.size());
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) a(i, j) = c[j][i];
  return a;
}

inline void axpy(double s, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

// Orthogonalizes v against basis in place with up to three MGS passes; a
// further pass runs only while a pass removed more than 1 − 1/√2 of the norm.
inline double orthogonalize(const Columns& basis, std::vector<double>& v) {
  double before = norm2(v);
  for (int pass = 0; pass < 3; ++pass) {
    for (const auto& q : basis) axpy(-dot(q, v), q, v);
    const double after = norm2(v);
    if (after >= before * std::numbers::sqrt2 / 2.0) return after;
    before = after;
  }
  return before;
}

}  // namespace detail

/// Orthonormal basis for range(y) by modified Gram–Schmidt with
/// re-orthogonalization. A column whose residual falls to at most
/// drop_tolerance × (its initial norm) is dropped, so the result may have
/// fewer columns than y.
inline DenseMatrix gram_schmidt(
    const DenseMatrix& y, double drop_tolerance = kGramSchmidtDropTolerance) {
  detail::Columns basis;
  basis.reserve(y.cols());
  for (auto& v : detail::to_columns(y)) {
    const double initial = norm2(v);
    if (initial == 0.0) continue;
    const double residual = detail::orthogonalize(basis, v);
    if (residual <= drop_tolerance * initial) continue;
    for (double& x : v) x /= residual;
    basis.push_back(std::move(v));
  }
  return detail::from_columns(basis, y.rows());
}

/// w (wᵀ a), the orthogonal projection of a onto range(w).
inline DenseMatrix project_onto_range(const DenseMatrix& w, const DenseMatrix& a) {
  require(w.rows() == a.rows(), "project_onto_range: row counts differ");
  require(orthonormality_error(w) <= kOrthonormalityCheckTolerance,
          "project_onto_range: basis columns are not orthonormal");
  return multiply(w, multiply_at_b(w, a));
}

/// Power-iteration estimate of the largest singular value.
inline double spectral_norm(const DenseMatrix& a, int iters, RngSeed seed) {
  require(iters >= 1, "spectral_norm: iters must be >= 1");
  if (a.empty()) return 0.0;
  std::vector<double> x =
      gaussian_vector(a.cols(), derive_seed(seed, stream::kPowerIteration));
  std::vector<double> ax(a.rows());
  auto apply = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < a.rows(); ++i) ax[i] = dot(a.row(i), v);
  };
  auto normalize = [](std::vector<double>& v) {
    const double n = norm2(v);
    if (n == 0.0) return false;
    for (double& e : v) e /= n;
    return true;
  };
  if (!normalize(x)) return 0.0;
  for (int it = 0; it < iters; ++it) {
    apply(x);
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) detail::axpy(ax[i], a.row(i), x);
    if (!normalize(x)) return 0.0;
  }
  apply(x);
  return norm2(ax);
}

struct SvdResult {
  DenseMatrix u;                       // m × d, orthonormal columns
  std::vector<double> singular_values;  // d values, non-increasing
  DenseMatrix vt;                      // d × n, orthonormal rows
};

namespace detail {

// In-place Householder QR of the columns of x (each of length n, n ≥ d).
// On return r holds the d×d upper triangle by columns and q the thin
// orthonormal factor by columns.
inline void householder_qr(Columns& x, std::size_t n, Columns& r, Columns& q) {
  const std::size_t d = x.size();
  Columns reflectors(d);
  std::vector<double> betas(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    auto& col = x[j];
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = col[j] > 0.0 ? -norm : norm;
    std::vector<double> v(n, 0.0);
    for (std::size_t i = j; i < n; ++i) v[i] = col[i];
    v[j] -= alpha;
    double beta = 0.0;
    for (std::size_t i = j; i < n; ++i) beta += v[i] * v[i];
    col[j] = alpha;
    for (std::size_t i = j + 1; i < n; ++i) col[i] = 0.0;
    if (beta == 0.0) continue;
    for (std::size_t k = j + 1; k < d; ++k) {
      auto& c = x[k];
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += v[i] * c[i];
      s *= 2.0 / beta;
      for (std::size_t i = j; i < n; ++i) c[i] -= s * v[i];
    }
    reflectors[j] = std::move(v);
    betas[j] = beta;
  }
  r.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i <= j; ++i) r[j][i] = x[j][i];
  q.assign(d, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < d; ++j) q[j][j] = 1.0;
  for (std::size_t t = d; t-- > 0;) {
    if (betas[t] == 0.0) continue;
    const auto& v = reflectors[t];
    for (std::size_t k = t; k < d; ++k) {
      auto& c = q[k];
      double s = 0.0;
      for (std::size_t i = t; i < n; ++i) s += v[i] * c[i];
      s *= 2.0 / betas[t];
      for (std::size_t i = t; i < n; ++i) c[i] -= s * v[i];
    }
  }
}

// One-sided Jacobi on the columns of m (square d×d): m·J = U·Σ.
inline void one_sided_jacobi(Columns& m, Columns& j) {
  const std::size_t d = m.size();
  j.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) j[i][i] = 1.0;
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        auto& cp = m[p];
        auto& cq = m[q];
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          alpha += cp[i] * cp[i];
          beta += cq[i] * cq[i];
          gamma += cp[i] * cq[i];
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < d; ++i) {
          const double x = cp[i], y = cq[i];
          cp[i] = c * x - s * y;
          cq[i] = s * x + c * y;
        }
        auto& jp = j[p];
        auto& jq = j[q];
        for (std::size_t i = 0; i < d; ++i) {
          const double x = jp[i], y = jq[i];
          jp[i] = c * x - s * y;
          jq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
}

// Replaces the flagged (null) columns of u with unit vectors orthogonal to
// every other column.
inline void complete_basis(Columns& u, const std::vector<bool>& is_null) {
  const std::size_t n = u.empty() ? 0 : u[0].size();
  Columns kept;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (!is_null[j]) kept.push_back(u[j]);
  std::size_t next_basis = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!is_null[j]) continue;
    for (; next_basis < n; ++next_basis) {
      std::vector<double> e(n, 0.0);
      e[next_basis] = 1.0;
      const double r = orthogonalize(kept, e);
      if (r > 0.5) {
        for (double& x : e) x /= r;
        u[j] = e;
        kept.push_back(std::move(e));
        ++next_basis;
        break;
      }
    }
  }
}

}  // namespace detail

/// Thin SVD of a desk-scale matrix by one-sided Jacobi.
///
/// The matrix (or its transpose, when wide) is first reduced to a d×d
/// triangle by Householder QR, d = min(m, n); the Jacobi iteration then runs
/// on that triangle. Left singular vectors for exactly-zero singular values
/// are completed to an orthonormal set.
inline SvdResult svd_oracle(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  require(m > 0 && n > 0, "svd_oracle: empty matrix");
  const std::size_t d = std::min(m, n);
  if (d > kSvdOracleMaxDimension)
    throw DataError("svd_oracle: min(rows, cols) = " + std::to_string(d) +
                    " exceeds the desk-scale limit of " +
                    std::to_string(kSvdOracleMaxDimension));
  const bool tall = m >= n;
  const std::size_t long_dim = tall ? m : n;

  detail::Columns x = tall ? detail::to_columns(a) : detail::to_columns(transpose(a));
  detail::Columns r, q;
  detail::householder_qr(x, long_dim, r, q);

  // Tall: a = Q R, Jacobi on R. Wide: aᵀ = Q R so a = Rᵀ Qᵀ, Jacobi on Rᵀ.
  detail::Columns work(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) work[j][i] = tall ? r[j][i] : r[i][j];
  detail::Columns jac;
  detail::one_sided_jacobi(work, jac);

  std::vector<double> sigma(d);
  std::vector<bool> is_null(d, false);
  for (std::size_t j = 0; j < d; ++j) {
    sigma[j] = norm2(work[j]);
    if (sigma[j] == 0.0) {
      is_null[j] = true;
    } else {
      for (double& v : work[j]) v /= sigma[j];
    }
  }
  detail::complete_basis(work, is_null);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  // small_left: d×d left factor of the triangle, small_right: its right factor.
  const detail::Columns& small_left = work;
  const detail::Columns& small_right = jac;

  SvdResult out;
  out.singular_values.resize(d);
  out.u = DenseMatrix(m, d);
  out.vt = DenseMatrix(d, n);
  for (std::size_t t = 0; t < d; ++t) {
    const std::size_t j = order[t];
    out.singular_values[t] = sigma[j];
    // The factor that stays d-dimensional is lifted by Q.
    std::vector<double> lifted(long_dim, 0.0);
    const auto& small = tall ? small_left[j] : small_right[j];
    for (std::size_t l = 0; l < d; ++l) detail::axpy(small[l], q[l], lifted);
    const auto& other = tall ? small_right[j] : small_left[j];
    if (tall) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, t) = lifted[i];
      for (std::size_t i = 0; i < n; ++i) out.vt(t, i) = other[i];
    } else {
      for (std::size_t i = 0; i < m; ++i) out.u(i, t) = other[i];
      for (std::size_t i = 0; i < n; ++i) out.vt(t, i) = lifted[i];
    }
  }
  return out;
}

/// u_k diag(σ_k) vt_k from an existing decomposition.
inline DenseMatrix best_rank_k(const SvdResult& svd, std::size_t k) {
  const std::size_t m = svd.u.rows();
  const std::size_t n = svd.vt.cols();
  k = std::min(k, svd.singular_values.size());
  DenseMatrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    auto row = out.row(i);
    for (std::size_t t = 0; t < k; ++t) {
      const double s = svd.u(i, t) * svd.singular_values[t];
      if (s == 0.0) continue;
      detail::axpy(s, svd.vt.row(t), row);
    }
  }
  return out;
}

/// sqrt(Σ_{j>k} σ_j²).
inline double tail_norm(std::span<const double> singular_values, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = k; j < singular_values.size(); ++j)
    s += singular_values[j] * singular_values[j];
  return std::sqrt(s);
}

inline double optimal_rank_k_error(const DenseMatrix& a, std::size_t k) {
  require(k <= std::min(a.rows(), a.cols()),
          "optimal_rank_k_error: k exceeds min(rows, cols)");
  return tail_norm(svd_oracle(a).singular_values, k);
}

/// Number of singular values strictly above relative_tolerance × σ_1.
inline std::size_t numerical_rank(std::span<const double> singular_values,
                                  double relative_tolerance) {
  if (singular_values.empty() || singular_values[0] == 0.0) return 0;
  const double cutoff = relative_tolerance * singular_values[0];
  return static_cast<std::size_t>(
      std::count_if(singular_values.begin(), singular_values.end(),
                    [cutoff](double s) { return s > cutoff; }));
}

}  // namespace pfp
