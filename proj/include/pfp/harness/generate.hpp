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

// Synthetic matrix generators.
//
//   low_mu0       U diag(σ) Vᵀ with exactly `rank` nonzero σ_j = scale·j^(−decay)
//                 and U, V orthonormalized random-sign factors (μ0 = O(1) w.h.p.).
//   power_law     same construction at full rank min(m, n).
//   spiked        row 0 carries norm `scale`; the other rows hold a
//                 rank-(rank−1) low_mu0 background at 0.1·scale. With rank 1
//                 the matrix is a single nonzero row, C = √m.
//   netflix_like  sparse integer ratings in [value_lo, value_hi] at the
//                 requested density with a Zipf row-count profile whose
//                 heaviest row holds the published share of all ratings.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfp/error.hpp"
#include "pfp/linalg.hpp"
#include "pfp/matrix.hpp"
#include "pfp/random.hpp"

namespace pfp::harness {

// Published statistics of the Netflix prize data set.
inline constexpr double kNetflixRatings = 100'480'507.0;
inline constexpr double kNetflixMovies = 17'770.0;
inline constexpr double kNetflixUsers = 480'189.0;
inline constexpr double kNetflixTopMovieRatings = 227'715.0;
inline constexpr double kNetflixDensity = kNetflixRatings / (kNetflixMovies * kNetflixUsers);
inline constexpr double kNetflixMaxRowShare = kNetflixTopMovieRatings / kNetflixRatings;

enum class GeneratorKind { low_mu0, spiked, power_law, netflix_like };

inline std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::low_mu0: return "low_mu0";
    case GeneratorKind::spiked: return "spiked";
    case GeneratorKind::power_law: return "power_law";
    case GeneratorKind::netflix_like: return "netflix_like";
  }
  return "unknown";
}

inline GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "low_mu0") return GeneratorKind::low_mu0;
  if (name == "spiked") return GeneratorKind::spiked;
  if (name == "power_law") return GeneratorKind::power_law;
  if (name == "netflix_like") return GeneratorKind::netflix_like;
  throw InvalidArgument("unknown generator kind '" + std::string(name) + "'");
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::low_mu0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t rank = 1;
  double spectrum_decay = 1.0;
  double density = kNetflixDensity;
  int value_lo = 1;
  int value_hi = 5;
  std::optional<double> scale;  // top singular value; defaults to sqrt(m·n)
  RngSeed seed;

  double effective_scale() const {
    return scale.value_or(std::sqrt(static_cast<double>(m) * static_cast<double>(n)));
  }

  void validate() const {
    require(m >= 1 && n >= 1, "GeneratorSpec: m and n must be positive");
    require(rank >= 1 && rank <= std::min(m, n), "GeneratorSpec: rank must lie in [1, min(m, n)]");
    require(spectrum_decay > 0.0 && std::isfinite(spectrum_decay),
            "GeneratorSpec: spectrum_decay must be positive");
    require(density > 0.0 && density <= 1.0, "GeneratorSpec: density must lie in (0, 1]");
    require(density * static_cast<double>(m) * static_cast<double>(n) >=
                static_cast<double>(rank),
            "GeneratorSpec: density * m * n must be at least rank");
    require(value_lo <= value_hi, "GeneratorSpec: value_lo must not exceed value_hi");
    require(effective_scale() > 0.0 && std::isfinite(effective_scale()),
            "GeneratorSpec: scale must be positive");
  }
};

namespace detail {

// Orthonormalized random-sign matrix. Every row starts with squared norm
// exactly cols, which keeps the row norms of the basis close to flat.
inline DenseMatrix orthonormal_factor(std::size_t rows, std::size_t cols, RngSeed seed) {
  CounterRng rng(seed);
  DenseMatrix signs(rows, cols);
  for (double& v : signs.data()) v = (rng.next_u64() >> 63) != 0 ? 1.0 : -1.0;
  DenseMatrix q = gram_schmidt(signs);
  if (q.cols() == cols) return q;
  // Rank-deficient sign draw (small sizes): append Gaussian columns and keep
  // the first `cols` basis vectors.
  const DenseMatrix extra = gaussian_matrix(rows, cols, 0.0, 1.0, derive_seed(seed, 1));
  DenseMatrix both(rows, 2 * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      both(i, j) = signs(i, j);
      both(i, cols + j) = extra(i, j);
    }
  q = gram_schmidt(both);
  DenseMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = q(i, j);
  return out;
}

// Σ_j σ_j u_j v_jᵀ with σ_j = scale · (j+1)^(−decay).
inline DenseMatrix factored(std::size_t m, std::size_t n, std::size_t rank, double scale,
                            double decay, RngSeed seed) {
  const DenseMatrix u = orthonormal_factor(m, rank, derive_seed(seed, 1));
  const DenseMatrix v = orthonormal_factor(n, rank, derive_seed(seed, 2));
  const std::size_t r = std::min(u.cols(), v.cols());
  DenseMatrix scaled_vt(r, n);
  for (std::size_t j = 0; j < r; ++j) {
    const double s = scale * std::pow(static_cast<double>(j + 1), -decay);
    for (std::size_t i = 0; i < n; ++i) scaled_vt(j, i) = s * v(i, j);
  }
  DenseMatrix ur(m, r);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < r; ++j) ur(i, j) = u(i, j);
  return multiply(ur, scaled_vt);
}

inline std::vector<std::size_t> distribute(std::vector<double> weights, std::size_t total,
                                           std::size_t cap) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t t = 0; assigned < total; ++t, ++assigned)
    ++counts[remainders[t % remainders.size()].second];
  // Move any excess over the cap to rows that still have room, lightest last.
  std::size_t excess = 0;
  for (auto& c : counts)
    if (c > cap) {
      excess += c - cap;
      c = cap;
    }
  for (std::size_t i = 0; excess > 0 && i < counts.size(); ++i) {
    const std::size_t room = cap - counts[i];
    const std::size_t take = std::min(room, excess);
    counts[i] += take;
    excess -= take;
  }
  return counts;
}

}  // namespace detail

/// Per-row rating counts for a netflix_like matrix, heaviest row first.
///
/// The total is round(density·m·n); counts follow (i+1)^(−s) with s chosen by
/// bisection so the heaviest row holds max_row_share of the total. When that
/// share is below 1/m (small m) the profile is flat.
inline std::vector<std::size_t> netflix_row_plan(std::size_t m, std::size_t n, double density,
                                                 double max_row_share = kNetflixMaxRowShare) {
  require(m >= 1 && n >= 1, "netflix_row_plan: m and n must be positive");
  require(density > 0.0 && density <= 1.0, "netflix_row_plan: density must lie in (0, 1]");
  const std::size_t total = static_cast<std::size_t>(
      std::llround(density * static_cast<double>(m) * static_cast<double>(n)));
  auto share_for = [m](double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += std::pow(static_cast<double>(i + 1), -s);
    return 1.0 / sum;
  };
  double exponent = 0.0;
  if (max_row_share > share_for(0.0)) {
    double lo = 0.0, hi = 8.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (share_for(mid) < max_row_share ? lo : hi) = mid;
    }
    exponent = 0.5 * (lo + hi);
  }
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < m; ++i)
    weights[i] = std::pow(static_cast<double>(i + 1), -exponent);
  return detail::distribute(std::move(weights), total, n);
}

inline DenseMatrix generate(const GeneratorSpec& spec) {
  spec.validate();
  const RngSeed base = derive_seed(spec.seed, stream::kGenerator);
  const double scale = spec.effective_scale();
  switch (spec.kind) {
    case GeneratorKind::low_mu0:
      return detail::factored(spec.m, spec.n, spec.rank, scale, spec.spectrum_decay, base);
    case GeneratorKind::power_law:
      return detail::factored(spec.m, spec.n, std::min(spec.m, spec.n), scale,
                              spec.spectrum_decay, base);
    case GeneratorKind::spiked: {
      DenseMatrix a(spec.m, spec.n);
      std::vector<double> spike = gaussian_vector(spec.n, derive_seed(base, 3));
      const double norm = norm2(spike);
      for (std::size_t j = 0; j < spec.n; ++j) a(0, j) = scale * spike[j] / norm;
      if (spec.rank > 1) {
        require(spec.rank - 1 <= spec.m - 1, "GeneratorSpec: spiked rank exceeds m");
        const DenseMatrix background = detail::factored(
            spec.m - 1, spec.n, spec.rank - 1, 0.1 * scale, spec.spectrum_decay, base);
        for (std::size_t i = 1; i < spec.m; ++i)
          for (std::size_t j = 0; j < spec.n; ++j) a(i, j) = background(i - 1, j);
      }
      return a;
    }
    case GeneratorKind::netflix_like: {
      const auto plan = netflix_row_plan(spec.m, spec.n, spec.density);
      CounterRng rng(derive_seed(base, 4));
      std::vector<std::size_t> row_order(spec.m);
      std::iota(row_order.begin(), row_order.end(), std::size_t{0});
      for (std::size_t i = spec.m; i > 1; --i) std::swap(row_order[i - 1], row_order[rng.below(i)]);
      const auto span = static_cast<std::uint64_t>(spec.value_hi - spec.value_lo + 1);
      DenseMatrix a(spec.m, spec.n);
      std::vector<std::size_t> columns(spec.n);
      for (std::size_t r = 0; r < spec.m; ++r) {
        std::iota(columns.begin(), columns.end(), std::size_t{0});
        const std::size_t row = row_order[r];
        for (std::size_t t = 0; t < plan[r]; ++t) {
          const std::size_t pick = t + rng.below(spec.n - t);
          std::swap(columns[t], columns[pick]);
          a(row, columns[t]) = static_cast<double>(spec.value_lo) +
                               static_cast<double>(rng.below(span));
        }
      }
      return a;
    }
  }
  throw InvalidArgument("generate: unknown kind");
}

}  // namespace pfp::harness
