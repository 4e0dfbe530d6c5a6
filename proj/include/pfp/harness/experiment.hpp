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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pfp/coherence.hpp"
#include "pfp/error.hpp"
#include "pfp/harness/generate.hpp"
#include "pfp/linalg.hpp"
#include "pfp/matrix.hpp"
#include "pfp/privacy.hpp"
#include "pfp/sketch.hpp"

namespace pfp::harness {

enum class Algorithm { rr, hmt, pfp };

inline std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::rr: return "rr";
    case Algorithm::hmt: return "hmt";
    case Algorithm::pfp: return "pfp";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view name) {
  if (name == "rr") return Algorithm::rr;
  if (name == "hmt") return Algorithm::hmt;
  if (name == "pfp") return Algorithm::pfp;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

/// One trial. Fields that do not apply to an algorithm (ε, δ for hmt; α for
/// hmt and rr) are left empty.
struct ExperimentRecord {
  std::string algorithm;
  std::size_t m = 0, n = 0, k = 0, r = 0, p = 0;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> alpha;
  std::uint64_t trial_seed = 0;
  double error_frobenius = 0.0;
  double optimal_rank_k_error = 0.0;
  std::optional<double> c_coherence;
  std::optional<double> mu0_coherence;
  std::int64_t wall_time_ms = 0;
};

inline constexpr std::string_view kCsvHeader =
    "algorithm,m,n,k,r,p,epsilon,delta,alpha,trial_seed,error_frobenius,"
    "optimal_rank_k_error,c_coherence,mu0_coherence,wall_time_ms";

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::pfp;
  std::size_t target_rank = 2;
  std::size_t oversampling = 3;
  std::optional<PrivacyBudget> budget;  // required for rr and pfp
  CoherenceMode mode = CoherenceMode::mu0_coherent;
  std::optional<double> alpha;  // pfp only; empty = mode default
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  bool record_time = false;  // off keeps the output byte-reproducible
};

/// Everything about a matrix the records need that does not depend on the
/// trial; computed once per matrix.
struct MatrixProfile {
  std::vector<double> singular_values;
  std::optional<double> c_coherence;
  std::optional<double> mu0_coherence;
};

inline MatrixProfile profile_matrix(const DenseMatrix& a) {
  MatrixProfile profile;
  const SvdResult svd = svd_oracle(a);
  profile.singular_values = svd.singular_values;
  if (frobenius_norm(a) > 0.0) {
    profile.c_coherence = c_coherence(a);
    profile.mu0_coherence = mu0_from_svd(svd).mu0;
  }
  return profile;
}

inline ApproxResult run_single(const DenseMatrix& a, const ExperimentConfig& config,
                               RngSeed seed) {
  const SketchParams params(config.target_rank, config.oversampling, seed);
  switch (config.algorithm) {
    case Algorithm::hmt:
      return hmt_low_rank(a, params);
    case Algorithm::rr:
      require(config.budget.has_value(), "run_experiment: rr needs a privacy budget");
      params.validate_for(a);
      return rr_low_rank_baseline(a, params.k(), *config.budget, seed);
    case Algorithm::pfp:
      require(config.budget.has_value(), "run_experiment: pfp needs a privacy budget");
      return pfp(a, params, *config.budget, config.mode, config.alpha);
  }
  throw InvalidArgument("run_experiment: unknown algorithm");
}

/// Runs config.trials trials; trial i uses seed base_seed + i.
inline std::vector<ExperimentRecord> run_experiment(const DenseMatrix& a,
                                                    const ExperimentConfig& config,
                                                    const MatrixProfile& profile) {
  require(config.trials >= 1, "run_experiment: trials must be >= 1");
  const std::size_t k = config.target_rank + config.oversampling;
  std::vector<ExperimentRecord> records;
  records.reserve(config.trials);
  for (std::size_t t = 0; t < config.trials; ++t) {
    const RngSeed seed{config.base_seed + t};
    const auto start = std::chrono::steady_clock::now();
    const ApproxResult result = run_single(a, config, seed);
    const auto elapsed = std::chrono::steady_clock::now() - start;

    ExperimentRecord rec;
    rec.algorithm = std::string(to_string(config.algorithm));
    rec.m = a.rows();
    rec.n = a.cols();
    rec.k = k;
    rec.r = config.target_rank;
    rec.p = config.oversampling;
    if (config.algorithm != Algorithm::hmt && config.budget) {
      rec.epsilon = config.budget->epsilon();
      rec.delta = config.budget->delta();
    }
    if (config.algorithm == Algorithm::pfp) rec.alpha = result.alpha_used;
    rec.trial_seed = seed.value;
    rec.error_frobenius = result.achieved_error;
    rec.optimal_rank_k_error = tail_norm(profile.singular_values, k);
    rec.c_coherence = profile.c_coherence;
    rec.mu0_coherence = profile.mu0_coherence;
    if (config.record_time)
      rec.wall_time_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<ExperimentRecord> run_experiment(const DenseMatrix& a,
                                                    const ExperimentConfig& config) {
  return run_experiment(a, config, profile_matrix(a));
}

namespace detail {

inline std::string csv_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_optional(const std::optional<double>& v) {
  return v ? csv_real(*v) : std::string();
}

}  // namespace detail

inline void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

inline void write_csv_row(std::ostream& out, const ExperimentRecord& r) {
  out << r.algorithm << ',' << r.m << ',' << r.n << ',' << r.k << ',' << r.r << ',' << r.p << ','
      << detail::csv_optional(r.epsilon) << ',' << detail::csv_optional(r.delta) << ','
      << detail::csv_optional(r.alpha) << ',' << r.trial_seed << ','
      << detail::csv_real(r.error_frobenius) << ',' << detail::csv_real(r.optimal_rank_k_error)
      << ',' << detail::csv_optional(r.c_coherence) << ','
      << detail::csv_optional(r.mu0_coherence) << ',' << r.wall_time_ms << '\n';
}

/// Cartesian grid over (kind, m, n, k, ε). Within a cell every listed
/// algorithm runs `trials` trials on the same generated matrix; the target
/// rank is fixed and p = k − r.
struct SweepGrid {
  std::vector<GeneratorKind> kinds{GeneratorKind::low_mu0};
  std::vector<std::size_t> m_values;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> k_values;
  std::vector<double> epsilons{1.0};
  std::vector<Algorithm> algorithms{Algorithm::rr, Algorithm::pfp};
  std::size_t target_rank = 2;
  std::size_t data_rank = 2;
  double delta = 1e-5;
  double spectrum_decay = 1.0;
  CoherenceMode mode = CoherenceMode::mu0_coherent;
  std::optional<double> alpha;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  bool record_time = false;
};

/// Writes the header and one row per (cell, algorithm, trial), flushing after
/// each cell. Returns the records in the same order.
inline std::vector<ExperimentRecord> sweep(const SweepGrid& grid, std::ostream& out) {
  require(!grid.kinds.empty() && !grid.m_values.empty() && !grid.n_values.empty() &&
              !grid.k_values.empty() && !grid.epsilons.empty() && !grid.algorithms.empty(),
          "sweep: every grid axis needs at least one value");
  for (std::size_t k : grid.k_values)
    require(k >= grid.target_rank + 2, "sweep: each k must be at least rank + 2");

  std::vector<ExperimentRecord> all;
  write_csv_header(out);
  for (GeneratorKind kind : grid.kinds) {
    for (std::size_t m : grid.m_values) {
      for (std::size_t n : grid.n_values) {
        GeneratorSpec spec;
        spec.kind = kind;
        spec.m = m;
        spec.n = n;
        spec.rank = grid.data_rank;
        spec.spectrum_decay = grid.spectrum_decay;
        spec.seed = RngSeed{grid.base_seed};
        const DenseMatrix a = generate(spec);
        const MatrixProfile profile = profile_matrix(a);
        for (std::size_t k : grid.k_values) {
          for (double eps : grid.epsilons) {
            for (Algorithm algorithm : grid.algorithms) {
              ExperimentConfig config;
              config.algorithm = algorithm;
              config.target_rank = grid.target_rank;
              config.oversampling = k - grid.target_rank;
              config.budget = PrivacyBudget(eps, grid.delta);
              config.mode = grid.mode;
              config.alpha = grid.alpha;
              config.trials = grid.trials;
              config.base_seed = grid.base_seed;
              config.record_time = grid.record_time;
              for (auto& rec : run_experiment(a, config, profile)) {
                write_csv_row(out, rec);
                all.push_back(std::move(rec));
              }
            }
            out.flush();
          }
        }
      }
    }
  }
  return all;
}

}  // namespace pfp::harness
