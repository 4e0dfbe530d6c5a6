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

// Command-line front end: gen, coherence, hmt, rr, pfp, sweep, attack.
//
// Exit codes: 0 success, 1 usage error, 2 data error. Data goes to --output
// (or stdout); diagnostics and warnings go to stderr.

#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfp/pfp.hpp"

namespace pfp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// Opens --output when given, otherwise hands back stdout.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
};

struct RunOptions {
  std::string input;
  std::string output;
  std::string format = "dense";
  std::size_t rank = 0;
  std::optional<std::size_t> oversample;
  double epsilon = 1.0;
  double delta = 1e-5;
  std::string alpha;
  std::string mode = "mu0";
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  bool record_time = false;
};

inline CoherenceMode parse_mode(const std::string& mode) {
  if (mode == "c") return CoherenceMode::c_coherent;
  if (mode == "mu0") return CoherenceMode::mu0_coherent;
  throw InvalidArgument("--mode must be 'c' or 'mu0'");
}

inline harness::MatrixFormat parse_matrix_format(const std::string& format) {
  if (format == "dense") return harness::MatrixFormat::dense;
  if (format == "sparse") return harness::MatrixFormat::sparse;
  throw InvalidArgument("--format must be dense or sparse here");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, const std::string& flag, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    if (item.empty()) throw InvalidArgument(flag + ": empty list element");
    try {
      out.push_back(parse(item));
    } catch (const std::logic_error&) {
      throw InvalidArgument(flag + ": cannot parse '" + item + "'");
    }
  }
  return out;
}

inline std::vector<std::size_t> parse_counts(const std::string& text, const std::string& flag) {
  return parse_list<std::size_t>(text, flag, [](const std::string& s) {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  });
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  return parse_list<double>(text, flag, [](const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  });
}

inline nlohmann::ordered_json to_json(const CoherenceReport& r) {
  nlohmann::ordered_json j;
  j["c_coherence"] = r.c_coherence;
  j["mu0_coherence"] = r.mu0_coherence;
  j["rank_used"] = r.rank_used;
  j["max_row_norm"] = r.max_row_norm;
  j["frobenius_norm"] = r.frobenius_norm;
  j["row_norms"] = r.row_norms;
  return j;
}

inline nlohmann::ordered_json to_json(const AttackReport& r) {
  nlohmann::ordered_json j;
  j["mechanism"] = r.mechanism_label;
  j["noise_sigma_effective"] = r.noise_sigma_effective;
  j["hamming_distance"] = r.hamming_distance;
  j["recovered_fraction"] = r.recovered_fraction;
  return j;
}

inline void print_diagnostics(std::ostream& err, const ApproxResult& r) {
  err << "achieved_error=" << harness::format_double(r.achieved_error)
      << " alpha=" << harness::format_double(r.alpha_used)
      << " rho_range=" << harness::format_double(r.rho_range)
      << " rho_proj=" << harness::format_double(r.rho_proj);
  if (r.budget_spent)
    err << " budget_spent=(" << harness::format_double(r.budget_spent->epsilon()) << ", "
        << harness::format_double(r.budget_spent->delta()) << ")";
  if (r.projection_noise_bound > 0.0)
    err << " projection_noise=" << harness::format_double(r.projection_noise_norm)
        << " projection_bound=" << harness::format_double(r.projection_noise_bound);
  err << '\n';
}

// Shared body of hmt / rr / pfp.
inline int run_algorithm(harness::Algorithm algorithm, const RunOptions& o, Streams io) {
  if (o.input.empty()) throw InvalidArgument("--input is required");
  if (o.rank == 0) throw InvalidArgument("--rank is required");
  const DenseMatrix a = harness::load_matrix(o.input);

  harness::ExperimentConfig config;
  config.algorithm = algorithm;
  config.target_rank = o.rank;
  config.oversampling = o.oversample.value_or(o.rank + 1);
  config.trials = o.trials;
  config.base_seed = o.seed;
  config.record_time = o.record_time;
  if (algorithm != harness::Algorithm::hmt) config.budget = PrivacyBudget(o.epsilon, o.delta);
  SketchParams(config.target_rank, config.oversampling, RngSeed{o.seed}).validate_for(a);

  if (algorithm == harness::Algorithm::pfp) {
    config.mode = parse_mode(o.mode);
    if (o.alpha.empty()) {
      if (config.mode == CoherenceMode::c_coherent)
        throw InvalidArgument("--mode c needs --alpha <value> or --alpha auto");
    } else if (o.alpha == "auto") {
      if (config.mode != CoherenceMode::c_coherent)
        throw InvalidArgument("--alpha auto is only meaningful with --mode c");
      io.err << "WARNING: --alpha auto measures C and the Frobenius norm directly from the "
                "input; that auxiliary computation is NOT differentially private. Supply "
                "--alpha explicitly or use --mode mu0 for an end-to-end private release.\n";
    } else {
      const double alpha = parse_reals(o.alpha, "--alpha").front();
      if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("--alpha must lie in (0, 1]");
      config.alpha = alpha;
    }
    if (config.mode == CoherenceMode::mu0_coherent &&
        std::min(a.rows(), a.cols()) <= kSvdOracleMaxDimension && frobenius_norm(a) > 0.0) {
      const std::size_t data_rank =
          numerical_rank(svd_oracle(a).singular_values, kDefaultRankTolerance);
      if (!mu0_regime_satisfied(a.rows(), data_rank, config.target_rank + config.oversampling))
        io.err << "WARNING: m = " << a.rows() << " is below R*k*ln(R) for data rank R = "
               << data_rank << "; the mu0 error bound does not apply.\n";
    }
  }

  OutputTarget target(o.output, io.out);
  if (o.format == "csv") {
    const auto records = harness::run_experiment(a, config);
    harness::write_csv_header(target.stream());
    for (const auto& rec : records) harness::write_csv_row(target.stream(), rec);
    return kExitOk;
  }
  const harness::MatrixFormat format = parse_matrix_format(o.format);
  if (o.trials != 1) throw InvalidArgument("--trials > 1 requires --format csv");
  const ApproxResult result = harness::run_single(a, config, RngSeed{o.seed});
  print_diagnostics(io.err, result);
  harness::write_matrix(target.stream(), result.b, format);
  return kExitOk;
}

}  // namespace detail

/// Parses args (without the program name) and runs the chosen subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private low-rank approximation toolkit", "pfp"};
  app.require_subcommand(1);

  // gen
  harness::GeneratorSpec gen_spec;
  std::string gen_kind = "low_mu0";
  std::string gen_output, gen_format = "dense";
  std::uint64_t gen_seed = 0;
  std::optional<double> gen_scale;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic matrix");
  gen->add_option("--kind", gen_kind, "low_mu0 | spiked | power_law | netflix_like");
  gen->add_option("--m", gen_spec.m, "Rows")->required();
  gen->add_option("--n", gen_spec.n, "Columns")->required();
  gen->add_option("--rank", gen_spec.rank, "Rank of the synthetic signal");
  gen->add_option("--decay", gen_spec.spectrum_decay, "Spectrum decay exponent");
  gen->add_option("--density", gen_spec.density, "Nonzero fraction (netflix_like)");
  gen->add_option("--value-lo", gen_spec.value_lo, "Smallest rating (netflix_like)");
  gen->add_option("--value-hi", gen_spec.value_hi, "Largest rating (netflix_like)");
  gen->add_option("--scale", gen_scale, "Top singular value (default sqrt(m*n))");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--format", gen_format, "dense | sparse");
  gen->add_option("--output", gen_output, "Output path (default stdout)");

  // coherence
  std::string coh_input, coh_output;
  double coh_tol = kDefaultRankTolerance;
  auto* coh = app.add_subcommand("coherence", "Measure C- and mu0-coherence");
  coh->add_option("--input", coh_input, "Matrix file")->required();
  coh->add_option("--rank-tol", coh_tol, "Relative singular value cutoff for the rank");
  coh->add_option("--output", coh_output, "Output path (default stdout)");

  // hmt / rr / pfp
  detail::RunOptions hmt_o, rr_o, pfp_o;
  auto add_run_options = [](CLI::App* sub, detail::RunOptions& o, bool is_private) {
    sub->add_option("--input", o.input, "Matrix file")->required();
    sub->add_option("--output", o.output, "Output path (default stdout)");
    sub->add_option("--format", o.format, "dense | sparse | csv");
    sub->add_option("--rank", o.rank, "Target rank r")->required();
    sub->add_option("--oversample", o.oversample, "Oversampling p (default r + 1)");
    sub->add_option("--trials", o.trials, "Trials (csv format only)");
    sub->add_option("--seed", o.seed, "Base RNG seed; trial i uses seed + i");
    sub->add_flag("--record-time", o.record_time, "Fill wall_time_ms in csv output");
    if (is_private) {
      sub->add_option("--epsilon", o.epsilon, "Privacy epsilon in (0, 1]");
      sub->add_option("--delta", o.delta, "Privacy delta in (0, 1)");
    }
  };
  auto* hmt = app.add_subcommand("hmt", "Non-private randomized range finder baseline");
  add_run_options(hmt, hmt_o, false);
  auto* rr = app.add_subcommand("rr", "Randomized response then best rank-k");
  add_run_options(rr, rr_o, true);
  auto* pfp_cmd = app.add_subcommand("pfp", "Private find and project");
  add_run_options(pfp_cmd, pfp_o, true);
  pfp_cmd->add_option("--alpha", pfp_o.alpha, "Pruning threshold in (0, 1] or 'auto'");
  pfp_cmd->add_option("--mode", pfp_o.mode, "c | mu0");

  // sweep
  std::string sw_algorithms = "rr,pfp", sw_kinds = "low_mu0", sw_m, sw_n, sw_k,
              sw_eps = "1", sw_output, sw_mode = "mu0", sw_alpha;
  std::size_t sw_rank = 2, sw_trials = 1;
  std::optional<std::size_t> sw_data_rank;
  double sw_delta = 1e-5, sw_decay = 1.0;
  std::uint64_t sw_seed = 0;
  bool sw_record_time = false;
  auto* sw = app.add_subcommand("sweep", "Grid of experiments written as CSV");
  sw->add_option("--algorithms", sw_algorithms, "Comma list of rr, hmt, pfp");
  sw->add_option("--kinds", sw_kinds, "Comma list of generator kinds");
  sw->add_option("--m", sw_m, "Comma list of row counts")->required();
  sw->add_option("--n", sw_n, "Comma list of column counts")->required();
  sw->add_option("--k", sw_k, "Comma list of sketch sizes k = r + p")->required();
  sw->add_option("--epsilon", sw_eps, "Comma list of epsilons");
  sw->add_option("--delta", sw_delta, "Privacy delta");
  sw->add_option("--rank", sw_rank, "Target rank r");
  sw->add_option("--data-rank", sw_data_rank, "Rank of generated matrices (default r)");
  sw->add_option("--decay", sw_decay, "Spectrum decay exponent");
  sw->add_option("--mode", sw_mode, "c | mu0 (pfp)");
  sw->add_option("--alpha", sw_alpha, "Pruning threshold for pfp");
  sw->add_option("--trials", sw_trials, "Trials per cell");
  sw->add_option("--seed", sw_seed, "Base RNG seed");
  sw->add_option("--output", sw_output, "Output path (default stdout)");
  sw->add_option("--format", "csv only")->check(CLI::IsMember({"csv"}));
  sw->add_flag("--record-time", sw_record_time, "Fill wall_time_ms");

  // attack
  std::size_t at_bits = 10000, at_k = 1, at_m = 0, at_trials = 1, at_rank = 2;
  std::optional<std::size_t> at_oversample;
  std::string at_mechanism = "rr", at_output, at_mode = "mu0";
  double at_eps = 1.0, at_delta = 1e-5, at_sigma = 0.0;
  std::uint64_t at_seed = 0;
  auto* at = app.add_subcommand("attack", "Reconstruction attack on an encoded bit database");
  at->add_option("--bits", at_bits, "Database length n' (multiple of --k)");
  at->add_option("--k", at_k, "Rows that carry the database");
  at->add_option("--m", at_m, "Matrix rows (default k)");
  at->add_option("--mechanism", at_mechanism, "identity | rr | pfp | gaussian");
  at->add_option("--sigma", at_sigma, "Noise stddev for the uncalibrated gaussian mechanism");
  at->add_option("--epsilon", at_eps, "Privacy epsilon (rr, pfp)");
  at->add_option("--delta", at_delta, "Privacy delta (rr, pfp)");
  at->add_option("--rank", at_rank, "pfp target rank");
  at->add_option("--oversample", at_oversample, "pfp oversampling (default rank + 1)");
  at->add_option("--mode", at_mode, "pfp mode c | mu0");
  at->add_option("--trials", at_trials, "Independent trials");
  at->add_option("--seed", at_seed, "Base RNG seed");
  at->add_option("--output", at_output, "Output path (default stdout)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("pfp");
  for (const auto& a : args) argv_storage.push_back(a);
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const detail::Streams io{out, err};
  try {
    if (gen->parsed()) {
      gen_spec.kind = harness::parse_generator_kind(gen_kind);
      gen_spec.scale = gen_scale;
      gen_spec.seed = RngSeed{gen_seed};
      const auto format = detail::parse_matrix_format(gen_format);
      const DenseMatrix a = harness::generate(gen_spec);
      detail::OutputTarget target(gen_output, out);
      harness::write_matrix(target.stream(), a, format);
    } else if (coh->parsed()) {
      const DenseMatrix a = harness::load_matrix(coh_input);
      if (frobenius_norm(a) == 0.0) throw DataError("coherence is undefined for a zero matrix");
      const CoherenceReport report = coherence_report(a, coh_tol);
      detail::OutputTarget target(coh_output, out);
      target.stream() << detail::to_json(report).dump(2) << '\n';
    } else if (hmt->parsed()) {
      return detail::run_algorithm(harness::Algorithm::hmt, hmt_o, io);
    } else if (rr->parsed()) {
      return detail::run_algorithm(harness::Algorithm::rr, rr_o, io);
    } else if (pfp_cmd->parsed()) {
      return detail::run_algorithm(harness::Algorithm::pfp, pfp_o, io);
    } else if (sw->parsed()) {
      harness::SweepGrid grid;
      grid.algorithms = detail::parse_list<harness::Algorithm>(
          sw_algorithms, "--algorithms", [](const std::string& s) { return harness::parse_algorithm(s); });
      grid.kinds = detail::parse_list<harness::GeneratorKind>(
          sw_kinds, "--kinds", [](const std::string& s) { return harness::parse_generator_kind(s); });
      grid.m_values = detail::parse_counts(sw_m, "--m");
      grid.n_values = detail::parse_counts(sw_n, "--n");
      grid.k_values = detail::parse_counts(sw_k, "--k");
      grid.epsilons = detail::parse_reals(sw_eps, "--epsilon");
      for (double e : grid.epsilons) PrivacyBudget(e, sw_delta);
      grid.delta = sw_delta;
      grid.target_rank = sw_rank;
      grid.data_rank = sw_data_rank.value_or(sw_rank);
      grid.spectrum_decay = sw_decay;
      grid.mode = detail::parse_mode(sw_mode);
      if (!sw_alpha.empty()) grid.alpha = detail::parse_reals(sw_alpha, "--alpha").front();
      if (grid.mode == CoherenceMode::c_coherent && !grid.alpha)
        err << "WARNING: --mode c without --alpha selects alpha from the raw data; that "
               "auxiliary computation is NOT differentially private.\n";
      grid.trials = sw_trials;
      grid.base_seed = sw_seed;
      grid.record_time = sw_record_time;
      detail::OutputTarget target(sw_output, out);
      harness::sweep(grid, target.stream());
    } else if (at->parsed()) {
      const std::size_t m = at_m == 0 ? at_k : at_m;
      Mechanism mechanism;
      if (at_mechanism == "identity") {
        mechanism = identity_mechanism();
      } else if (at_mechanism == "rr") {
        mechanism = randomized_response_mechanism(PrivacyBudget(at_eps, at_delta));
      } else if (at_mechanism == "gaussian") {
        mechanism = gaussian_noise_mechanism(at_sigma);
      } else if (at_mechanism == "pfp") {
        const SketchParams params(at_rank, at_oversample.value_or(at_rank + 1), RngSeed{at_seed});
        mechanism = pfp_mechanism(params, PrivacyBudget(at_eps, at_delta), detail::parse_mode(at_mode));
      } else {
        throw InvalidArgument("--mechanism must be identity, rr, pfp or gaussian");
      }
      require(at_trials >= 1, "--trials must be >= 1");
      nlohmann::ordered_json result;
      result["mechanism"] = mechanism.label;
      result["bits"] = at_bits;
      result["k"] = at_k;
      result["m"] = m;
      nlohmann::ordered_json reports = nlohmann::ordered_json::array();
      double total = 0.0;
      for (std::size_t t = 0; t < at_trials; ++t) {
        const RngSeed seed{at_seed + t};
        const BitDatabase db = BitDatabase::random(at_bits, seed);
        const AttackReport report = attack(db, m, at_k, mechanism, seed);
        total += report.recovered_fraction;
        auto j = detail::to_json(report);
        j["trial_seed"] = seed.value;
        reports.push_back(std::move(j));
      }
      result["mean_recovered_fraction"] = total / static_cast<double>(at_trials);
      result["trials"] = std::move(reports);
      detail::OutputTarget target(at_output, out);
      target.stream() << result.dump(2) << '\n';
    }
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace pfp::cli
