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

// Plain-text matrix files (UTF-8, LF line endings).
//
//   dense <m> <n>
//   <n space-separated values>      × m lines
//
//   sparse <m> <n> <nnz>
//   <i> <j> <value>                 × nnz lines, 0-based indices
//
// Values are written in the shortest form that round-trips exactly, so
// load(save(a)) == a bit for bit in the dense format.

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "pfp/error.hpp"
#include "pfp/matrix.hpp"

namespace pfp::harness {

enum class MatrixFormat { dense, sparse };

inline std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

inline void write_matrix(std::ostream& out, const DenseMatrix& a, MatrixFormat format) {
  if (format == MatrixFormat::dense) {
    out << "dense " << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const auto row = a.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j > 0) out << ' ';
        out << format_double(row[j]);
      }
      out << '\n';
    }
    return;
  }
  std::size_t nnz = 0;
  for (double v : a.data()) nnz += v != 0.0;
  out << "sparse " << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) out << i << ' ' << j << ' ' << format_double(a(i, j)) << '\n';
}

inline void save_matrix(const DenseMatrix& a, const std::string& path,
                        MatrixFormat format = MatrixFormat::dense) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_matrix(out, a, format);
  if (!out) throw DataError("failed writing '" + path + "'");
}

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline double parse_value(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "invalid number '" + std::string(token) + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + std::string(token) + "'");
  return v;
}

inline std::size_t parse_count(std::string_view token, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "invalid count '" + std::string(token) + "'");
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line (without the terminator); false at end of input.
  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

}  // namespace detail

inline DenseMatrix read_matrix(std::istream& in) {
  detail::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty input, expected a header");
  const auto header = detail::split_tokens(line);
  if (header.empty()) throw ParseError(1, "missing header");

  DenseMatrix a;
  if (header[0] == "dense") {
    if (header.size() != 3) throw ParseError(1, "expected 'dense <m> <n>'");
    const std::size_t m = detail::parse_count(header[1], 1);
    const std::size_t n = detail::parse_count(header[2], 1);
    a = DenseMatrix(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      if (!reader.next(line))
        throw ParseError(reader.number() + 1, "expected " + std::to_string(m) +
                                                  " rows, found " + std::to_string(i));
      const auto tokens = detail::split_tokens(line);
      if (tokens.size() != n)
        throw ParseError(reader.number(), "expected " + std::to_string(n) + " values, found " +
                                              std::to_string(tokens.size()));
      for (std::size_t j = 0; j < n; ++j) a(i, j) = detail::parse_value(tokens[j], reader.number());
    }
  } else if (header[0] == "sparse") {
    if (header.size() != 4) throw ParseError(1, "expected 'sparse <m> <n> <nnz>'");
    const std::size_t m = detail::parse_count(header[1], 1);
    const std::size_t n = detail::parse_count(header[2], 1);
    const std::size_t nnz = detail::parse_count(header[3], 1);
    a = DenseMatrix(m, n);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t t = 0; t < nnz; ++t) {
      if (!reader.next(line))
        throw ParseError(reader.number() + 1, "expected " + std::to_string(nnz) +
                                                  " entries, found " + std::to_string(t));
      const auto tokens = detail::split_tokens(line);
      if (tokens.size() != 3) throw ParseError(reader.number(), "expected '<i> <j> <value>'");
      const std::size_t i = detail::parse_count(tokens[0], reader.number());
      const std::size_t j = detail::parse_count(tokens[1], reader.number());
      if (i >= m || j >= n) throw ParseError(reader.number(), "index out of range");
      if (!seen.emplace(i, j).second) throw ParseError(reader.number(), "duplicate entry");
      a(i, j) = detail::parse_value(tokens[2], reader.number());
    }
  } else {
    throw ParseError(1, "unknown format '" + std::string(header[0]) + "'");
  }
  while (reader.next(line))
    if (!detail::split_tokens(line).empty())
      throw ParseError(reader.number(), "unexpected trailing data");
  return a;
}

inline DenseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_matrix(in);
}

inline DenseMatrix parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_matrix(in);
}

}  // namespace pfp::harness
