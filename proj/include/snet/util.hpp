//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace snet {

// Error taxonomy. The CLI maps categories onto exit codes and every message
// is a single line so logs stay machine-parsable.
enum class ErrorCategory { shape, numeric, format, config, io, state, train };

const char* to_string(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

 private:
  ErrorCategory cat_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error(ErrorCategory::shape, m) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error(ErrorCategory::numeric, m) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error(ErrorCategory::format, m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorCategory::io, m) {}
};
struct StateError : Error {
  explicit StateError(const std::string& m) : Error(ErrorCategory::state, m) {}
};
struct TrainError : Error {
  explicit TrainError(const std::string& m) : Error(ErrorCategory::train, m) {}
};

// Deterministic RNG. mt19937_64 output is fixed by the standard; the uniform
// mappings below avoid std::uniform_*_distribution, whose results are
// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // Uniform in [0,1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0,n). Rejection-free modulo bias is irrelevant at
  // our n (<2^32) but we reject anyway to keep the stream well-defined.
  uint64_t below(uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    // Fisher-Yates; std::shuffle's draw sequence is unspecified.
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent substream derived from (seed, tag).
  static uint64_t derive(uint64_t seed, uint64_t tag);
  Rng fork(uint64_t tag) const { return Rng(derive(seed_hint_, tag)); }

  // Remember the construction seed so fork() is a pure function of it.
  static Rng seeded(uint64_t seed) {
    Rng r(seed);
    r.seed_hint_ = seed;
    return r;
  }

 private:
  std::mt19937_64 eng_;
  uint64_t seed_hint_ = 0;
};

uint64_t splitmix64(uint64_t x);

// Lowercase-hex SHA-256 of a byte range.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);

// Canonical double formatting: shortest-exact via %.17g, round-trips through
// strtod bit-exactly.
std::string format_double(double v);
double parse_double(const std::string& s);

std::string shape_to_string(const std::vector<int64_t>& shape);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

}  // namespace snet
