// Copyright 2026 the sprfit authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPRFIT_COMMON_HPP_
#define SPRFIT_COMMON_HPP_

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace sprfit {

// Error taxonomy. The CLI maps these onto exit codes, everything else just
// throws and lets the caller decide.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (missing columns, empty files, shape
// mismatches between datasets and bases).
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure or exhausted computational budget inside a solver.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Bad configuration or usage (invalid parameter combinations).
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Baseline tolerances. All downstream thresholds derive from these two.
inline constexpr double kFeasTol = 1e-8;
inline constexpr double kOptTol = 1e-9;

// Feasibility tolerance, overridable through the TSCRR_TOL environment
// variable for experimentation.
inline double default_tolerance() {
  if (const char* env = std::getenv("TSCRR_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return kFeasTol;
}

// Deterministic RNG wrapper. mt19937_64 output is specified bit-exactly by
// the standard; the helpers below avoid std::uniform_real_distribution whose
// output differs between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    // 53-bit mantissa draw in [0, 1).
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // Inclusive range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(gen_() % span);
  }

  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sprfit

#endif  // SPRFIT_COMMON_HPP_
