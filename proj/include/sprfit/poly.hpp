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

#ifndef SPRFIT_POLY_HPP_
#define SPRFIT_POLY_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sprfit/common.hpp"

namespace sprfit {

/// Exponent vector of one multivariate monomial, x^alpha = prod_i x_i^a_i.
struct MultiIndex {
  std::vector<int> exponents;

  int total_degree() const {
    int s = 0;
    for (int e : exponents) s += e;
    return s;
  }

  bool operator==(const MultiIndex& other) const = default;

  std::string to_string() const;  // e.g. "x1*x3^2", "1" for the constant
};

/// Graded order: total degree ascending, ties broken by plain lexicographic
/// comparison of the exponent vectors. This is the canonical index mapping
/// every coefficient and selection vector in the library relies on.
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

/// All exponent vectors alpha ∈ N^n with sum(alpha) <= d, in canonical order.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int dimension, int degree, std::vector<MultiIndex> indices)
      : dimension_(dimension), degree_(degree), indices_(std::move(indices)) {}

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const MultiIndex& operator[](int j) const { return indices_[j]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

 private:
  int dimension_ = 0;
  int degree_ = 0;
  std::vector<MultiIndex> indices_;
};

inline constexpr std::int64_t kDefaultBasisCap = 1'000'000;

/// Number of monomials in n variables up to total degree d, i.e.
/// binomial(n+d, d). Throws SolverError once the count exceeds `cap`.
std::int64_t basis_size(int n, int d, std::int64_t cap = kDefaultBasisCap);

/// Enumerates the basis in canonical graded-lex order.
MonomialBasis enumerate_basis(int n, int d,
                              std::int64_t cap = kDefaultBasisCap);

/// x^alpha with the convention 0^0 = 1.
double eval_monomial(std::span<const double> x, const MultiIndex& alpha);
double eval_monomial(const Eigen::VectorXd& x, const MultiIndex& alpha);

/// Input/output data. Feature rows are kept in original order; after
/// normalize() (see bench.hpp) the per-column ranges of the training portion
/// are recorded so predictions can be mapped back to original units.
struct Dataset {
  Eigen::MatrixXd X;  // N x n
  Eigen::VectorXd y;  // N

  // (min, max) per feature column, plus the target range. Empty until the
  // dataset has been normalized.
  std::vector<std::pair<double, double>> feature_ranges;
  std::pair<double, double> target_range{0.0, 0.0};
  bool normalized = false;

  int num_points() const { return static_cast<int>(X.rows()); }
  int dimension() const { return static_cast<int>(X.cols()); }

  // Throws DataError on non-finite entries or shape mismatch.
  void validate() const;
};

/// Fitted sparse minimax model: the selected monomials, their coefficients,
/// the training error and the indices flagged as anomalous.
struct SparseModel {
  MonomialBasis basis;
  std::vector<int> selected;       // basis indices, ascending
  Eigen::VectorXd coefficients;    // aligned with `selected`
  double gamma = 0.0;              // max |residual| over kept training points
  std::vector<int> anomalies;      // excluded data indices, ascending

  // Normalization carried over from the training dataset so the model can be
  // applied to raw feature vectors.
  std::vector<std::pair<double, double>> feature_ranges;
  std::pair<double, double> target_range{0.0, 0.0};
};

/// Evaluates all basis monomials at every data point; entry (k, j) is
/// x^(k) raised to basis[j].
Eigen::MatrixXd design_matrix(const Dataset& data, const MonomialBasis& basis);

/// Model value at a single (already normalized) point.
double predict(const SparseModel& model, const Eigen::VectorXd& x);

}  // namespace sprfit

#endif  // SPRFIT_POLY_HPP_
