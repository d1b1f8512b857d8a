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

#include "sprfit/poly.hpp"

#include <cmath>
#include <sstream>

namespace sprfit {

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] == 0) continue;
    if (!first) os << "*";
    os << "x" << (i + 1);
    if (exponents[i] > 1) os << "^" << exponents[i];
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  int da = a.total_degree();
  int db = b.total_degree();
  if (da != db) return da < db;
  return a.exponents < b.exponents;
}

std::int64_t basis_size(int n, int d, std::int64_t cap) {
  if (n < 1) throw ConfigError("basis dimension must be at least 1");
  if (d < 0) throw ConfigError("basis degree must be non-negative");
  // binomial(n+d, d) computed incrementally; abort as soon as the cap is hit
  // so huge (n, d) pairs fail fast instead of overflowing.
  std::int64_t count = 1;
  for (int i = 1; i <= d; ++i) {
    count = count * (n + i) / i;  // exact: prefix products are binomials
    if (count > cap) {
      throw SolverError("monomial basis exceeds capacity limit (" +
                        std::to_string(cap) + ")");
    }
  }
  return count;
}

namespace {

void enumerate_rec(int n, int budget, std::vector<int>& current, int pos,
                   std::vector<MultiIndex>& out) {
  if (pos == n) {
    out.push_back(MultiIndex{current});
    return;
  }
  for (int e = 0; e <= budget; ++e) {
    current[pos] = e;
    enumerate_rec(n, budget - e, current, pos + 1, out);
  }
  current[pos] = 0;
}

}  // namespace

MonomialBasis enumerate_basis(int n, int d, std::int64_t cap) {
  std::int64_t expected = basis_size(n, d, cap);
  std::vector<MultiIndex> indices;
  indices.reserve(static_cast<std::size_t>(expected));
  std::vector<int> current(n, 0);
  enumerate_rec(n, d, current, 0, indices);
  std::sort(indices.begin(), indices.end(), graded_lex_less);
  return MonomialBasis(n, d, std::move(indices));
}

double eval_monomial(std::span<const double> x, const MultiIndex& alpha) {
  if (x.size() != alpha.exponents.size()) {
    throw DataError("eval_monomial: point/exponent length mismatch");
  }
  double p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // integer power by repeated multiplication; e = 0 contributes 1, which
    // also settles 0^0 = 1
    double base = x[i];
    for (int e = alpha.exponents[i]; e > 0; --e) p *= base;
  }
  return p;
}

double eval_monomial(const Eigen::VectorXd& x, const MultiIndex& alpha) {
  return eval_monomial(std::span<const double>(x.data(),
                                               static_cast<std::size_t>(x.size())),
                       alpha);
}

void Dataset::validate() const {
  if (X.rows() < 1) throw DataError("dataset needs at least one row");
  if (X.rows() != y.size()) {
    throw DataError("dataset row count does not match target length");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw DataError("dataset contains non-finite entries");
  }
}

Eigen::MatrixXd design_matrix(const Dataset& data, const MonomialBasis& basis) {
  if (data.dimension() != basis.dimension()) {
    throw DataError("design_matrix: dataset dimension " +
                    std::to_string(data.dimension()) +
                    " does not match basis dimension " +
                    std::to_string(basis.dimension()));
  }
  const int n_pts = data.num_points();
  const int m = basis.size();
  Eigen::MatrixXd design(n_pts, m);
  for (int k = 0; k < n_pts; ++k) {
    Eigen::VectorXd row = data.X.row(k);
    for (int j = 0; j < m; ++j) {
      design(k, j) = eval_monomial(row, basis[j]);
    }
  }
  return design;
}

double predict(const SparseModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.basis.dimension()) {
    throw DataError("predict: point dimension mismatch");
  }
  double value = 0.0;
  for (std::size_t i = 0; i < model.selected.size(); ++i) {
    value += model.coefficients[static_cast<int>(i)] *
             eval_monomial(x, model.basis[model.selected[i]]);
  }
  return value;
}

}  // namespace sprfit
