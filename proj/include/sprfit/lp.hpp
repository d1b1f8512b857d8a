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

#ifndef SPRFIT_LP_HPP_
#define SPRFIT_LP_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "sprfit/common.hpp"

namespace sprfit {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

/// Minimization LP in row form:
///   min c'x  s.t.  (Ax)_i {<=, =, >=} rhs_i,  lower_j <= x_j <= upper_j.
/// Coefficients are stored as sparse (row, col, value) triplets.
struct LpProblem {
  struct Entry {
    int row;
    int col;
    double value;
  };

  int num_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Entry> entries;
  std::vector<RowSense> senses;
  std::vector<double> rhs;

  int num_rows() const { return static_cast<int>(rhs.size()); }

  int add_variable(double lo, double hi, double cost = 0.0);
  int add_row(RowSense sense, double rhs_value);
  void add_entry(int row, int col, double value);

  // Throws ConfigError on inconsistent indices or crossed bounds.
  void validate() const;

  // Debug dump in fixed-column MPS format for cross-checking against
  // external solvers.
  void write_mps(std::ostream& os, const std::string& name = "SPRFIT") const;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

/// Bounded-variable primal simplex (two phases, explicit basis inverse).
/// Pricing is most-negative reduced cost with lowest-index tie-breaks;
/// Bland's least-index rule takes over after a degenerate streak, which
/// keeps the pivot sequence cycle-free and fully deterministic.
/// Throws SolverError when acceptable pivots repeatedly fall below 1e-12
/// or the iteration cap is hit.
LpSolution solve_lp(const LpProblem& problem);

/// Minimax (Chebyshev) coefficient LP over the rows in `keep`:
///   min gamma  s.t.  |y_k - sum_j design(k,j) c_j| <= gamma,  k in keep,
/// with gamma >= 0 and the absolute value split into two linear rows.
/// Columns of `design` are expected to be restricted to the candidate
/// monomials already. Variable layout: c_0..c_{m-1}, then gamma.
LpProblem build_chebyshev_lp(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y,
                             const std::vector<int>& keep);

struct ChebyshevFit {
  Eigen::VectorXd coefficients;
  double gamma = 0.0;
};

/// Convenience wrapper: build and solve the minimax LP.
ChebyshevFit solve_chebyshev(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y,
                             const std::vector<int>& keep);

/// Least-squares coefficients, minimum-norm on rank-deficient systems
/// (complete orthogonal decomposition with column pivoting).
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design,
                                    const Eigen::VectorXd& y);

}  // namespace sprfit

#endif  // SPRFIT_LP_HPP_
