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

#ifndef SPRFIT_FRACTIONAL_HPP_
#define SPRFIT_FRACTIONAL_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sprfit/common.hpp"
#include "sprfit/exact.hpp"

namespace sprfit {

/// Point of the box-relaxed binary program: coefficients c, selection
/// multipliers s in [0,1]^m, keep multipliers b in [0,1]^N, and the minimax
/// error gamma >= 0.
struct QcqpPoint {
  Eigen::VectorXd c;
  Eigen::VectorXd s;
  Eigen::VectorXd b;
  double gamma = 0.0;
};

/// Image point under the fractional rescaling: everything carries a hat and
/// picks up the homogenizing coordinate v_hat.
struct FpPoint {
  Eigen::VectorXd c_hat;
  Eigen::VectorXd s_hat;
  Eigen::VectorXd b_hat;
  double gamma_hat = 0.0;
  double v_hat = 0.0;
};

/// Named worst-violation per constraint family. Positive values are
/// violations; a point is feasible when every entry is <= tol.
struct ConstraintResidual {
  std::string name;
  double violation = 0.0;
};

struct ResidualReport {
  std::vector<ConstraintResidual> entries;

  double worst() const;
  double operator[](const std::string& name) const;
  bool feasible(double tol) const { return worst() <= tol; }
};

/// Scaling constant of the fractional program. Defaults comfortably above
/// the convexity threshold 1 + sqrt(m_d + N)/2.
double default_rho(int m_d, int n_pts);

/// The rescaled fractional model. v_hat is not a decision variable but a
/// constant of the model; its consistent value is the one the forward map
/// produces at any selection/keep assignment meeting the budgets,
///   v_const = sqrt(rho-1) / sqrt(rho*(l_m+l_b+1) - 1).
/// The variant with m_d+N+1 in place of l_m+l_b+1 is kept available behind
/// `use_dimension_vhat` for side-by-side diagnostics; it is inconsistent
/// with the image of the forward map unless l_m = m_d and l_b = N.
struct FpModel {
  Eigen::MatrixXd design;
  Eigen::VectorXd y;
  int l_m = 1;
  int l_b = 1;
  double big_m = 1000.0;
  double rho = 2.0;
  double v_const = 0.0;
  bool use_dimension_vhat = false;

  int num_points() const { return static_cast<int>(design.rows()); }
  int num_monomials() const { return static_cast<int>(design.cols()); }

  // Upper bound shared by every s_hat and b_hat entry.
  double hat_upper() const { return std::sqrt(rho / (rho - 1.0)) * v_const; }

  MilpInstance milp_instance() const;
};

/// Builds and validates the model. rho <= 0 selects the default. Throws
/// ConfigError when rho violates the convexity threshold or the budgets are
/// out of range.
FpModel make_fp_model(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                      int l_m, int l_b, double big_m = 1000.0,
                      double rho = 0.0, bool use_dimension_vhat = false);

/// Lifts an exact solver solution into a point of the relaxed program.
QcqpPoint qcqp_point_from_milp(const MilpSolution& sol);

/// Forward fractional rescaling. Requires rho > 1; the denominator is
/// strictly positive for every input.
FpPoint map_forward(const QcqpPoint& p, double rho);

/// Inverse rescaling; throws SolverError when v_hat <= 1e-12.
QcqpPoint map_inverse(const FpPoint& q, double rho);

/// Worst violation per constraint family of the box-relaxed binary program
/// evaluated at p (residual big-M rows, coefficient coupling, both budget
/// equalities, the binarization inequality, box bounds, gamma sign).
ResidualReport check_qcqp_feasible(const MilpInstance& inst,
                                   const QcqpPoint& p);

/// Worst violation per constraint family of the fractional program at q,
/// including the ellipsoid and sphere constraints and the pin on v_hat.
ResidualReport check_fp_feasible(const FpModel& model, const FpPoint& q);

struct ConvexityReport {
  double min_eigenvalue = 0.0;
  double schur_scalar = 0.0;  // 1 - (m_d+N) / (4 (rho-1)^2)
  bool is_convex = false;
};

/// Assembles the (m_d+N+1)-square quadratic-form matrix of the ellipsoid
/// constraint and checks it for positive semidefiniteness via a symmetric
/// eigensolve. The closed-form Schur scalar is returned alongside.
ConvexityReport ellipsoid_psd_check(int m_d, int n_pts, double rho);

}  // namespace sprfit

#endif  // SPRFIT_FRACTIONAL_HPP_
