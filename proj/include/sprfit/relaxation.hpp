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

#ifndef SPRFIT_RELAXATION_HPP_
#define SPRFIT_RELAXATION_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "sprfit/fractional.hpp"
#include "sprfit/lp.hpp"

namespace sprfit {

/// Exactness diagnostics for a relaxation solution.
/// `literal_residual` is the gap in the binary-certifying identity
/// |s|^2+|b|^2+v^2 = sum(s)+sum(b)+v evaluated in hat coordinates;
/// `integrality_gap` measures how far the inverse-mapped selection and keep
/// multipliers are from {0,1}. Certification goes through the integrality
/// route: an integral inverse image is feasible for the exact program, so
/// the relaxation bound is attained.
struct ExactnessReport {
  double literal_residual = 0.0;
  double integrality_gap = 0.0;
  bool certified = false;
};

/// Constructive feasibility witness for the semidefinite relaxation built
/// from a linear-relaxation-feasible point. Case 1 uses the rank-one lift
/// chi = z z'; case 2 completes it with a uniform all-ones term that
/// restores the unit trace without losing definiteness.
struct SdcCertificate {
  Eigen::MatrixXd chi;
  double trace = 0.0;
  double min_eig_diff = 0.0;  // smallest eigenvalue of chi - z z'
  int case_used = 1;

  bool valid(double tol = 1e-9) const {
    return trace >= 1.0 - tol && min_eig_diff >= -tol;
  }
};

struct CutIterate {
  int iteration = 0;
  double objective = 0.0;      // gamma_hat / v_hat at this iterate
  double quad_residual = 0.0;  // ellipsoid violation before the cut
};

struct RelaxationSolution {
  FpPoint point;
  double objective = 0.0;      // gamma_hat / v_hat of the returned point
  int cut_count = 0;
  double quad_residual = 0.0;  // ellipsoid violation at termination
  ExactnessReport exactness;
  std::vector<CutIterate> trace;
};

struct RelaxOptions {
  int cut_limit = 500;
  double quad_tol = 1e-7;
  // Deterministic optimal-face refinement (see solve_linear_relaxation).
  bool refine_vertex = true;
  double integrality_tol = 1e-6;
};

/// Minimizes gamma_hat / v_hat over the linear-based relaxation: the
/// fractional program with its nonconvex sphere constraint replaced by the
/// linear surrogate sum(s)+sum(b)+v >= 1, and the convex ellipsoid
/// constraint enforced by supporting-hyperplane cuts (solve, and while the
/// quadratic residual exceeds quad_tol, cut at the current point and
/// re-solve; convexity guarantees termination).
///
/// The optimal face is typically degenerate in the selection and keep
/// multipliers because the coefficient coupling is weak for large M. Among
/// the optimal vertices the solver therefore returns a deterministic
/// representative chosen by a secondary LP: keep-multiplier mass is steered
/// onto points with small robust-fit residuals and selection mass onto
/// monomials with large robust-fit coefficients, where the robust reference
/// fit is a least-absolute-deviations regression on the full basis. This
/// never changes the objective value, only which optimizer is reported.
RelaxationSolution solve_linear_relaxation(const FpModel& model,
                                           const RelaxOptions& opts = {});

/// Worst violation per constraint family of the linear-based relaxation at
/// q: the fractional-program families with the sphere constraint replaced by
/// the linear surrogate.
ResidualReport check_linear_relaxation_feasible(const FpModel& model,
                                                const FpPoint& q);

/// The base LP of the relaxation (before any cuts), mainly for MPS dumps
/// and cross-checks against external solvers. Variable order: coefficients,
/// selection multipliers, keep multipliers, gamma.
LpProblem relaxation_base_lp(const FpModel& model);

/// Builds the constructive certificate at a linear-relaxation-feasible
/// point. Throws ConfigError when q is infeasible beyond 1e-6.
SdcCertificate build_sdc_certificate(const FpModel& model, const FpPoint& q);

struct SocReport {
  int i = 0;
  int j = 0;
  double worst = 0.0;  // most negative 2x2-minor value of chi - z z'
};

/// Evaluates all 2x2-minor inequalities of chi - z z' (the second-order-cone
/// surrogate of the semidefinite constraint) and returns the worst pair.
SocReport soc_constraint_residuals(const FpPoint& q,
                                   const Eigen::MatrixXd& chi);

/// Exactness diagnostics for a terminated relaxation solution.
ExactnessReport check_exactness(const RelaxationSolution& sol, double rho,
                                double integrality_tol = 1e-6);

/// Writes the cut trace as CSV (iteration, objective, quad_residual).
void write_cut_trace(const RelaxationSolution& sol, std::ostream& os);

}  // namespace sprfit

#endif  // SPRFIT_RELAXATION_HPP_
