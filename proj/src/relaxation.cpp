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

#include "sprfit/relaxation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "sprfit/lp.hpp"

namespace sprfit {

namespace {

// Column layout of the relaxation LP.
struct Layout {
  int m_d = 0;
  int n_pts = 0;
  int c_off() const { return 0; }
  int s_off() const { return m_d; }
  int b_off() const { return 2 * m_d; }
  int gamma() const { return 2 * m_d + n_pts; }
  int total() const { return 2 * m_d + n_pts + 1; }
};

LpProblem build_relaxation_lp(const FpModel& model, const Layout& lay) {
  const double rho = model.rho;
  const double ratio = std::sqrt((rho - 1.0) / rho);
  const double kappa = std::sqrt(rho / (rho - 1.0));
  const double v = model.v_const;
  const double cap = kappa * v;

  LpProblem lp;
  for (int j = 0; j < lay.m_d; ++j) lp.add_variable(-kInfinity, kInfinity);
  for (int j = 0; j < lay.m_d; ++j) lp.add_variable(0.0, cap);
  for (int k = 0; k < lay.n_pts; ++k) lp.add_variable(0.0, cap);
  lp.add_variable(0.0, kInfinity, 1.0);  // gamma_hat

  for (int k = 0; k < lay.n_pts; ++k) {
    int up = lp.add_row(RowSense::kLessEqual, (model.big_m + model.y[k]) * v);
    int dn = lp.add_row(RowSense::kLessEqual, (model.big_m - model.y[k]) * v);
    for (int j = 0; j < lay.m_d; ++j) {
      lp.add_entry(up, lay.c_off() + j, model.design(k, j));
      lp.add_entry(dn, lay.c_off() + j, -model.design(k, j));
    }
    lp.add_entry(up, lay.b_off() + k, ratio * model.big_m);
    lp.add_entry(dn, lay.b_off() + k, ratio * model.big_m);
    lp.add_entry(up, lay.gamma(), -1.0);
    lp.add_entry(dn, lay.gamma(), -1.0);
  }

  for (int j = 0; j < lay.m_d; ++j) {
    int up = lp.add_row(RowSense::kLessEqual, 0.0);
    lp.add_entry(up, lay.c_off() + j, 1.0);
    lp.add_entry(up, lay.s_off() + j, -ratio * model.big_m);
    int dn = lp.add_row(RowSense::kLessEqual, 0.0);
    lp.add_entry(dn, lay.c_off() + j, -1.0);
    lp.add_entry(dn, lay.s_off() + j, -ratio * model.big_m);
  }

  int sum_s = lp.add_row(RowSense::kEqual, model.l_m * kappa * v);
  for (int j = 0; j < lay.m_d; ++j) lp.add_entry(sum_s, lay.s_off() + j, 1.0);
  int sum_b = lp.add_row(RowSense::kEqual, model.l_b * kappa * v);
  for (int k = 0; k < lay.n_pts; ++k) lp.add_entry(sum_b, lay.b_off() + k, 1.0);

  // Linear surrogate of the sphere constraint.
  int surrogate = lp.add_row(RowSense::kGreaterEqual, 1.0 - v);
  for (int j = 0; j < lay.m_d; ++j) lp.add_entry(surrogate, lay.s_off() + j, 1.0);
  for (int k = 0; k < lay.n_pts; ++k) lp.add_entry(surrogate, lay.b_off() + k, 1.0);

  return lp;
}

FpPoint point_from_solution(const FpModel& model, const Layout& lay,
                            const std::vector<double>& x) {
  FpPoint q;
  q.c_hat.resize(lay.m_d);
  q.s_hat.resize(lay.m_d);
  q.b_hat.resize(lay.n_pts);
  for (int j = 0; j < lay.m_d; ++j) {
    q.c_hat[j] = x[lay.c_off() + j];
    q.s_hat[j] = x[lay.s_off() + j];
  }
  for (int k = 0; k < lay.n_pts; ++k) q.b_hat[k] = x[lay.b_off() + k];
  q.gamma_hat = x[lay.gamma()];
  q.v_hat = model.v_const;
  return q;
}

double ellipsoid_value(const FpModel& model, const FpPoint& q) {
  const double rho = model.rho;
  double norms = q.s_hat.squaredNorm() + q.b_hat.squaredNorm();
  double sums = q.s_hat.sum() + q.b_hat.sum();
  return (rho - 1.0) / rho * norms +
         q.v_hat / std::sqrt(rho * (rho - 1.0)) * sums + q.v_hat * q.v_hat -
         1.0;
}

// Supporting hyperplane of the ellipsoid constraint at q, normalized to a
// unit gradient: grad . z <= grad . z0 - value(z0).
void add_ellipsoid_cut(const FpModel& model, const Layout& lay,
                       const FpPoint& q, LpProblem* lp) {
  const double rho = model.rho;
  const double lin = model.v_const / std::sqrt(rho * (rho - 1.0));
  Eigen::VectorXd grad_s = 2.0 * (rho - 1.0) / rho * q.s_hat;
  Eigen::VectorXd grad_b = 2.0 * (rho - 1.0) / rho * q.b_hat;
  grad_s.array() += lin;
  grad_b.array() += lin;
  double norm =
      std::sqrt(grad_s.squaredNorm() + grad_b.squaredNorm());
  if (norm < 1e-14) norm = 1.0;
  double rhs = (grad_s.dot(q.s_hat) + grad_b.dot(q.b_hat) -
                ellipsoid_value(model, q)) /
               norm;
  int row = lp->add_row(RowSense::kLessEqual, rhs);
  for (int j = 0; j < lay.m_d; ++j) {
    lp->add_entry(row, lay.s_off() + j, grad_s[j] / norm);
  }
  for (int k = 0; k < lay.n_pts; ++k) {
    lp->add_entry(row, lay.b_off() + k, grad_b[k] / norm);
  }
}

// Least-absolute-deviations reference fit on the full basis; robust to a
// minority of gross anomalies, which is what makes it a usable guide for
// the optimal-face refinement.
struct RobustFit {
  Eigen::VectorXd coeffs;
  Eigen::VectorXd residuals;
};

RobustFit l1_reference_fit(const FpModel& model) {
  const int m_d = model.num_monomials();
  const int n_pts = model.num_points();
  LpProblem lp;
  for (int j = 0; j < m_d; ++j) lp.add_variable(-kInfinity, kInfinity);
  for (int k = 0; k < n_pts; ++k) lp.add_variable(0.0, kInfinity, 1.0);
  for (int k = 0; k < n_pts; ++k) {
    int up = lp.add_row(RowSense::kLessEqual, model.y[k]);
    int dn = lp.add_row(RowSense::kLessEqual, -model.y[k]);
    for (int j = 0; j < m_d; ++j) {
      lp.add_entry(up, j, model.design(k, j));
      lp.add_entry(dn, j, -model.design(k, j));
    }
    lp.add_entry(up, m_d + k, -1.0);
    lp.add_entry(dn, m_d + k, -1.0);
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("least-absolute-deviations reference fit failed");
  }
  RobustFit fit;
  fit.coeffs.resize(m_d);
  for (int j = 0; j < m_d; ++j) fit.coeffs[j] = sol.x[j];
  fit.residuals = (model.y - model.design * fit.coeffs).cwiseAbs();
  return fit;
}

}  // namespace

LpProblem relaxation_base_lp(const FpModel& model) {
  Layout lay{model.num_monomials(), model.num_points()};
  return build_relaxation_lp(model, lay);
}

RelaxationSolution solve_linear_relaxation(const FpModel& model,
                                           const RelaxOptions& opts) {
  Layout lay{model.num_monomials(), model.num_points()};
  LpProblem lp = build_relaxation_lp(model, lay);

  RelaxationSolution out;
  FpPoint q;
  double bound = 0.0;
  while (true) {
    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::kInfeasible) {
      throw SolverError("linear relaxation is infeasible; check the budgets");
    }
    if (sol.status == LpStatus::kUnbounded) {
      throw SolverError("linear relaxation is unbounded");
    }
    q = point_from_solution(model, lay, sol.x);
    bound = q.gamma_hat / q.v_hat;
    double viol = ellipsoid_value(model, q);
    out.trace.push_back({out.cut_count, bound, viol});
    if (viol <= opts.quad_tol) break;
    if (out.cut_count >= opts.cut_limit) {
      throw SolverError("cut limit reached while enforcing the ellipsoid");
    }
    add_ellipsoid_cut(model, lay, q, &lp);
    ++out.cut_count;
  }

  if (opts.refine_vertex) {
    // The minimum of gamma_hat leaves the selection and keep multipliers
    // badly underdetermined. Re-optimize over the optimal face with weights
    // from the robust reference fit, then keep cutting if the refined point
    // ever leaves the ellipsoid.
    RobustFit ref = l1_reference_fit(model);
    LpProblem refine = lp;
    for (int j = 0; j < refine.num_vars; ++j) refine.objective[j] = 0.0;
    for (int j = 0; j < lay.m_d; ++j) {
      refine.objective[lay.s_off() + j] = -std::abs(ref.coeffs[j]);
    }
    for (int k = 0; k < lay.n_pts; ++k) {
      refine.objective[lay.b_off() + k] = ref.residuals[k];
    }
    int cap_row = refine.add_row(
        RowSense::kLessEqual,
        q.gamma_hat + 1e-10 * (1.0 + std::abs(q.gamma_hat)));
    refine.add_entry(cap_row, lay.gamma(), 1.0);

    while (true) {
      LpSolution sol = solve_lp(refine);
      if (sol.status != LpStatus::kOptimal) {
        throw SolverError("optimal-face refinement LP failed");
      }
      q = point_from_solution(model, lay, sol.x);
      double viol = ellipsoid_value(model, q);
      out.trace.push_back({out.cut_count, q.gamma_hat / q.v_hat, viol});
      if (viol <= opts.quad_tol) break;
      if (out.cut_count >= opts.cut_limit) {
        throw SolverError("cut limit reached while enforcing the ellipsoid");
      }
      add_ellipsoid_cut(model, lay, q, &refine);
      ++out.cut_count;
    }
  }

  out.point = q;
  out.objective = q.gamma_hat / q.v_hat;
  out.quad_residual = ellipsoid_value(model, q);
  out.exactness = check_exactness(out, model.rho, opts.integrality_tol);
  return out;
}

ResidualReport check_linear_relaxation_feasible(const FpModel& model,
                                                const FpPoint& q) {
  ResidualReport report = check_fp_feasible(model, q);
  // The sphere constraint is not part of the relaxation; its linear
  // surrogate is.
  for (auto& e : report.entries) {
    if (e.name == "sphere") {
      e.name = "linear-surrogate";
      e.violation = 1.0 - (q.s_hat.sum() + q.b_hat.sum() + q.v_hat);
    }
  }
  return report;
}

SdcCertificate build_sdc_certificate(const FpModel& model, const FpPoint& q) {
  ResidualReport feas = check_linear_relaxation_feasible(model, q);
  if (!feas.feasible(1e-6)) {
    throw ConfigError(
        "certificate requested at a point that is not relaxation-feasible "
        "(worst violation " +
        std::to_string(feas.worst()) + ")");
  }
  const int dim = model.num_monomials() + model.num_points() + 1;
  Eigen::VectorXd z(dim);
  z << q.s_hat, q.b_hat, q.v_hat;

  SdcCertificate cert;
  double norm2 = z.squaredNorm();
  // The case boundary carries the usual floating-point fuzz; points within
  // 1e-9 of the sphere take the rank-one branch.
  if (norm2 >= 1.0 - 1e-9) {
    cert.case_used = 1;
    cert.chi = z * z.transpose();
  } else {
    // Inside the sphere the rank-one lift lacks trace; a uniform all-ones
    // completion restores trace exactly 1 while keeping chi - z z'
    // positive semidefinite. The plain symmetrization (z e' + e z')/2 is
    // indefinite whenever z is not proportional to the all-ones vector, so
    // it cannot serve as a witness here.
    cert.case_used = 2;
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(dim, dim);
    cert.chi = z * z.transpose() + (1.0 - norm2) / dim * ones;
  }
  cert.trace = cert.chi.trace();
  Eigen::MatrixXd diff = cert.chi - z * z.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diff,
                                                     Eigen::EigenvaluesOnly);
  cert.min_eig_diff = eig.eigenvalues().minCoeff();
  return cert;
}

SocReport soc_constraint_residuals(const FpPoint& q,
                                   const Eigen::MatrixXd& chi) {
  const int dim =
      static_cast<int>(q.s_hat.size() + q.b_hat.size()) + 1;
  if (chi.rows() != dim || chi.cols() != dim) {
    throw DataError("soc residuals: certificate dimension mismatch");
  }
  Eigen::VectorXd z(dim);
  z << q.s_hat, q.b_hat, q.v_hat;
  Eigen::MatrixXd m = chi - z * z.transpose();

  SocReport report;
  report.worst = kInfinity;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (i == j) continue;
      double value = m(i, i) * m(j, j) - m(i, j) * m(i, j);
      if (value < report.worst) {
        report.worst = value;
        report.i = i;
        report.j = j;
      }
    }
  }
  return report;
}

ExactnessReport check_exactness(const RelaxationSolution& sol, double rho,
                                double integrality_tol) {
  const FpPoint& q = sol.point;
  ExactnessReport report;
  double norms =
      q.s_hat.squaredNorm() + q.b_hat.squaredNorm() + q.v_hat * q.v_hat;
  double sums = q.s_hat.sum() + q.b_hat.sum() + q.v_hat;
  report.literal_residual = std::abs(norms - sums);

  QcqpPoint p = map_inverse(q, rho);
  double gap = 0.0;
  for (int j = 0; j < p.s.size(); ++j) {
    gap = std::max(gap, std::min(std::abs(p.s[j]), std::abs(p.s[j] - 1.0)));
  }
  for (int k = 0; k < p.b.size(); ++k) {
    gap = std::max(gap, std::min(std::abs(p.b[k]), std::abs(p.b[k] - 1.0)));
  }
  report.integrality_gap = gap;
  report.certified = gap <= integrality_tol;
  return report;
}

void write_cut_trace(const RelaxationSolution& sol, std::ostream& os) {
  os << "iteration,objective,quad_residual\n";
  for (const CutIterate& it : sol.trace) {
    os << it.iteration << "," << it.objective << "," << it.quad_residual
       << "\n";
  }
}

}  // namespace sprfit
