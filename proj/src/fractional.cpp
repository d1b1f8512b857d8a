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

#include "sprfit/fractional.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sprfit {

double ResidualReport::worst() const {
  double w = -kInfinity;
  for (const auto& e : entries) w = std::max(w, e.violation);
  return entries.empty() ? 0.0 : w;
}

double ResidualReport::operator[](const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e.violation;
  }
  throw ConfigError("unknown residual family: " + name);
}

double default_rho(int m_d, int n_pts) {
  return std::max(2.0, 1.0 + std::sqrt(static_cast<double>(m_d + n_pts)));
}

MilpInstance FpModel::milp_instance() const {
  MilpInstance inst;
  inst.design = design;
  inst.y = y;
  inst.l_m = l_m;
  inst.l_b = l_b;
  inst.big_m = big_m;
  return inst;
}

FpModel make_fp_model(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                      int l_m, int l_b, double big_m, double rho,
                      bool use_dimension_vhat) {
  FpModel model;
  model.design = design;
  model.y = y;
  model.l_m = l_m;
  model.l_b = l_b;
  model.big_m = big_m;
  model.use_dimension_vhat = use_dimension_vhat;
  const int m_d = model.num_monomials();
  const int n_pts = model.num_points();
  if (design.rows() != y.size()) {
    throw DataError("fp model: design/target size mismatch");
  }
  if (l_m < 1 || l_m > m_d) throw ConfigError("fp model: l_m out of range");
  if (l_b < 1 || l_b > n_pts) throw ConfigError("fp model: l_b out of range");
  if (!(big_m > 0)) throw ConfigError("fp model: M must be positive");
  model.rho = rho > 0 ? rho : default_rho(m_d, n_pts);
  double threshold = 1.0 + std::sqrt(static_cast<double>(m_d + n_pts)) / 2.0;
  if (model.rho < threshold - 1e-12) {
    throw ConfigError("fp model: rho below the convexity threshold");
  }
  int pin = use_dimension_vhat ? (m_d + n_pts + 1) : (l_m + l_b + 1);
  model.v_const =
      std::sqrt(model.rho - 1.0) / std::sqrt(model.rho * pin - 1.0);
  return model;
}

QcqpPoint qcqp_point_from_milp(const MilpSolution& sol) {
  QcqpPoint p;
  p.c = sol.c;
  p.s.resize(static_cast<int>(sol.s.size()));
  p.b.resize(static_cast<int>(sol.b.size()));
  for (std::size_t j = 0; j < sol.s.size(); ++j) {
    p.s[static_cast<int>(j)] = sol.s[j];
  }
  for (std::size_t k = 0; k < sol.b.size(); ++k) {
    p.b[static_cast<int>(k)] = sol.b[k];
  }
  p.gamma = sol.gamma;
  return p;
}

FpPoint map_forward(const QcqpPoint& p, double rho) {
  if (!(rho > 1.0)) throw ConfigError("fractional map requires rho > 1");
  double sum_sb = p.s.sum() + p.b.sum();
  double denom = std::sqrt(
      (rho - 1.0) * (p.s.squaredNorm() + p.b.squaredNorm() + 1.0) + sum_sb);
  FpPoint q;
  q.c_hat = std::sqrt(rho - 1.0) / denom * p.c;
  q.s_hat = std::sqrt(rho) / denom * p.s;
  q.b_hat = std::sqrt(rho) / denom * p.b;
  q.gamma_hat = std::sqrt(rho - 1.0) / denom * p.gamma;
  q.v_hat = std::sqrt(rho - 1.0) / denom;
  return q;
}

QcqpPoint map_inverse(const FpPoint& q, double rho) {
  if (!(rho > 1.0)) throw ConfigError("fractional map requires rho > 1");
  if (q.v_hat <= 1e-12) {
    throw SolverError("inverse fractional map: v_hat too close to zero");
  }
  double scale = std::sqrt((rho - 1.0) / rho) / q.v_hat;
  QcqpPoint p;
  p.c = q.c_hat / q.v_hat;
  p.s = scale * q.s_hat;
  p.b = scale * q.b_hat;
  p.gamma = q.gamma_hat / q.v_hat;
  return p;
}

ResidualReport check_qcqp_feasible(const MilpInstance& inst,
                                   const QcqpPoint& p) {
  if (p.c.size() != inst.num_monomials() || p.s.size() != inst.num_monomials() ||
      p.b.size() != inst.num_points()) {
    throw DataError("qcqp point has inconsistent dimensions");
  }
  ResidualReport report;
  Eigen::VectorXd resid = inst.y - inst.design * p.c;

  double worst_resid = -kInfinity;
  for (int k = 0; k < inst.num_points(); ++k) {
    worst_resid = std::max(worst_resid, -inst.big_m * (1.0 - p.b[k]) +
                                            std::abs(resid[k]) - p.gamma);
  }
  report.entries.push_back({"residual-bigM", worst_resid});

  double worst_coeff = -kInfinity;
  for (int j = 0; j < inst.num_monomials(); ++j) {
    worst_coeff =
        std::max(worst_coeff, std::abs(p.c[j]) - inst.big_m * p.s[j]);
  }
  report.entries.push_back({"coeff-bigM", worst_coeff});

  report.entries.push_back({"keep-count", std::abs(p.b.sum() - inst.l_b)});
  report.entries.push_back({"select-count", std::abs(p.s.sum() - inst.l_m)});
  report.entries.push_back(
      {"binarize", p.s.sum() + p.b.sum() - p.s.squaredNorm() -
                       p.b.squaredNorm()});

  double box_s = std::max(-p.s.minCoeff(), p.s.maxCoeff() - 1.0);
  double box_b = std::max(-p.b.minCoeff(), p.b.maxCoeff() - 1.0);
  report.entries.push_back({"box-s", box_s});
  report.entries.push_back({"box-b", box_b});
  report.entries.push_back({"gamma-sign", -p.gamma});
  return report;
}

ResidualReport check_fp_feasible(const FpModel& model, const FpPoint& q) {
  if (q.c_hat.size() != model.num_monomials() ||
      q.s_hat.size() != model.num_monomials() ||
      q.b_hat.size() != model.num_points()) {
    throw DataError("fp point has inconsistent dimensions");
  }
  const double rho = model.rho;
  const double ratio = std::sqrt((rho - 1.0) / rho);  // sqrt(rho-1)/sqrt(rho)
  const double kappa = std::sqrt(rho / (rho - 1.0));
  ResidualReport report;

  Eigen::VectorXd resid = model.y * q.v_hat - model.design * q.c_hat;
  double worst_resid = -kInfinity;
  for (int k = 0; k < model.num_points(); ++k) {
    worst_resid = std::max(
        worst_resid, -model.big_m * q.v_hat + ratio * model.big_m * q.b_hat[k] +
                         std::abs(resid[k]) - q.gamma_hat);
  }
  report.entries.push_back({"residual-bigM", worst_resid});

  double worst_coeff = -kInfinity;
  for (int j = 0; j < model.num_monomials(); ++j) {
    worst_coeff = std::max(
        worst_coeff, std::abs(q.c_hat[j]) - ratio * model.big_m * q.s_hat[j]);
  }
  report.entries.push_back({"coeff-bigM", worst_coeff});

  double cap = kappa * q.v_hat;
  report.entries.push_back(
      {"box-s", std::max(-q.s_hat.minCoeff(), q.s_hat.maxCoeff() - cap)});
  report.entries.push_back(
      {"box-b", std::max(-q.b_hat.minCoeff(), q.b_hat.maxCoeff() - cap)});

  // Budget equalities carry the v_hat factor so that the image of the
  // forward map satisfies them identically.
  report.entries.push_back(
      {"keep-sum", std::abs(q.b_hat.sum() - model.l_b * kappa * q.v_hat)});
  report.entries.push_back(
      {"select-sum", std::abs(q.s_hat.sum() - model.l_m * kappa * q.v_hat)});

  double norms = q.s_hat.squaredNorm() + q.b_hat.squaredNorm();
  double sums = q.s_hat.sum() + q.b_hat.sum();
  double ellipsoid = (rho - 1.0) / rho * norms +
                     q.v_hat / std::sqrt(rho * (rho - 1.0)) * sums +
                     q.v_hat * q.v_hat - 1.0;
  report.entries.push_back({"ellipsoid", ellipsoid});
  report.entries.push_back(
      {"sphere", 1.0 - (norms + q.v_hat * q.v_hat)});
  report.entries.push_back({"v-pin", std::abs(q.v_hat - model.v_const)});
  return report;
}

ConvexityReport ellipsoid_psd_check(int m_d, int n_pts, double rho) {
  if (m_d < 1 || n_pts < 1) throw ConfigError("psd check: empty dimensions");
  if (!(rho > 1.0)) throw ConfigError("psd check: rho must exceed 1");
  const int dim = m_d + n_pts + 1;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  double diag = (rho - 1.0) / rho;
  double off = 1.0 / (2.0 * std::sqrt(rho * (rho - 1.0)));
  for (int i = 0; i < dim - 1; ++i) {
    q(i, i) = diag;
    q(i, dim - 1) = off;
    q(dim - 1, i) = off;
  }
  q(dim - 1, dim - 1) = 1.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q,
                                                     Eigen::EigenvaluesOnly);
  ConvexityReport report;
  report.min_eigenvalue = eig.eigenvalues().minCoeff();
  report.schur_scalar =
      1.0 - (m_d + n_pts) / (4.0 * (rho - 1.0) * (rho - 1.0));
  report.is_convex = report.min_eigenvalue >= -1e-9;
  return report;
}

}  // namespace sprfit
