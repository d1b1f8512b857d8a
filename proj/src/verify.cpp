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

#include "sprfit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sprfit/lp.hpp"
#include "sprfit/relaxation.hpp"
#include "sprfit/tscrr.hpp"

namespace sprfit {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

QcqpPoint random_relaxed_point(Rng& rng, int m_d, int n_pts) {
  QcqpPoint p;
  p.c.resize(m_d);
  p.s.resize(m_d);
  p.b.resize(n_pts);
  for (int j = 0; j < m_d; ++j) {
    p.c[j] = rng.uniform(-10, 10);
    p.s[j] = rng.uniform(0, 1);
  }
  for (int k = 0; k < n_pts; ++k) p.b[k] = rng.uniform(0, 1);
  p.gamma = rng.uniform(0, 5);
  return p;
}

double roundtrip_error(const QcqpPoint& a, const QcqpPoint& b) {
  double err = std::abs(a.gamma - b.gamma);
  err = std::max(err, (a.c - b.c).lpNorm<Eigen::Infinity>());
  err = std::max(err, (a.s - b.s).lpNorm<Eigen::Infinity>());
  err = std::max(err, (a.b - b.b).lpNorm<Eigen::Infinity>());
  return err;
}

// Random binary assignment meeting both budgets (Fisher-Yates prefix).
std::vector<int> random_subset(Rng& rng, int n, int k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    int j = static_cast<int>(rng.uniform_int(i, n - 1));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

MilpInstance random_small_instance(Rng& rng) {
  int n = static_cast<int>(rng.uniform_int(1, 3));
  int d = static_cast<int>(rng.uniform_int(1, 2));
  int n_pts = static_cast<int>(rng.uniform_int(5, 10));
  MonomialBasis basis = enumerate_basis(n, d);

  Dataset data;
  data.X.resize(n_pts, n);
  data.y.resize(n_pts);
  for (int k = 0; k < n_pts; ++k) {
    for (int j = 0; j < n; ++j) data.X(k, j) = rng.uniform(0, 1);
  }
  // Sparse generating polynomial plus mild noise and, sometimes, one gross
  // outlier.
  int terms = static_cast<int>(rng.uniform_int(1, std::min(3, basis.size())));
  std::vector<int> chosen = random_subset(rng, basis.size(), terms);
  for (int k = 0; k < n_pts; ++k) {
    Eigen::VectorXd x = data.X.row(k);
    double v = 0.0;
    for (int j : chosen) {
      v += (1.0 + 0.5 * j) * eval_monomial(x, basis[j]);
    }
    data.y[k] = v + 0.02 * rng.uniform(-1, 1);
  }
  if (rng.bernoulli(0.5)) {
    int victim = static_cast<int>(rng.uniform_int(0, n_pts - 1));
    data.y[victim] += rng.bernoulli(0.5) ? 5.0 : -5.0;
  }

  MilpInstance inst;
  inst.design = design_matrix(data, basis);
  inst.y = data.y;
  inst.l_m = static_cast<int>(rng.uniform_int(1, std::min(4, basis.size())));
  inst.l_b = static_cast<int>(rng.uniform_int(n_pts - 2, n_pts));
  return inst;
}

QcqpPoint random_feasible_point(const MilpInstance& inst, Rng& rng) {
  const int m_d = inst.num_monomials();
  const int n_pts = inst.num_points();
  std::vector<int> support = random_subset(rng, m_d, inst.l_m);
  std::vector<int> keep = random_subset(rng, n_pts, inst.l_b);

  Eigen::MatrixXd sub(n_pts, inst.l_m);
  for (int j = 0; j < inst.l_m; ++j) sub.col(j) = inst.design.col(support[j]);
  ChebyshevFit fit = solve_chebyshev(sub, inst.y, keep);

  QcqpPoint p;
  p.c = Eigen::VectorXd::Zero(m_d);
  p.s = Eigen::VectorXd::Zero(m_d);
  p.b = Eigen::VectorXd::Zero(n_pts);
  for (int j = 0; j < inst.l_m; ++j) {
    double perturbed = fit.coefficients[j] + rng.uniform(-0.3, 0.3);
    p.c[support[j]] = std::clamp(perturbed, -inst.big_m, inst.big_m);
    p.s[support[j]] = 1.0;
  }
  for (int k : keep) p.b[k] = 1.0;

  // Lift gamma so every big-M-adjusted residual is covered.
  Eigen::VectorXd resid = inst.y - inst.design * p.c;
  double needed = 0.0;
  for (int k = 0; k < n_pts; ++k) {
    needed = std::max(needed, -inst.big_m * (1.0 - p.b[k]) +
                                  std::abs(resid[k]));
  }
  p.gamma = needed + rng.uniform(0, 0.1);
  return p;
}

std::vector<CheckResult> run_property_suite(std::uint64_t seed,
                                           const VerifyOptions& opts) {
  std::vector<CheckResult> results;
  Rng rng(seed);

  // Mapping bijection.
  {
    double worst = 0.0;
    for (double rho : {2.0, 10.0, 1000.0}) {
      for (int i = 0; i < opts.bijection_points; ++i) {
        int m_d = static_cast<int>(rng.uniform_int(1, 8));
        int n_pts = static_cast<int>(rng.uniform_int(1, 8));
        QcqpPoint p = random_relaxed_point(rng, m_d, n_pts);
        worst = std::max(worst,
                         roundtrip_error(p, map_inverse(map_forward(p, rho), rho)));
      }
    }
    results.push_back({"mapping-bijection", worst <= 1e-10,
                       "max round-trip error " + fmt(worst)});
  }

  // Ellipsoid convexity threshold.
  {
    bool pass = true;
    std::string detail;
    for (int i = 0; i < opts.psd_cases && pass; ++i) {
      int m_d = static_cast<int>(rng.uniform_int(1, 30));
      int n_pts = static_cast<int>(rng.uniform_int(1, 30));
      double bound = 1.0 + std::sqrt(static_cast<double>(m_d + n_pts)) / 2.0;
      double at = bound * rng.uniform(1.0, 3.0);
      ConvexityReport ok = ellipsoid_psd_check(m_d, n_pts, at);
      ConvexityReport bad = ellipsoid_psd_check(
          m_d, n_pts, 1.0 + 0.4 * std::sqrt(static_cast<double>(m_d + n_pts)));
      if (ok.min_eigenvalue < -1e-9 || bad.min_eigenvalue >= 0.0) {
        pass = false;
        detail = "failed at m_d=" + std::to_string(m_d) +
                 " N=" + std::to_string(n_pts);
      }
    }
    results.push_back({"ellipsoid-convexity", pass,
                       pass ? std::to_string(opts.psd_cases) + " cases"
                            : detail});
  }

  // Feasibility transfer, forward and backward, with objective preservation.
  {
    double worst_fp = 0.0, worst_obj = 0.0, worst_qcqp = 0.0;
    int forward = 0, backward = 0;
    while (forward < opts.forward_points) {
      MilpInstance inst = random_small_instance(rng);
      FpModel model = make_fp_model(inst.design, inst.y, inst.l_m, inst.l_b,
                                    inst.big_m);
      MilpSolution exact = solve_milp_exact(inst);
      for (int rep = 0; rep < 4 && forward < opts.forward_points; ++rep) {
        QcqpPoint p = rep == 0 ? qcqp_point_from_milp(exact)
                               : random_feasible_point(inst, rng);
        FpPoint q = map_forward(p, model.rho);
        worst_fp = std::max(worst_fp, check_fp_feasible(model, q).worst());
        worst_obj = std::max(worst_obj,
                             std::abs(q.gamma_hat / q.v_hat - p.gamma));
        QcqpPoint back = map_inverse(q, model.rho);
        worst_qcqp =
            std::max(worst_qcqp, check_qcqp_feasible(inst, back).worst());
        ++forward;
        ++backward;
      }
      // Relaxation solutions that landed on the sphere are feasible for the
      // full fractional program; pull them back as well.
      RelaxationSolution relax = solve_linear_relaxation(model);
      ResidualReport fp_report = check_fp_feasible(model, relax.point);
      if (fp_report.worst() <= 1e-8) {
        QcqpPoint back = map_inverse(relax.point, model.rho);
        worst_qcqp =
            std::max(worst_qcqp, check_qcqp_feasible(inst, back).worst());
        ++backward;
      }
    }
    bool pass = worst_fp <= 1e-8 && worst_qcqp <= 1e-8 && worst_obj <= 1e-10;
    results.push_back(
        {"feasibility-transfer", pass,
         "forward " + std::to_string(forward) + " points (worst " +
             fmt(worst_fp) + "), backward " + std::to_string(backward) +
             " (worst " + fmt(worst_qcqp) + "), objective drift " +
             fmt(worst_obj)});
  }

  // Sandwich: relaxation bound <= exact optimum <= recovered error.
  {
    double worst_lower = -kInfinity, worst_upper = -kInfinity;
    for (int i = 0; i < opts.sandwich_instances; ++i) {
      MilpInstance inst = random_small_instance(rng);
      MilpSolution exact = solve_milp_exact(inst);
      FpModel model = make_fp_model(inst.design, inst.y, inst.l_m, inst.l_b,
                                    inst.big_m);
      RelaxationSolution relax = solve_linear_relaxation(model);
      QcqpPoint star = map_inverse(relax.point, model.rho);

      std::vector<int> order(inst.num_monomials());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return star.s[a] > star.s[b];
      });
      std::vector<int> support(order.begin(), order.begin() + inst.l_m);
      std::sort(support.begin(), support.end());
      std::vector<int> korder(inst.num_points());
      std::iota(korder.begin(), korder.end(), 0);
      std::stable_sort(korder.begin(), korder.end(), [&](int a, int b) {
        return star.b[a] > star.b[b];
      });
      std::vector<int> keep(korder.begin(), korder.begin() + inst.l_b);
      std::sort(keep.begin(), keep.end());

      Eigen::MatrixXd sub(inst.num_points(), inst.l_m);
      for (int j = 0; j < inst.l_m; ++j) {
        sub.col(j) = inst.design.col(support[j]);
      }
      double recovery = solve_chebyshev(sub, inst.y, keep).gamma;
      worst_lower = std::max(worst_lower, relax.objective - exact.gamma);
      worst_upper = std::max(worst_upper, exact.gamma - recovery);
    }
    bool pass = worst_lower <= 1e-7 && worst_upper <= 1e-7;
    results.push_back({"relaxation-sandwich", pass,
                       std::to_string(opts.sandwich_instances) +
                           " instances, worst slacks " + fmt(worst_lower) +
                           " / " + fmt(worst_upper)});
  }

  // Constructive certificates at sampled relaxation-feasible points.
  {
    double worst_trace = kInfinity, worst_eig = kInfinity, worst_soc = kInfinity;
    int count = 0;
    while (count < opts.certificate_points) {
      MilpInstance inst = random_small_instance(rng);
      FpModel model = make_fp_model(inst.design, inst.y, inst.l_m, inst.l_b,
                                    inst.big_m);
      std::vector<FpPoint> points;
      points.push_back(solve_linear_relaxation(model).point);
      points.push_back(
          map_forward(qcqp_point_from_milp(solve_milp_exact(inst)),
                      model.rho));
      points.push_back(
          map_forward(random_feasible_point(inst, rng), model.rho));
      for (const FpPoint& q : points) {
        if (count >= opts.certificate_points) break;
        SdcCertificate cert = build_sdc_certificate(model, q);
        worst_trace = std::min(worst_trace, cert.trace);
        worst_eig = std::min(worst_eig, cert.min_eig_diff);
        worst_soc =
            std::min(worst_soc, soc_constraint_residuals(q, cert.chi).worst);
        ++count;
      }
    }
    bool pass =
        worst_trace >= 1.0 - 1e-9 && worst_eig >= -1e-9 && worst_soc >= -1e-9;
    results.push_back({"sdc-soc-certificates", pass,
                       std::to_string(count) + " points, min trace " +
                           fmt(worst_trace) + ", min eig " + fmt(worst_eig) +
                           ", min soc " + fmt(worst_soc)});
  }

  // Certified exactness matches the exact oracle.
  {
    int certified = 0;
    double worst_gap = 0.0;
    for (int i = 0; i < opts.exactness_instances; ++i) {
      MilpInstance inst = random_small_instance(rng);
      if (i == 0) {
        // The saturated-budget family certifies by construction.
        inst.l_m = inst.num_monomials();
        inst.l_b = inst.num_points();
      }
      FpModel model = make_fp_model(inst.design, inst.y, inst.l_m, inst.l_b,
                                    inst.big_m);
      RelaxationSolution relax = solve_linear_relaxation(model);
      if (!relax.exactness.certified) continue;
      MilpSolution exact = solve_milp_exact(inst);
      QcqpPoint star = map_inverse(relax.point, model.rho);
      std::vector<int> support, keep;
      for (int j = 0; j < star.s.size(); ++j) {
        if (star.s[j] > 0.5) support.push_back(j);
      }
      for (int k = 0; k < star.b.size(); ++k) {
        if (star.b[k] > 0.5) keep.push_back(k);
      }
      Eigen::MatrixXd sub(inst.num_points(), static_cast<int>(support.size()));
      for (std::size_t j = 0; j < support.size(); ++j) {
        sub.col(static_cast<int>(j)) = inst.design.col(support[j]);
      }
      double recovery = solve_chebyshev(sub, inst.y, keep).gamma;
      worst_gap = std::max(worst_gap, std::abs(recovery - exact.gamma));
      ++certified;
    }
    bool pass = certified > 0 && worst_gap <= 1e-7;
    results.push_back({"certified-exactness", pass,
                       std::to_string(certified) + " certified, worst |recovery - exact| " +
                           fmt(worst_gap)});
  }

  return results;
}

}  // namespace sprfit
