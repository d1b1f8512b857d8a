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

#include <cmath>

#include "doctest.h"
#include "sprfit/exact.hpp"

using namespace sprfit;

namespace {

QcqpPoint random_point(Rng& rng, int m_d, int n_pts) {
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

double max_component_error(const QcqpPoint& a, const QcqpPoint& b) {
  double err = std::abs(a.gamma - b.gamma);
  err = std::max(err, (a.c - b.c).lpNorm<Eigen::Infinity>());
  err = std::max(err, (a.s - b.s).lpNorm<Eigen::Infinity>());
  err = std::max(err, (a.b - b.b).lpNorm<Eigen::Infinity>());
  return err;
}

MilpInstance small_outlier_instance() {
  MilpInstance inst;
  Eigen::VectorXd x(5);
  x << 0, 1, 2, 3, 4;
  inst.y.resize(5);
  inst.y << 0, 1, 10, 3, 4;
  inst.design.resize(5, 2);
  for (int k = 0; k < 5; ++k) {
    inst.design(k, 0) = 1.0;
    inst.design(k, 1) = x[k];
  }
  inst.l_m = 1;
  inst.l_b = 4;
  return inst;
}

}  // namespace

TEST_CASE("hand-computed forward image at rho = 5") {
  QcqpPoint p;
  p.c.resize(2);
  p.c << 0.5, 0.0;
  p.s.resize(2);
  p.s << 1.0, 0.0;
  p.b.resize(1);
  p.b << 1.0;
  p.gamma = 0.2;

  FpPoint q = map_forward(p, 5.0);
  const double denom = std::sqrt(14.0);
  CHECK(q.c_hat[0] == doctest::Approx(2.0 * 0.5 / denom).epsilon(1e-12));
  CHECK(q.c_hat[1] == doctest::Approx(0.0));
  CHECK(q.s_hat[0] == doctest::Approx(std::sqrt(5.0) / denom).epsilon(1e-12));
  CHECK(q.s_hat[1] == doctest::Approx(0.0));
  CHECK(q.b_hat[0] == doctest::Approx(std::sqrt(5.0) / denom).epsilon(1e-12));
  CHECK(q.gamma_hat == doctest::Approx(0.4 / denom).epsilon(1e-12));
  CHECK(q.v_hat == doctest::Approx(2.0 / denom).epsilon(1e-12));

  // At a binary point meeting the budgets the image lands on the unit sphere.
  double norm = q.s_hat.squaredNorm() + q.b_hat.squaredNorm() + q.v_hat * q.v_hat;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

  QcqpPoint back = map_inverse(q, 5.0);
  CHECK(max_component_error(p, back) < 1e-12);
}

TEST_CASE("zero point maps to the unit last coordinate") {
  QcqpPoint p;
  p.c = Eigen::VectorXd::Zero(3);
  p.s = Eigen::VectorXd::Zero(3);
  p.b = Eigen::VectorXd::Zero(2);
  p.gamma = 0.0;
  for (double rho : {2.0, 7.5}) {
    FpPoint q = map_forward(p, rho);
    CHECK(q.v_hat == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.c_hat.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(q.s_hat.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(q.b_hat.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(q.gamma_hat == 0.0);

    QcqpPoint back = map_inverse(q, rho);
    CHECK(max_component_error(p, back) == 0.0);
  }
}

TEST_CASE("round trip is the identity across rho scales") {
  Rng rng(101);
  for (double rho : {2.0, 10.0, 1000.0}) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      QcqpPoint p = random_point(rng, 4, 6);
      QcqpPoint back = map_inverse(map_forward(p, rho), rho);
      worst = std::max(worst, max_component_error(p, back));
    }
    CAPTURE(rho);
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("inverse rejects vanishing v_hat") {
  FpPoint q;
  q.c_hat = Eigen::VectorXd::Zero(1);
  q.s_hat = Eigen::VectorXd::Zero(1);
  q.b_hat = Eigen::VectorXd::Zero(1);
  q.v_hat = 0.0;
  CHECK_THROWS_AS(map_inverse(q, 2.0), SolverError);
}

TEST_CASE("relaxed-program feasibility report") {
  MilpInstance inst = small_outlier_instance();
  MilpSolution sol = solve_milp_exact(inst);
  QcqpPoint p = qcqp_point_from_milp(sol);

  ResidualReport ok = check_qcqp_feasible(inst, p);
  CHECK(ok.feasible(1e-9));

  // Fractional selections violate the binarization inequality.
  QcqpPoint frac = p;
  frac.s.setConstant(0.5);
  ResidualReport r1 = check_qcqp_feasible(inst, frac);
  CHECK(r1["binarize"] > 0.1);
  CHECK_FALSE(r1.feasible(1e-9));

  // Keep-count mismatch shows up as its own residual.
  QcqpPoint off = p;
  off.b[0] = 0.0;
  ResidualReport r2 = check_qcqp_feasible(inst, off);
  CHECK(r2["keep-count"] ==
        doctest::Approx(std::abs(off.b.sum() - inst.l_b)));
}

TEST_CASE("fractional-program feasibility of mapped solver points") {
  MilpInstance inst = small_outlier_instance();
  FpModel model = make_fp_model(inst.design, inst.y, inst.l_m, inst.l_b,
                                inst.big_m);
  MilpSolution sol = solve_milp_exact(inst);
  FpPoint q = map_forward(qcqp_point_from_milp(sol), model.rho);
  ResidualReport report = check_fp_feasible(model, q);
  CHECK(report.worst() <= 1e-9);

  // At binary budget-feasible points both quadratic constraints are tight.
  CHECK(std::abs(report["ellipsoid"]) <= 1e-10);
  CHECK(std::abs(report["sphere"]) <= 1e-10);

  // Shrinking the point off the sphere by half leaves a 3/4 violation.
  FpPoint half = q;
  half.c_hat *= 0.5;
  half.s_hat *= 0.5;
  half.b_hat *= 0.5;
  half.gamma_hat *= 0.5;
  half.v_hat *= 0.5;
  ResidualReport shrunk = check_fp_feasible(model, half);
  CHECK(shrunk["sphere"] == doctest::Approx(0.75).epsilon(1e-9));

  // v_hat off its pinned value is flagged.
  FpPoint off = q;
  off.v_hat += 0.01;
  CHECK(check_fp_feasible(model, off)["v-pin"] >=
        doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("model constants") {
  MilpInstance inst = small_outlier_instance();
  FpModel model = make_fp_model(inst.design, inst.y, 1, 4, 1000.0, 5.0);
  // Consistent pin: the value the forward map produces at budget-feasible
  // binary points, here sqrt(4)/sqrt(5*6-1).
  CHECK(model.v_const == doctest::Approx(2.0 / std::sqrt(29.0)));

  FpModel printed = make_fp_model(inst.design, inst.y, 1, 4, 1000.0, 5.0,
                                  /*use_dimension_vhat=*/true);
  CHECK(printed.v_const == doctest::Approx(2.0 / std::sqrt(5.0 * 8.0 - 1.0)));

  CHECK_THROWS_AS(make_fp_model(inst.design, inst.y, 0, 4), ConfigError);
  CHECK_THROWS_AS(make_fp_model(inst.design, inst.y, 1, 9), ConfigError);
  // rho below the convexity threshold is rejected.
  CHECK_THROWS_AS(make_fp_model(inst.design, inst.y, 1, 4, 1000.0, 1.05),
                  ConfigError);
}

TEST_CASE("ellipsoid matrix convexity check") {
  // Boundary: m_d + N = 4 at rho = 2 gives Schur scalar exactly zero.
  ConvexityReport boundary = ellipsoid_psd_check(2, 2, 2.0);
  CHECK(boundary.schur_scalar == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(boundary.min_eigenvalue >= -1e-9);
  CHECK(boundary.is_convex);

  // Below the threshold the matrix picks up a negative eigenvalue.
  ConvexityReport below = ellipsoid_psd_check(3, 5, 1.0 + 0.4 * std::sqrt(8.0));
  CHECK(below.schur_scalar < 0.0);
  CHECK(below.min_eigenvalue < -1e-9);
  CHECK_FALSE(below.is_convex);

  // Far above: strictly positive definite.
  ConvexityReport above =
      ellipsoid_psd_check(10, 30, 10.0 * (1.0 + std::sqrt(40.0) / 2.0));
  CHECK(above.min_eigenvalue > 1e-6);
  CHECK(above.is_convex);
}

TEST_CASE("convexity check matches the closed-form spectrum") {
  // Independent oracle: the matrix has eigenvalue (rho-1)/rho with
  // multiplicity m_d+N-1 plus the two roots of the 2x2 interaction block.
  Rng rng(55);
  for (int trial = 0; trial < 25; ++trial) {
    int m_d = static_cast<int>(rng.uniform_int(1, 20));
    int n_pts = static_cast<int>(rng.uniform_int(1, 20));
    double bound = 1.0 + std::sqrt(static_cast<double>(m_d + n_pts)) / 2.0;
    double rho = rng.bernoulli(0.5) ? bound : bound * rng.uniform(1.0, 3.0);
    double a = (rho - 1.0) / rho;
    double off2 = (m_d + n_pts) / (4.0 * rho * (rho - 1.0));
    double disc = std::sqrt((a + 1.0) * (a + 1.0) - 4.0 * (a - off2));
    double lo_root = (a + 1.0 - disc) / 2.0;
    double expected = std::min(a, lo_root);
    ConvexityReport rep = ellipsoid_psd_check(m_d, n_pts, rho);
    CHECK(rep.min_eigenvalue == doctest::Approx(expected).epsilon(1e-9));
  }
}
