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

#include "sprfit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sprfit/common.hpp"

using namespace sprfit;

TEST_CASE("single variable lower bound row") {
  LpProblem lp;
  int x = lp.add_variable(-kInfinity, kInfinity, 1.0);
  int r = lp.add_row(RowSense::kGreaterEqual, 3.0);
  lp.add_entry(r, x, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[x] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(3.0));
}

TEST_CASE("symmetric degenerate optimum has the unique value") {
  LpProblem lp;
  int x = lp.add_variable(0.0, kInfinity, 1.0);
  int y = lp.add_variable(0.0, kInfinity, 1.0);
  int r = lp.add_row(RowSense::kGreaterEqual, 1.0);
  lp.add_entry(r, x, 1.0);
  lp.add_entry(r, y, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("contradictory constraints are infeasible") {
  LpProblem lp;
  int x = lp.add_variable(0.0, kInfinity, 0.0);
  int r = lp.add_row(RowSense::kLessEqual, -1.0);
  lp.add_entry(r, x, 1.0);
  CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
}

TEST_CASE("unbounded below") {
  LpProblem lp;
  int x = lp.add_variable(0.0, kInfinity, -1.0);
  int r = lp.add_row(RowSense::kGreaterEqual, 0.0);
  lp.add_entry(r, x, 1.0);
  CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
}

TEST_CASE("equality row with box bounds") {
  LpProblem lp;
  int x = lp.add_variable(0.0, 1.0, -1.0);
  int y = lp.add_variable(0.0, 1.0, -1.0);
  int r = lp.add_row(RowSense::kEqual, 1.0);
  lp.add_entry(r, x, 1.0);
  lp.add_entry(r, y, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
  CHECK(sol.x[x] + sol.x[y] == doctest::Approx(1.0));
}

TEST_CASE("free variable pushed onto a row bound") {
  LpProblem lp;
  int x = lp.add_variable(-kInfinity, kInfinity, 1.0);
  int r = lp.add_row(RowSense::kGreaterEqual, -5.0);
  lp.add_entry(r, x, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[x] == doctest::Approx(-5.0));
}

TEST_CASE("fixed variables stay fixed") {
  LpProblem lp;
  int x = lp.add_variable(2.0, 2.0, -10.0);
  int y = lp.add_variable(0.0, 5.0, 1.0);
  int r = lp.add_row(RowSense::kGreaterEqual, 3.0);
  lp.add_entry(r, x, 1.0);
  lp.add_entry(r, y, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[x] == doctest::Approx(2.0));
  CHECK(sol.x[y] == doctest::Approx(1.0));
}

TEST_CASE("bound flip path: objective prefers upper bounds") {
  LpProblem lp;
  int x = lp.add_variable(0.0, 2.0, -1.0);
  int y = lp.add_variable(0.0, 3.0, -2.0);
  int r = lp.add_row(RowSense::kLessEqual, 10.0);
  lp.add_entry(r, x, 1.0);
  lp.add_entry(r, y, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[x] == doctest::Approx(2.0));
  CHECK(sol.x[y] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(-8.0));
}

namespace {

struct RandomLp {
  LpProblem lp;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd u;
};

// Feasible (x = 0) and bounded (finite boxes) by construction.
RandomLp make_random_lp(Rng& rng) {
  RandomLp out;
  int n = static_cast<int>(rng.uniform_int(1, 8));
  int m = static_cast<int>(rng.uniform_int(1, 8));
  out.a = Eigen::MatrixXd::Zero(m, n);
  out.b.resize(m);
  out.c.resize(n);
  out.u.resize(n);
  for (int j = 0; j < n; ++j) {
    out.c[j] = rng.uniform(-3, 3);
    out.u[j] = rng.uniform(0.5, 4.0);
    out.lp.add_variable(0.0, out.u[j], out.c[j]);
  }
  for (int i = 0; i < m; ++i) {
    out.b[i] = rng.bernoulli(0.2) ? 0.0 : rng.uniform(0.0, 5.0);
    int row = out.lp.add_row(RowSense::kLessEqual, out.b[i]);
    for (int j = 0; j < n; ++j) {
      if (rng.bernoulli(0.8)) {
        out.a(i, j) = rng.uniform(-2, 2);
        out.lp.add_entry(row, j, out.a(i, j));
      }
    }
  }
  return out;
}

// Brute-force vertex enumeration: every choice of n active constraints out
// of {rows, lower bounds, upper bounds} yields a candidate basic point.
double vertex_enumeration_optimum(const RandomLp& r) {
  int n = static_cast<int>(r.c.size());
  int m = static_cast<int>(r.b.size());
  int total = m + 2 * n;
  double best = kInfinity;

  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  while (true) {
    Eigen::MatrixXd mat(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      int k = comb[i];
      if (k < m) {
        mat.row(i) = r.a.row(k);
        rhs[i] = r.b[k];
      } else if (k < m + n) {
        mat.row(i).setZero();
        mat(i, k - m) = 1.0;
        rhs[i] = 0.0;
      } else {
        mat.row(i).setZero();
        mat(i, k - m - n) = 1.0;
        rhs[i] = r.u[k - m - n];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
    if (lu.isInvertible()) {
      Eigen::VectorXd x = lu.solve(rhs);
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) {
        ok = x[j] >= -1e-7 && x[j] <= r.u[j] + 1e-7;
      }
      if (ok) {
        Eigen::VectorXd ax = r.a * x;
        for (int i = 0; i < m && ok; ++i) ok = ax[i] <= r.b[i] + 1e-7;
      }
      if (ok) best = std::min(best, r.c.dot(x));
    }
    // next combination
    int pos = n - 1;
    while (pos >= 0 && comb[pos] == total - n + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int i = pos + 1; i < n; ++i) comb[i] = comb[i - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("200 random LPs match the vertex-enumeration oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    CAPTURE(trial);
    RandomLp r = make_random_lp(rng);
    LpSolution sol = solve_lp(r.lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    double oracle = vertex_enumeration_optimum(r);
    CHECK(std::abs(sol.objective - oracle) < 1e-7);
  }
}

TEST_CASE("chebyshev LP: midrange of a constant column") {
  Eigen::MatrixXd design(2, 1);
  design << 1.0, 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  ChebyshevFit fit = solve_chebyshev(design, y, {0, 1});
  CHECK(fit.gamma == doctest::Approx(0.5));
  CHECK(fit.coefficients[0] == doctest::Approx(0.5));
}

TEST_CASE("chebyshev LP: realizable model interpolates") {
  Eigen::MatrixXd design(4, 2);
  Eigen::VectorXd y(4);
  for (int k = 0; k < 4; ++k) {
    double x = 0.3 * k - 0.5;
    design(k, 0) = 1.0;
    design(k, 1) = x;
    y[k] = 2.0 - 3.0 * x;
  }
  ChebyshevFit fit = solve_chebyshev(design, y, {0, 1, 2, 3});
  CHECK(std::abs(fit.gamma) < 1e-9);
  CHECK(fit.coefficients[0] == doctest::Approx(2.0));
  CHECK(fit.coefficients[1] == doctest::Approx(-3.0));
}

TEST_CASE("chebyshev LP: keep subset excludes the far point") {
  Eigen::MatrixXd design(3, 1);
  design << 1.0, 1.0, 1.0;
  Eigen::VectorXd y(3);
  y << 0.0, 1.0, 10.0;
  ChebyshevFit fit = solve_chebyshev(design, y, {0, 1});
  CHECK(fit.gamma == doctest::Approx(0.5));
}

TEST_CASE("chebyshev optimum invariant under keep permutation") {
  Rng rng(7);
  Eigen::MatrixXd design(8, 3);
  Eigen::VectorXd y(8);
  for (int k = 0; k < 8; ++k) {
    design(k, 0) = 1.0;
    design(k, 1) = rng.uniform(-1, 1);
    design(k, 2) = design(k, 1) * design(k, 1);
    y[k] = rng.uniform(-2, 2);
  }
  std::vector<int> keep{0, 2, 3, 5, 7};
  double base = solve_chebyshev(design, y, keep).gamma;
  std::vector<int> perm{7, 3, 0, 5, 2};
  CHECK(solve_chebyshev(design, y, perm).gamma == doctest::Approx(base));
}

TEST_CASE("minimax optimum dominated by least-squares max residual") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    int n_pts = static_cast<int>(rng.uniform_int(4, 12));
    Eigen::MatrixXd design(n_pts, 2);
    Eigen::VectorXd y(n_pts);
    std::vector<int> keep;
    for (int k = 0; k < n_pts; ++k) {
      design(k, 0) = 1.0;
      design(k, 1) = rng.uniform(-1, 1);
      y[k] = rng.uniform(-1, 1);
      keep.push_back(k);
    }
    double gamma = solve_chebyshev(design, y, keep).gamma;
    Eigen::VectorXd ls = solve_least_squares(design, y);
    double ls_max = (y - design * ls).lpNorm<Eigen::Infinity>();
    CHECK(gamma <= ls_max + 1e-9);
  }
}

TEST_CASE("chebyshev LP rejects an empty keep set") {
  Eigen::MatrixXd design(2, 1);
  design << 1.0, 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  CHECK_THROWS_AS(build_chebyshev_lp(design, y, {}), DataError);
}

TEST_CASE("least squares basics") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd y(2);
  y << 1.0, 2.0;
  Eigen::VectorXd c = solve_least_squares(eye, y);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(2.0));

  Eigen::MatrixXd ones(2, 1);
  ones << 1.0, 1.0;
  CHECK(solve_least_squares(ones, y)[0] == doctest::Approx(1.5));
}

TEST_CASE("duplicated column resolved by minimum norm, matches pinv oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    int n_pts = 6;
    Eigen::MatrixXd design(n_pts, 3);
    Eigen::VectorXd y(n_pts);
    for (int k = 0; k < n_pts; ++k) {
      design(k, 0) = 1.0;
      design(k, 1) = rng.uniform(-1, 1);
      design(k, 2) = design(k, 1);  // duplicate
      y[k] = rng.uniform(-1, 1);
    }
    Eigen::VectorXd c = solve_least_squares(design, y);
    CHECK(c[1] == doctest::Approx(c[2]).epsilon(1e-9));

    // Independent oracle: SVD pseudoinverse.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    Eigen::VectorXd inv_sv = sv;
    for (int i = 0; i < sv.size(); ++i) {
      inv_sv[i] = sv[i] > 1e-10 * sv[0] ? 1.0 / sv[i] : 0.0;
    }
    Eigen::VectorXd pinv_c =
        svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose() * y;
    CHECK((c - pinv_c).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("MPS dump has the expected sections") {
  LpProblem lp;
  int x = lp.add_variable(0.0, 2.0, 1.0);
  int y = lp.add_variable(-kInfinity, kInfinity, -1.0);
  int r = lp.add_row(RowSense::kLessEqual, 4.0);
  lp.add_entry(r, x, 1.0);
  lp.add_entry(r, y, 2.0);
  std::ostringstream os;
  lp.write_mps(os, "T");
  std::string text = os.str();
  CHECK(text.find("NAME") != std::string::npos);
  CHECK(text.find("ROWS") != std::string::npos);
  CHECK(text.find("COLUMNS") != std::string::npos);
  CHECK(text.find("RHS") != std::string::npos);
  CHECK(text.find("BOUNDS") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);
  CHECK(text.find(" FR ") != std::string::npos);
}

TEST_CASE("solver is deterministic") {
  Rng rng(99);
  RandomLp r = make_random_lp(rng);
  LpSolution a = solve_lp(r.lp);
  LpSolution b = solve_lp(r.lp);
  REQUIRE(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  CHECK(a.objective == b.objective);
  CHECK(a.x == b.x);
}
