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
#include <ostream>

namespace sprfit {

int LpProblem::add_variable(double lo, double hi, double cost) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return num_vars++;
}

int LpProblem::add_row(RowSense sense, double rhs_value) {
  senses.push_back(sense);
  rhs.push_back(rhs_value);
  return num_rows() - 1;
}

void LpProblem::add_entry(int row, int col, double value) {
  if (value == 0.0) return;
  entries.push_back(Entry{row, col, value});
}

void LpProblem::validate() const {
  for (const Entry& e : entries) {
    if (e.col < 0 || e.col >= num_vars || e.row < 0 || e.row >= num_rows()) {
      throw ConfigError("LP entry references an unknown row or column");
    }
    if (!std::isfinite(e.value)) throw ConfigError("LP entry is not finite");
  }
  for (int j = 0; j < num_vars; ++j) {
    if (lower[j] > upper[j]) {
      throw ConfigError("LP variable has crossed bounds");
    }
  }
  for (double r : rhs) {
    if (!std::isfinite(r)) throw ConfigError("LP rhs is not finite");
  }
}

namespace {

constexpr double kPivotEps = 1e-9;    // minimum usable ratio-test pivot
constexpr double kPivotHard = 1e-12;  // below this a pivot counts as breakdown
constexpr double kDegenStep = 1e-11;
constexpr int kBlandTrigger = 100;    // degenerate pivots before Bland's rule

enum Where : int { kBasic = -1, kAtLower = 0, kAtUpper = 1, kFreeZero = 2 };

struct SparseCol {
  std::vector<std::pair<int, double>> nz;  // (row, value)
};

// Working state of the bounded-variable simplex. Columns 0..n-1 are the
// structural variables, n..n+m-1 the row slacks (a.x + s = rhs), and any
// further columns are phase-1 artificials.
class Simplex {
 public:
  explicit Simplex(const LpProblem& p) : p_(p), m_(p.num_rows()) {
    build_columns();
  }

  LpSolution run();

 private:
  void build_columns();
  void install_initial_basis();
  void rebuild_inverse();
  void recompute_basic_values();
  // Returns true when the current cost vector is optimal.
  bool iterate(const std::vector<double>& cost, int* iterations);
  double reduced_cost(const Eigen::VectorXd& y, int j,
                      const std::vector<double>& cost) const;
  Eigen::VectorXd ftran(int j) const;
  double nonbasic_value(int j) const {
    if (where_[j] == kAtLower) return lo_[j];
    if (where_[j] == kAtUpper) return up_[j];
    return 0.0;
  }

  const LpProblem& p_;
  int m_ = 0;
  int ncols_ = 0;
  std::vector<SparseCol> cols_;
  std::vector<double> lo_, up_;
  std::vector<int> where_;
  std::vector<int> basic_;        // column basic in each row
  Eigen::VectorXd xb_;            // values of basic variables
  // Transposed basis inverse: column i holds row i of B^-1. All hot-path
  // operations then touch contiguous memory.
  Eigen::MatrixXd binv_t_;
  std::vector<double> phase1_cost_;
  int pivots_since_rebuild_ = 0;
  int rebuild_interval_ = 512;
  int breakdowns_ = 0;
  Eigen::VectorXd scratch_col_;  // pivot column copy during updates
};

void Simplex::build_columns() {
  const int n = p_.num_vars;
  ncols_ = n + m_;
  cols_.assign(ncols_, {});
  lo_.assign(ncols_, 0.0);
  up_.assign(ncols_, 0.0);
  for (int j = 0; j < n; ++j) {
    lo_[j] = p_.lower[j];
    up_[j] = p_.upper[j];
  }
  for (const LpProblem::Entry& e : p_.entries) {
    cols_[e.col].nz.emplace_back(e.row, e.value);
  }
  // Merge duplicate coefficients on the same row.
  for (int j = 0; j < n; ++j) {
    auto& nz = cols_[j].nz;
    std::sort(nz.begin(), nz.end());
    std::size_t out = 0;
    for (std::size_t i = 0; i < nz.size(); ++i) {
      if (out > 0 && nz[out - 1].first == nz[i].first) {
        nz[out - 1].second += nz[i].second;
      } else {
        nz[out++] = nz[i];
      }
    }
    nz.resize(out);
  }
  for (int i = 0; i < m_; ++i) {
    int j = n + i;
    cols_[j].nz.emplace_back(i, 1.0);
    switch (p_.senses[i]) {
      case RowSense::kLessEqual:
        lo_[j] = 0.0;
        up_[j] = kInfinity;
        break;
      case RowSense::kEqual:
        lo_[j] = 0.0;
        up_[j] = 0.0;
        break;
      case RowSense::kGreaterEqual:
        lo_[j] = -kInfinity;
        up_[j] = 0.0;
        break;
    }
  }
}

void Simplex::install_initial_basis() {
  const int n = p_.num_vars;
  where_.assign(ncols_, kAtLower);
  for (int j = 0; j < ncols_; ++j) {
    if (std::isfinite(lo_[j])) {
      where_[j] = kAtLower;
    } else if (std::isfinite(up_[j])) {
      where_[j] = kAtUpper;
    } else {
      where_[j] = kFreeZero;
    }
  }

  // Row residuals with every structural variable parked at a bound.
  Eigen::VectorXd resid(m_);
  for (int i = 0; i < m_; ++i) resid[i] = p_.rhs[i];
  for (int j = 0; j < n; ++j) {
    double v = nonbasic_value(j);
    if (v == 0.0) continue;
    for (auto& [row, a] : cols_[j].nz) resid[row] -= a * v;
  }

  basic_.assign(m_, -1);
  xb_ = Eigen::VectorXd::Zero(m_);
  phase1_cost_.assign(ncols_, 0.0);
  for (int i = 0; i < m_; ++i) {
    int slack = n + i;
    if (resid[i] >= lo_[slack] - 1e-30 && resid[i] <= up_[slack] + 1e-30) {
      basic_[i] = slack;
      xb_[i] = resid[i];
      where_[slack] = kBasic;
    } else {
      // Slack stays at its nearest bound; an artificial absorbs the gap.
      double slack_val =
          std::clamp(resid[i], std::isfinite(lo_[slack]) ? lo_[slack]
                                                         : -kInfinity,
                     std::isfinite(up_[slack]) ? up_[slack] : kInfinity);
      if (!std::isfinite(slack_val)) slack_val = 0.0;
      where_[slack] = (slack_val == up_[slack] && std::isfinite(up_[slack]) &&
                       lo_[slack] != up_[slack])
                          ? kAtUpper
                          : kAtLower;
      double gap = resid[i] - nonbasic_value(slack);
      double sign = gap >= 0 ? 1.0 : -1.0;
      int art = ncols_++;
      cols_.push_back({});
      cols_[art].nz.emplace_back(i, sign);
      lo_.push_back(0.0);
      up_.push_back(kInfinity);
      where_.push_back(kBasic);
      phase1_cost_.push_back(1.0);
      basic_[i] = art;
      xb_[i] = std::abs(gap);
    }
  }
  phase1_cost_.resize(ncols_, 0.0);
  rebuild_inverse();
  recompute_basic_values();
}

void Simplex::rebuild_inverse() {
  // Invert B^T directly; its inverse is the transposed storage we keep.
  Eigen::MatrixXd basis_t = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    for (auto& [row, a] : cols_[basic_[i]].nz) basis_t(i, row) = a;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_t);
  binv_t_ = lu.inverse();
  pivots_since_rebuild_ = 0;
  rebuild_interval_ = std::max(512, m_);
}

void Simplex::recompute_basic_values() {
  Eigen::VectorXd rhs_adj(m_);
  for (int i = 0; i < m_; ++i) rhs_adj[i] = p_.rhs[i];
  for (int j = 0; j < ncols_; ++j) {
    if (where_[j] == kBasic) continue;
    double v = nonbasic_value(j);
    if (v == 0.0) continue;
    for (auto& [row, a] : cols_[j].nz) rhs_adj[row] -= a * v;
  }
  xb_.noalias() = binv_t_.transpose() * rhs_adj;
}

double Simplex::reduced_cost(const Eigen::VectorXd& y, int j,
                             const std::vector<double>& cost) const {
  double d = cost[j];
  for (auto& [row, a] : cols_[j].nz) d -= y[row] * a;
  return d;
}

Eigen::VectorXd Simplex::ftran(int j) const {
  Eigen::VectorXd dense = Eigen::VectorXd::Zero(m_);
  for (auto& [row, a] : cols_[j].nz) dense[row] = a;
  return binv_t_.transpose() * dense;
}

bool Simplex::iterate(const std::vector<double>& cost, int* iterations) {
  int degen_streak = 0;
  const long iter_cap = 20000 + 50L * (m_ + ncols_);
  std::vector<char> shunned(ncols_, 0);  // columns with unusable pivots

  for (long iter = 0;; ++iter) {
    if (iter > iter_cap) {
      throw SolverError("simplex iteration limit exceeded");
    }
    if (pivots_since_rebuild_ >= rebuild_interval_) {
      rebuild_inverse();
      recompute_basic_values();
    }

    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost[basic_[i]];
    Eigen::VectorXd y = binv_t_ * cb;

    const bool bland = degen_streak >= kBlandTrigger;
    int enter = -1;
    double best_score = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      if (where_[j] == kBasic || shunned[j]) continue;
      if (lo_[j] == up_[j]) continue;  // fixed, cannot move
      double d = reduced_cost(y, j, cost);
      double score = 0.0;
      if (where_[j] == kAtLower && d < -kOptTol) score = -d;
      if (where_[j] == kAtUpper && d > kOptTol) score = d;
      if (where_[j] == kFreeZero && std::abs(d) > kOptTol) score = std::abs(d);
      if (score <= 0.0) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (score > best_score) {
        best_score = score;
        enter = j;
      }
    }
    if (enter < 0) {
      // No improving column among the usable ones. If columns were shunned
      // for tiny pivots, a genuinely improving direction may be hidden.
      bool any_shunned = false;
      for (char s : shunned) any_shunned |= s;
      if (any_shunned) {
        Eigen::VectorXd y2 = binv_t_ * cb;
        for (int j = 0; j < ncols_; ++j) {
          if (where_[j] == kBasic || !shunned[j] || lo_[j] == up_[j]) continue;
          double d = reduced_cost(y2, j, cost);
          bool improving = (where_[j] == kAtLower && d < -1e-7) ||
                           (where_[j] == kAtUpper && d > 1e-7) ||
                           (where_[j] == kFreeZero && std::abs(d) > 1e-7);
          if (improving) {
            throw SolverError(
                "simplex numeric breakdown: improving pivot below 1e-12");
          }
        }
      }
      return true;
    }

    double d_enter = reduced_cost(y, enter, cost);
    double sigma = 1.0;
    if (where_[enter] == kAtUpper) sigma = -1.0;
    if (where_[enter] == kFreeZero) sigma = d_enter < 0 ? 1.0 : -1.0;

    Eigen::VectorXd w = ftran(enter);

    // Ratio test: entering moves by t >= 0 in direction sigma, basic i
    // changes by -sigma*t*w_i.
    double t_best = kInfinity;
    int leave_row = -1;
    for (int i = 0; i < m_; ++i) {
      double delta = sigma * w[i];
      double t_i = kInfinity;
      if (delta > kPivotEps) {
        if (std::isfinite(lo_[basic_[i]])) t_i = (xb_[i] - lo_[basic_[i]]) / delta;
      } else if (delta < -kPivotEps) {
        if (std::isfinite(up_[basic_[i]])) t_i = (up_[basic_[i]] - xb_[i]) / (-delta);
      }
      if (t_i < -1e-9) t_i = 0.0;  // numerical drift outside bounds
      if (t_i < t_best - 1e-12) {
        t_best = t_i;
        leave_row = i;
      } else if (t_i <= t_best + 1e-12 && leave_row >= 0) {
        // Tie: prefer the larger pivot magnitude, then the lower variable
        // index, to keep the path stable and deterministic.
        double cur = std::abs(w[leave_row]);
        double cand = std::abs(w[i]);
        if (cand > cur * (1.0 + 1e-12) ||
            (cand >= cur * (1.0 - 1e-12) && basic_[i] < basic_[leave_row])) {
          t_best = std::min(t_best, t_i);
          leave_row = i;
        }
      }
    }

    double t_own = kInfinity;
    if (std::isfinite(lo_[enter]) && std::isfinite(up_[enter])) {
      t_own = up_[enter] - lo_[enter];
    }

    if (t_own == kInfinity && t_best == kInfinity) {
      return false;  // unbounded direction
    }

    if (t_own <= t_best) {
      // Bound flip, basis unchanged.
      xb_ -= sigma * t_own * w;
      where_[enter] = where_[enter] == kAtLower ? kAtUpper : kAtLower;
      ++*iterations;
      degen_streak = t_own <= kDegenStep ? degen_streak + 1 : 0;
      std::fill(shunned.begin(), shunned.end(), 0);
      continue;
    }

    double pivot = w[leave_row];
    if (std::abs(pivot) < kPivotHard) {
      if (++breakdowns_ > 50) {
        throw SolverError("simplex numeric breakdown: pivots below 1e-12");
      }
      shunned[enter] = 1;
      continue;
    }

    // Update values.
    double enter_val = nonbasic_value(enter) + sigma * t_best;
    xb_ -= sigma * t_best * w;
    int leave_col = basic_[leave_row];
    // Leaving variable lands on the bound that blocked it.
    where_[leave_col] = sigma * pivot > 0 ? kAtLower : kAtUpper;
    if (lo_[leave_col] == up_[leave_col]) where_[leave_col] = kAtLower;
    basic_[leave_row] = enter;
    where_[enter] = kBasic;
    xb_[leave_row] = enter_val;

    // Product-form update of the explicit inverse: in transposed storage
    // rows of B^-1 are columns, so this is one scale plus one rank-1 update
    // over contiguous memory.
    binv_t_.col(leave_row) /= pivot;
    scratch_col_ = binv_t_.col(leave_row);
    Eigen::VectorXd w_masked = w;
    w_masked[leave_row] = 0.0;
    binv_t_.noalias() -= scratch_col_ * w_masked.transpose();
    ++pivots_since_rebuild_;
    ++*iterations;
    degen_streak = t_best <= kDegenStep ? degen_streak + 1 : 0;
    std::fill(shunned.begin(), shunned.end(), 0);
  }
}

LpSolution Simplex::run() {
  install_initial_basis();
  LpSolution sol;
  sol.iterations = 0;

  bool have_artificials = ncols_ > p_.num_vars + m_;
  if (have_artificials) {
    if (!iterate(phase1_cost_, &sol.iterations)) {
      throw SolverError("phase-1 simplex reported an unbounded direction");
    }
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] >= p_.num_vars + m_) infeas += std::abs(xb_[i]);
    }
    for (int j = p_.num_vars + m_; j < ncols_; ++j) {
      if (where_[j] != kBasic) infeas += std::abs(nonbasic_value(j));
    }
    double scale = 1.0;
    for (double r : p_.rhs) scale = std::max(scale, std::abs(r));
    if (infeas > 1e-7 * scale) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Pin artificials at zero for phase 2.
    for (int j = p_.num_vars + m_; j < ncols_; ++j) {
      lo_[j] = 0.0;
      up_[j] = 0.0;
      if (where_[j] != kBasic) where_[j] = kAtLower;
    }
  }

  std::vector<double> cost(ncols_, 0.0);
  for (int j = 0; j < p_.num_vars; ++j) cost[j] = p_.objective[j];
  if (!iterate(cost, &sol.iterations)) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  // A fresh factorization wipes accumulated update error before the final
  // answer is read off.
  rebuild_inverse();
  recompute_basic_values();

  sol.x.assign(p_.num_vars, 0.0);
  for (int j = 0; j < p_.num_vars; ++j) {
    sol.x[j] = where_[j] == kBasic ? 0.0 : nonbasic_value(j);
  }
  for (int i = 0; i < m_; ++i) {
    if (basic_[i] < p_.num_vars) sol.x[basic_[i]] = xb_[i];
  }
  sol.objective = 0.0;
  for (int j = 0; j < p_.num_vars; ++j) {
    sol.objective += p_.objective[j] * sol.x[j];
  }
  sol.status = LpStatus::kOptimal;
  return sol;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  problem.validate();
  Simplex simplex(problem);
  return simplex.run();
}

LpProblem build_chebyshev_lp(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y,
                             const std::vector<int>& keep) {
  if (keep.empty()) throw DataError("chebyshev LP: empty keep set");
  if (design.rows() != y.size()) {
    throw DataError("chebyshev LP: design/target size mismatch");
  }
  const int m = static_cast<int>(design.cols());
  LpProblem lp;
  for (int j = 0; j < m; ++j) lp.add_variable(-kInfinity, kInfinity);
  int gamma = lp.add_variable(0.0, kInfinity, 1.0);
  for (int k : keep) {
    if (k < 0 || k >= design.rows()) {
      throw DataError("chebyshev LP: keep index out of range");
    }
    // y_k - d.c <= gamma  and  d.c - y_k <= gamma
    int up = lp.add_row(RowSense::kLessEqual, y[k]);
    int dn = lp.add_row(RowSense::kLessEqual, -y[k]);
    for (int j = 0; j < m; ++j) {
      lp.add_entry(up, j, design(k, j));
      lp.add_entry(dn, j, -design(k, j));
    }
    lp.add_entry(up, gamma, -1.0);
    lp.add_entry(dn, gamma, -1.0);
  }
  return lp;
}

ChebyshevFit solve_chebyshev(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y,
                             const std::vector<int>& keep) {
  LpProblem lp = build_chebyshev_lp(design, y, keep);
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("chebyshev LP did not solve to optimality");
  }
  ChebyshevFit fit;
  fit.coefficients.resize(design.cols());
  for (int j = 0; j < design.cols(); ++j) fit.coefficients[j] = sol.x[j];
  fit.gamma = sol.x[design.cols()];
  return fit;
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design,
                                    const Eigen::VectorXd& y) {
  if (design.rows() != y.size()) {
    throw DataError("least squares: design/target size mismatch");
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  return cod.solve(y);
}

void LpProblem::write_mps(std::ostream& os, const std::string& name) const {
  auto row_name = [](int i) { return "R" + std::to_string(i + 1); };
  auto col_name = [](int j) { return "C" + std::to_string(j + 1); };
  char buf[160];

  os << "NAME          " << name << "\n";
  os << "ROWS\n N  COST\n";
  for (int i = 0; i < num_rows(); ++i) {
    char s = senses[i] == RowSense::kLessEqual
                 ? 'L'
                 : (senses[i] == RowSense::kEqual ? 'E' : 'G');
    std::snprintf(buf, sizeof(buf), " %c  %s\n", s, row_name(i).c_str());
    os << buf;
  }

  // Column-major ordering of the coefficients.
  std::vector<std::vector<std::pair<int, double>>> by_col(num_vars);
  for (const Entry& e : entries) by_col[e.col].emplace_back(e.row, e.value);
  os << "COLUMNS\n";
  for (int j = 0; j < num_vars; ++j) {
    std::sort(by_col[j].begin(), by_col[j].end());
    if (objective[j] != 0.0) {
      std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %.12g\n",
                    col_name(j).c_str(), "COST", objective[j]);
      os << buf;
    }
    for (auto& [row, v] : by_col[j]) {
      std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %.12g\n",
                    col_name(j).c_str(), row_name(row).c_str(), v);
      os << buf;
    }
  }

  os << "RHS\n";
  for (int i = 0; i < num_rows(); ++i) {
    if (rhs[i] == 0.0) continue;
    std::snprintf(buf, sizeof(buf), "    %-8s  %-8s  %.12g\n", "RHS",
                  row_name(i).c_str(), rhs[i]);
    os << buf;
  }

  os << "BOUNDS\n";
  for (int j = 0; j < num_vars; ++j) {
    bool lo_fin = std::isfinite(lower[j]);
    bool hi_fin = std::isfinite(upper[j]);
    if (lo_fin && hi_fin && lower[j] == upper[j]) {
      std::snprintf(buf, sizeof(buf), " FX %-8s  %-8s  %.12g\n", "BND",
                    col_name(j).c_str(), lower[j]);
      os << buf;
      continue;
    }
    if (!lo_fin && !hi_fin) {
      std::snprintf(buf, sizeof(buf), " FR %-8s  %-8s\n", "BND",
                    col_name(j).c_str());
      os << buf;
      continue;
    }
    if (!lo_fin) {
      std::snprintf(buf, sizeof(buf), " MI %-8s  %-8s\n", "BND",
                    col_name(j).c_str());
      os << buf;
    } else if (lower[j] != 0.0) {
      std::snprintf(buf, sizeof(buf), " LO %-8s  %-8s  %.12g\n", "BND",
                    col_name(j).c_str(), lower[j]);
      os << buf;
    }
    if (hi_fin) {
      std::snprintf(buf, sizeof(buf), " UP %-8s  %-8s  %.12g\n", "BND",
                    col_name(j).c_str(), upper[j]);
      os << buf;
    }
  }
  os << "ENDATA\n";
}

}  // namespace sprfit
