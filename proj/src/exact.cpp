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

#include "sprfit/exact.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "sprfit/lp.hpp"

namespace sprfit {

namespace {

constexpr double kImproveTol = 1e-12;

// Lexicographically next k-combination of {0..n-1}; false when exhausted.
bool next_combination(std::vector<int>& comb, int n) {
  int k = static_cast<int>(comb.size());
  int pos = k - 1;
  while (pos >= 0 && comb[pos] == n - k + pos) --pos;
  if (pos < 0) return false;
  ++comb[pos];
  for (int i = pos + 1; i < k; ++i) comb[i] = comb[i - 1] + 1;
  return true;
}

std::vector<int> first_combination(int k) {
  std::vector<int> comb(k);
  for (int i = 0; i < k; ++i) comb[i] = i;
  return comb;
}

std::vector<int> complement(const std::vector<int>& subset, int n) {
  std::vector<int> out;
  out.reserve(n - subset.size());
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    if (p < subset.size() && subset[p] == i) {
      ++p;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// Overflow-safe binomial, saturating at `cap`.
std::int64_t binomial_capped(int n, int k, std::int64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace

void MilpInstance::validate() const {
  if (design.rows() != y.size()) {
    throw DataError("milp instance: design/target size mismatch");
  }
  if (num_points() < 1 || num_monomials() < 1) {
    throw DataError("milp instance: empty design");
  }
  if (l_m < 1 || l_m > num_monomials()) {
    throw ConfigError("milp instance: l_m out of range");
  }
  if (l_b < 1 || l_b > num_points()) {
    throw ConfigError("milp instance: l_b out of range");
  }
  if (!(big_m > 0)) throw ConfigError("milp instance: M must be positive");
}

std::vector<int> MilpSolution::support() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

std::vector<int> MilpSolution::kept() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k]) out.push_back(static_cast<int>(k));
  }
  return out;
}

std::vector<int> MilpSolution::excluded() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (!b[k]) out.push_back(static_cast<int>(k));
  }
  return out;
}

namespace {

struct Best {
  bool found = false;
  double gamma = kInfinity;
  std::vector<int> support;
  std::vector<int> keep;
  Eigen::VectorXd coeffs;  // over the support columns
};

MilpSolution assemble(const MilpInstance& inst, const Best& best,
                      std::int64_t nodes) {
  MilpSolution sol;
  sol.s.assign(inst.num_monomials(), 0);
  sol.b.assign(inst.num_points(), 0);
  sol.c = Eigen::VectorXd::Zero(inst.num_monomials());
  for (std::size_t i = 0; i < best.support.size(); ++i) {
    sol.s[best.support[i]] = 1;
    sol.c[best.support[i]] = best.coeffs[static_cast<int>(i)];
  }
  for (int k : best.keep) sol.b[k] = 1;
  sol.gamma = best.gamma;
  sol.nodes_explored = nodes;
  return sol;
}

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& design,
                             const std::vector<int>& cols) {
  Eigen::MatrixXd out(design.rows(), static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<int>(j)) = design.col(cols[j]);
  }
  return out;
}

MilpSolution solve_by_enumeration(const MilpInstance& inst,
                                  std::int64_t node_budget) {
  const int m_d = inst.num_monomials();
  const int n_pts = inst.num_points();
  const int n_excl = n_pts - inst.l_b;

  Best best;
  std::int64_t leaves = 0;
  std::vector<int> support = first_combination(inst.l_m);
  do {
    Eigen::MatrixXd sub = take_columns(inst.design, support);
    std::vector<int> excl = first_combination(n_excl);
    do {
      if (++leaves > node_budget) {
        throw MilpBudgetError("milp enumeration exceeded its node budget",
                              assemble(inst, best, leaves));
      }
      std::vector<int> keep = complement(excl, n_pts);
      ChebyshevFit fit = solve_chebyshev(sub, inst.y, keep);
      if (fit.gamma < best.gamma - kImproveTol) {
        best.found = true;
        best.gamma = fit.gamma;
        best.support = support;
        best.keep = keep;
        best.coeffs = fit.coefficients;
      }
    } while (next_combination(excl, n_pts));
  } while (next_combination(support, m_d));

  return assemble(inst, best, leaves);
}

// Branch-and-bound over the selection and keep indicators. Monomials are
// fixed first (include-branch before exclude), then data points
// (exclude-branch before include), which visits leaves in the same
// lexicographic order as the exhaustive enumeration. Pruning is strict
// (bound must beat the incumbent by more than the tie tolerance) so tied
// optima resolve identically in both methods.
class BranchAndBound {
 public:
  BranchAndBound(const MilpInstance& inst, std::int64_t budget)
      : inst_(inst), budget_(budget) {
    svals_.assign(inst.num_monomials(), -1);
    bvals_.assign(inst.num_points(), -1);
  }

  MilpSolution run() {
    dive(0, 0, 0, 0, 0);
    return assemble(inst_, best_, nodes_);
  }

 private:
  double node_bound() const;
  void dive(int s_pos, int s_ones, int b_pos, int b_ones, int depth);
  void evaluate_leaf();

  const MilpInstance& inst_;
  std::int64_t budget_;
  std::vector<int> svals_, bvals_;
  Best best_;
  std::int64_t nodes_ = 0;
  std::int64_t leaves_ = 0;
};

// Lower bound for every completion of the current partial assignment: the
// minimax LP over the points already fixed as kept, with undecided
// selections relaxed into [0, 1] under the big-M coupling. Completions only
// add residual rows, so their optimum can never drop below this.
double BranchAndBound::node_bound() const {
  const int m_d = inst_.num_monomials();
  LpProblem lp;
  std::vector<int> c_var(m_d, -1);
  std::vector<int> s_var(m_d, -1);
  int unknown_s = 0, ones_s = 0;
  for (int j = 0; j < m_d; ++j) {
    if (svals_[j] == 0) continue;  // coefficient forced to zero
    if (svals_[j] == 1) {
      c_var[j] = lp.add_variable(-inst_.big_m, inst_.big_m);
      ++ones_s;
    } else {
      c_var[j] = lp.add_variable(-kInfinity, kInfinity);
      s_var[j] = lp.add_variable(0.0, 1.0);
      ++unknown_s;
    }
  }
  int gamma = lp.add_variable(0.0, kInfinity, 1.0);

  for (int j = 0; j < m_d; ++j) {
    if (s_var[j] < 0) continue;
    int up = lp.add_row(RowSense::kLessEqual, 0.0);
    lp.add_entry(up, c_var[j], 1.0);
    lp.add_entry(up, s_var[j], -inst_.big_m);
    int dn = lp.add_row(RowSense::kLessEqual, 0.0);
    lp.add_entry(dn, c_var[j], -1.0);
    lp.add_entry(dn, s_var[j], -inst_.big_m);
  }
  if (unknown_s > 0) {
    int sum = lp.add_row(RowSense::kEqual, inst_.l_m - ones_s);
    for (int j = 0; j < m_d; ++j) {
      if (s_var[j] >= 0) lp.add_entry(sum, s_var[j], 1.0);
    }
  }
  for (int k = 0; k < inst_.num_points(); ++k) {
    if (bvals_[k] != 1) continue;
    int up = lp.add_row(RowSense::kLessEqual, inst_.y[k]);
    int dn = lp.add_row(RowSense::kLessEqual, -inst_.y[k]);
    for (int j = 0; j < m_d; ++j) {
      if (c_var[j] < 0) continue;
      lp.add_entry(up, c_var[j], inst_.design(k, j));
      lp.add_entry(dn, c_var[j], -inst_.design(k, j));
    }
    lp.add_entry(up, gamma, -1.0);
    lp.add_entry(dn, gamma, -1.0);
  }

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) return kInfinity;
  return sol.objective;
}

void BranchAndBound::evaluate_leaf() {
  if (++leaves_ > budget_) {
    throw MilpBudgetError("milp branch-and-bound exceeded its node budget",
                          assemble(inst_, best_, nodes_));
  }
  std::vector<int> support, keep;
  for (int j = 0; j < inst_.num_monomials(); ++j) {
    if (svals_[j] == 1) support.push_back(j);
  }
  for (int k = 0; k < inst_.num_points(); ++k) {
    if (bvals_[k] == 1) keep.push_back(k);
  }
  ChebyshevFit fit =
      solve_chebyshev(take_columns(inst_.design, support), inst_.y, keep);
  if (fit.gamma < best_.gamma - kImproveTol) {
    best_.found = true;
    best_.gamma = fit.gamma;
    best_.support = support;
    best_.keep = keep;
    best_.coeffs = fit.coefficients;
  }
}

void BranchAndBound::dive(int s_pos, int s_ones, int b_pos, int b_ones,
                          int depth) {
  ++nodes_;
  const int m_d = inst_.num_monomials();
  const int n_pts = inst_.num_points();

  // Count feasibility of any completion.
  if (s_ones > inst_.l_m || s_ones + (m_d - s_pos) < inst_.l_m) return;
  if (b_ones > inst_.l_b || b_ones + (n_pts - b_pos) < inst_.l_b) return;

  if (s_pos == m_d && b_pos == n_pts) {
    evaluate_leaf();
    return;
  }

  if (best_.found && depth > 0) {
    double bound = node_bound();
    if (bound > best_.gamma + kImproveTol) return;
  }

  if (s_pos < m_d) {
    svals_[s_pos] = 1;
    dive(s_pos + 1, s_ones + 1, b_pos, b_ones, depth + 1);
    svals_[s_pos] = 0;
    dive(s_pos + 1, s_ones, b_pos, b_ones, depth + 1);
    svals_[s_pos] = -1;
  } else {
    bvals_[b_pos] = 0;
    dive(s_pos, s_ones, b_pos + 1, b_ones, depth + 1);
    bvals_[b_pos] = 1;
    dive(s_pos, s_ones, b_pos + 1, b_ones + 1, depth + 1);
    bvals_[b_pos] = -1;
  }
}

}  // namespace

MilpSolution solve_milp_exact(const MilpInstance& inst,
                              std::int64_t node_budget, MilpMethod method) {
  inst.validate();
  if (method == MilpMethod::kAuto) {
    method = (inst.num_monomials() <= 20 && inst.num_points() <= 20)
                 ? MilpMethod::kEnumerate
                 : MilpMethod::kBranchAndBound;
  }
  if (method == MilpMethod::kEnumerate) {
    std::int64_t leaves =
        binomial_capped(inst.num_monomials(), inst.l_m, node_budget) *
        binomial_capped(inst.num_points(), inst.num_points() - inst.l_b,
                        node_budget);
    if (leaves > node_budget) {
      throw MilpBudgetError(
          "milp enumeration would exceed its node budget",
          assemble(inst, Best{}, 0));
    }
    return solve_by_enumeration(inst, node_budget);
  }
  BranchAndBound bb(inst, node_budget);
  return bb.run();
}

std::vector<int> anomalous_subset_oracle(const Eigen::MatrixXd& design,
                                         const Eigen::VectorXd& y,
                                         const std::vector<int>& model_support,
                                         int subset_size,
                                         std::int64_t budget) {
  const int n_pts = static_cast<int>(design.rows());
  if (subset_size < 0 || subset_size >= n_pts) {
    throw ConfigError("anomalous subset size must lie in [0, N)");
  }
  if (model_support.empty()) {
    throw ConfigError("anomalous subset oracle needs a non-empty support");
  }
  if (subset_size == 0) return {};
  if (binomial_capped(n_pts, subset_size, budget) > budget) {
    throw SolverError("anomalous subset enumeration exceeds its budget");
  }

  Eigen::MatrixXd sub = take_columns(design, model_support);
  std::vector<int> subset = first_combination(subset_size);
  std::vector<int> best_subset;
  double best_gamma = kInfinity;
  do {
    std::vector<int> keep = complement(subset, n_pts);
    double gamma = solve_chebyshev(sub, y, keep).gamma;
    if (gamma < best_gamma - kImproveTol) {
      best_gamma = gamma;
      best_subset = subset;
    }
  } while (next_combination(subset, n_pts));
  return best_subset;
}

}  // namespace sprfit
