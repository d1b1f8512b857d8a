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

#ifndef SPRFIT_EXACT_HPP_
#define SPRFIT_EXACT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sprfit/common.hpp"

namespace sprfit {

/// Sparse minimax regression instance with anomaly filtering. The kept-point
/// budget is l_b (so N - l_b points are excluded) and the monomial budget is
/// l_m. M bounds the coefficient magnitudes; it must exceed the largest
/// coefficient of any candidate fit for the binary formulation to be exact,
/// which is why it stays configurable.
struct MilpInstance {
  Eigen::MatrixXd design;  // N x m_d, all candidate monomials evaluated
  Eigen::VectorXd y;       // N
  int l_m = 1;
  int l_b = 1;
  double big_m = 1000.0;

  int num_points() const { return static_cast<int>(design.rows()); }
  int num_monomials() const { return static_cast<int>(design.cols()); }
  void validate() const;
};

struct MilpSolution {
  std::vector<std::uint8_t> s;  // monomial selection, length m_d
  std::vector<std::uint8_t> b;  // kept-point indicators, length N
  Eigen::VectorXd c;            // coefficients over the full basis (zeros off support)
  double gamma = 0.0;
  std::int64_t nodes_explored = 0;

  std::vector<int> support() const;
  std::vector<int> kept() const;
  std::vector<int> excluded() const;
};

/// Thrown when the node budget runs out; carries the best incumbent found.
class MilpBudgetError : public SolverError {
 public:
  MilpBudgetError(const std::string& what, MilpSolution incumbent)
      : SolverError(what), incumbent_(std::move(incumbent)) {}
  const MilpSolution& incumbent() const { return incumbent_; }

 private:
  MilpSolution incumbent_;
};

enum class MilpMethod {
  kAuto,        // enumerate when both variable counts are <= 20
  kEnumerate,   // exhaustive support enumeration
  kBranchAndBound,
};

/// Globally optimal (s, b, c, gamma). Both methods solve one minimax LP per
/// candidate support over the kept rows, so gamma always equals that LP's
/// optimum. Optima tied within 1e-12 resolve to the lexicographically first
/// support, then the lexicographically first excluded set.
MilpSolution solve_milp_exact(const MilpInstance& inst,
                              std::int64_t node_budget = 1'000'000,
                              MilpMethod method = MilpMethod::kAuto);

/// The size-fixed subset whose removal minimizes the achievable minimax
/// error of a fit on `model_support` over the remaining points. Exhaustive
/// over all subsets; ties resolve to the lexicographically smallest set.
std::vector<int> anomalous_subset_oracle(const Eigen::MatrixXd& design,
                                         const Eigen::VectorXd& y,
                                         const std::vector<int>& model_support,
                                         int subset_size,
                                         std::int64_t budget = 1'000'000);

}  // namespace sprfit

#endif  // SPRFIT_EXACT_HPP_
