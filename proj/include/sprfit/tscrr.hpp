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

#ifndef SPRFIT_TSCRR_HPP_
#define SPRFIT_TSCRR_HPP_

#include <iosfwd>
#include <vector>

#include "sprfit/poly.hpp"
#include "sprfit/relaxation.hpp"

namespace sprfit {

enum class RecoveryScope {
  kKeptOnly,   // recovery LP over the rounded keep set (default)
  kAllPoints,  // literal variant constraining every data point
};

struct TscrrConfig {
  int degree = 2;
  int l_m = 1;
  int l_b = 1;
  double big_m = 1000.0;
  double rho = 0.0;  // <= 0 selects the default scaling
  RecoveryScope recovery_scope = RecoveryScope::kKeptOnly;
  // Keep the inverse-mapped selection values as fixed multipliers inside the
  // recovery LP instead of rounding them to a support.
  bool fractional_multipliers = false;
  double integrality_tol = 1e-6;
  int cut_limit = 500;
};

struct TscrrResult {
  SparseModel model;
  RelaxationSolution relaxation;
  std::vector<std::uint8_t> s_rounded;  // selected monomials
  std::vector<std::uint8_t> b_rounded;  // kept points
  double recovery_gamma = 0.0;
  double lower_bound = 0.0;  // relaxation objective, valid bound on gamma
  double gap = 0.0;          // recovery_gamma - lower_bound
};

/// Two-step fit: solve the linear-based relaxation, pull the solution back
/// through the inverse fractional map, round the top-l_m selection and
/// top-l_b keep multipliers (ties toward the lower canonical index), then
/// recover coefficients with a minimax LP on the selected columns.
TscrrResult fit_tscrr(const Dataset& data, const TscrrConfig& cfg);

struct ResidualProfile {
  std::vector<double> residual;        // |y_k - prediction_k|
  std::vector<std::uint8_t> anomalous; // 1 when the point was excluded
  double max_kept = 0.0;
};

ResidualProfile residual_profile(const TscrrResult& result,
                                 const Dataset& data);

/// Plain-text model format, version tagged, exact round trip.
void serialize_model(const SparseModel& model, std::ostream& os);
SparseModel parse_model(std::istream& is);

}  // namespace sprfit

#endif  // SPRFIT_TSCRR_HPP_
