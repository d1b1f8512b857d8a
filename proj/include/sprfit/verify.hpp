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

#ifndef SPRFIT_VERIFY_HPP_
#define SPRFIT_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sprfit/fractional.hpp"
#include "sprfit/poly.hpp"

namespace sprfit {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Sample sizes for the randomized property suite. The defaults keep the
/// CLI run fast; the acceptance suite dials them up.
struct VerifyOptions {
  int bijection_points = 2000;
  int psd_cases = 20;
  int forward_points = 40;
  int sandwich_instances = 12;
  int certificate_points = 60;
  int exactness_instances = 8;
};

/// Runs the full property suite: mapping bijection, ellipsoid convexity
/// threshold, feasibility transfer in both directions with objective
/// preservation, the relaxation/exact/recovery sandwich, constructive
/// semidefinite and second-order-cone certificates, and the certified-
/// exactness consistency check. Deterministic for a fixed seed.
std::vector<CheckResult> run_property_suite(std::uint64_t seed,
                                           const VerifyOptions& opts = {});

/// Random desk-scale instance generator shared by the property suite and
/// the acceptance tests: n <= 3, d <= 2, N <= 10, m_d <= 10, features in
/// [0,1], targets from a sparse polynomial with noise and occasional gross
/// outliers.
MilpInstance random_small_instance(Rng& rng);

/// A budget-respecting feasible point of the box-relaxed program: either
/// the exact solution itself or a randomized binary assignment with
/// coefficients from the support's minimax fit, gamma lifted to cover every
/// adjusted residual.
QcqpPoint random_feasible_point(const MilpInstance& inst, Rng& rng);

}  // namespace sprfit

#endif  // SPRFIT_VERIFY_HPP_
