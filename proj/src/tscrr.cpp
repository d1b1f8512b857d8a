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

#include "sprfit/tscrr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sprfit/lp.hpp"

namespace sprfit {

namespace {

// Indicator of the k largest entries; ties resolve to the lower index.
std::vector<std::uint8_t> top_k(const Eigen::VectorXd& values, int k) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[a] > values[b];
  });
  std::vector<std::uint8_t> mask(values.size(), 0);
  for (int i = 0; i < k; ++i) mask[order[i]] = 1;
  return mask;
}

std::vector<int> mask_to_indices(const std::vector<std::uint8_t>& mask,
                                 bool value) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (static_cast<bool>(mask[i]) == value) out.push_back(static_cast<int>(i));
  }
  return out;
}

void print_double(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

TscrrResult fit_tscrr(const Dataset& data, const TscrrConfig& cfg) {
  data.validate();
  const int n_pts = data.num_points();
  if (cfg.l_b < 1 || cfg.l_b > n_pts) {
    throw ConfigError("tscrr: l_b out of range");
  }
  MonomialBasis basis = enumerate_basis(data.dimension(), cfg.degree);
  if (cfg.l_m < 1 || cfg.l_m > basis.size()) {
    throw ConfigError("tscrr: l_m out of range");
  }
  Eigen::MatrixXd design = design_matrix(data, basis);

  FpModel fp = make_fp_model(design, data.y, cfg.l_m, cfg.l_b, cfg.big_m,
                             cfg.rho);
  RelaxOptions opts;
  opts.cut_limit = cfg.cut_limit;
  opts.integrality_tol = cfg.integrality_tol;
  RelaxationSolution relaxation = solve_linear_relaxation(fp, opts);

  QcqpPoint star = map_inverse(relaxation.point, fp.rho);

  TscrrResult result;
  result.relaxation = relaxation;
  result.s_rounded = top_k(star.s, cfg.l_m);
  result.b_rounded = top_k(star.b, cfg.l_b);

  std::vector<int> selected = mask_to_indices(result.s_rounded, true);
  std::vector<int> kept = mask_to_indices(result.b_rounded, true);
  std::vector<int> recovery_rows;
  if (cfg.recovery_scope == RecoveryScope::kKeptOnly) {
    recovery_rows = kept;
  } else {
    recovery_rows.resize(n_pts);
    std::iota(recovery_rows.begin(), recovery_rows.end(), 0);
  }

  Eigen::VectorXd coefficients;
  double gamma = 0.0;
  if (!cfg.fractional_multipliers) {
    Eigen::MatrixXd sub(design.rows(), static_cast<int>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) {
      sub.col(static_cast<int>(j)) = design.col(selected[j]);
    }
    ChebyshevFit fit = solve_chebyshev(sub, data.y, recovery_rows);
    coefficients = fit.coefficients;
    gamma = fit.gamma;
  } else {
    // Keep the relaxed selection values as fixed multipliers; monomials with
    // a zero multiplier drop out, the rest absorb it into the coefficient.
    selected.clear();
    for (int j = 0; j < star.s.size(); ++j) {
      if (std::abs(star.s[j]) > 1e-12) selected.push_back(j);
    }
    if (selected.empty()) {
      throw SolverError("tscrr: all selection multipliers vanished");
    }
    Eigen::MatrixXd sub(design.rows(), static_cast<int>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) {
      sub.col(static_cast<int>(j)) =
          design.col(selected[j]) * star.s[selected[j]];
    }
    ChebyshevFit fit = solve_chebyshev(sub, data.y, recovery_rows);
    coefficients.resize(static_cast<int>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) {
      coefficients[static_cast<int>(j)] =
          fit.coefficients[static_cast<int>(j)] * star.s[selected[j]];
    }
    gamma = fit.gamma;
  }

  result.model.basis = std::move(basis);
  result.model.selected = selected;
  result.model.coefficients = coefficients;
  result.model.gamma = gamma;
  result.model.anomalies = mask_to_indices(result.b_rounded, false);
  result.model.feature_ranges = data.feature_ranges;
  result.model.target_range = data.target_range;
  result.recovery_gamma = gamma;
  result.lower_bound = relaxation.objective;
  result.gap = gamma - result.lower_bound;
  return result;
}

ResidualProfile residual_profile(const TscrrResult& result,
                                 const Dataset& data) {
  ResidualProfile profile;
  const int n_pts = data.num_points();
  profile.residual.resize(n_pts);
  profile.anomalous.assign(n_pts, 0);
  for (int k = 0; k < n_pts; ++k) {
    Eigen::VectorXd x = data.X.row(k);
    profile.residual[k] = std::abs(data.y[k] - predict(result.model, x));
    profile.anomalous[k] = result.b_rounded[k] ? 0 : 1;
    if (result.b_rounded[k]) {
      profile.max_kept = std::max(profile.max_kept, profile.residual[k]);
    }
  }
  return profile;
}

void serialize_model(const SparseModel& model, std::ostream& os) {
  os << "sprfit-model 1\n";
  os << "dimension " << model.basis.dimension() << "\n";
  os << "degree " << model.basis.degree() << "\n";
  os << "normalized-features " << model.feature_ranges.size() << "\n";
  for (std::size_t i = 0; i < model.feature_ranges.size(); ++i) {
    os << "feature " << i << " ";
    print_double(os, model.feature_ranges[i].first);
    os << " ";
    print_double(os, model.feature_ranges[i].second);
    os << "\n";
  }
  os << "target ";
  print_double(os, model.target_range.first);
  os << " ";
  print_double(os, model.target_range.second);
  os << "\n";
  os << "terms " << model.selected.size() << "\n";
  for (std::size_t i = 0; i < model.selected.size(); ++i) {
    const MultiIndex& alpha = model.basis[model.selected[i]];
    for (int e : alpha.exponents) os << e << " ";
    print_double(os, model.coefficients[static_cast<int>(i)]);
    os << "\n";
  }
  os << "gamma ";
  print_double(os, model.gamma);
  os << "\n";
  os << "anomalies " << model.anomalies.size() << "\n";
  for (std::size_t i = 0; i < model.anomalies.size(); ++i) {
    os << model.anomalies[i] << (i + 1 < model.anomalies.size() ? " " : "");
  }
  os << "\n";
}

namespace {

std::string expect_token(std::istream& is, const std::string& what) {
  std::string tok;
  if (!(is >> tok)) throw DataError("model file truncated, expected " + what);
  return tok;
}

void expect_keyword(std::istream& is, const std::string& word) {
  std::string tok = expect_token(is, word);
  if (tok != word) {
    throw DataError("model file: expected '" + word + "', found '" + tok +
                    "'");
  }
}

double read_double(std::istream& is, const std::string& what) {
  double v;
  if (!(is >> v)) throw DataError("model file: bad number for " + what);
  return v;
}

int read_int(std::istream& is, const std::string& what) {
  int v;
  if (!(is >> v)) throw DataError("model file: bad integer for " + what);
  return v;
}

}  // namespace

SparseModel parse_model(std::istream& is) {
  expect_keyword(is, "sprfit-model");
  int version = read_int(is, "version");
  if (version != 1) {
    throw DataError("unsupported model version " + std::to_string(version));
  }
  expect_keyword(is, "dimension");
  int n = read_int(is, "dimension");
  expect_keyword(is, "degree");
  int d = read_int(is, "degree");

  SparseModel model;
  model.basis = enumerate_basis(n, d);

  expect_keyword(is, "normalized-features");
  int nf = read_int(is, "feature count");
  for (int i = 0; i < nf; ++i) {
    expect_keyword(is, "feature");
    read_int(is, "feature index");
    double lo = read_double(is, "feature min");
    double hi = read_double(is, "feature max");
    model.feature_ranges.emplace_back(lo, hi);
  }
  expect_keyword(is, "target");
  model.target_range.first = read_double(is, "target min");
  model.target_range.second = read_double(is, "target max");

  expect_keyword(is, "terms");
  int terms = read_int(is, "term count");
  model.coefficients.resize(terms);
  for (int t = 0; t < terms; ++t) {
    MultiIndex alpha;
    alpha.exponents.resize(n);
    for (int i = 0; i < n; ++i) alpha.exponents[i] = read_int(is, "exponent");
    model.coefficients[t] = read_double(is, "coefficient");
    int idx = -1;
    for (int j = 0; j < model.basis.size(); ++j) {
      if (model.basis[j] == alpha) {
        idx = j;
        break;
      }
    }
    if (idx < 0) throw DataError("model file: exponent vector outside basis");
    model.selected.push_back(idx);
  }
  expect_keyword(is, "gamma");
  model.gamma = read_double(is, "gamma");
  expect_keyword(is, "anomalies");
  int na = read_int(is, "anomaly count");
  for (int i = 0; i < na; ++i) {
    model.anomalies.push_back(read_int(is, "anomaly index"));
  }
  return model;
}

}  // namespace sprfit
