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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sprfit/bench.hpp"
#include "sprfit/exact.hpp"
#include "sprfit/lp.hpp"
#include "sprfit/relaxation.hpp"
#include "sprfit/tscrr.hpp"
#include "sprfit/verify.hpp"

namespace {

using nlohmann::json;
using namespace sprfit;

// Exit codes: 0 success, 1 usage error, 2 solver or budget error,
// 3 data error.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitData = 3;

struct DataFlags {
  std::string file;
  std::string target;
  std::vector<std::string> features;
  bool no_normalize = false;
};

void add_data_flags(CLI::App* cmd, DataFlags* flags) {
  cmd->add_option("--data", flags->file, "CSV file with a header row")
      ->required();
  cmd->add_option("--target", flags->target, "target column name")->required();
  cmd->add_option("--features", flags->features,
                  "feature column names (comma separated)")
      ->required()
      ->delimiter(',');
  cmd->add_flag("--no-normalize", flags->no_normalize,
                "skip min-max normalization of features and target");
}

Dataset load_dataset(const DataFlags& flags, int* dropped) {
  IngestResult ingest = ingest_csv(flags.file, flags.target, flags.features);
  if (dropped != nullptr) *dropped = ingest.dropped_rows;
  if (flags.no_normalize) return ingest.data;
  std::vector<int> all(ingest.data.num_points());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return normalize(ingest.data, all);
}

std::string monomial_list(const SparseModel& model) {
  std::string out;
  for (std::size_t i = 0; i < model.selected.size(); ++i) {
    if (i > 0) out += ", ";
    out += model.basis[model.selected[i]].to_string();
  }
  return out;
}

int run_enumerate(int n, int d, std::int64_t cap, const std::string& format) {
  MonomialBasis basis = enumerate_basis(n, d, cap);
  if (format == "json") {
    json out;
    out["n"] = n;
    out["d"] = d;
    out["size"] = basis.size();
    out["monomials"] = json::array();
    for (int j = 0; j < basis.size(); ++j) {
      out["monomials"].push_back(basis[j].exponents);
    }
    std::cout << out.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "index,monomial,degree\n";
    for (int j = 0; j < basis.size(); ++j) {
      std::cout << j << "," << basis[j].to_string() << ","
                << basis[j].total_degree() << "\n";
    }
  } else {
    std::cout << basis.size() << "\n";
    for (int j = 0; j < basis.size(); ++j) {
      std::cout << "  " << basis[j].to_string() << "\n";
    }
  }
  return kExitOk;
}

int run_fit(const DataFlags& data_flags, TscrrConfig cfg,
            const std::string& out_path, const std::string& format) {
  int dropped = 0;
  Dataset data = load_dataset(data_flags, &dropped);
  TscrrResult result = fit_tscrr(data, cfg);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write model file '" + out_path + "'");
    serialize_model(result.model, out);
  }

  if (format == "json") {
    json out;
    out["selected"] = result.model.selected;
    json monomials = json::array();
    for (int idx : result.model.selected) {
      monomials.push_back(result.model.basis[idx].to_string());
    }
    out["monomials"] = monomials;
    std::vector<double> coeffs(result.model.coefficients.data(),
                               result.model.coefficients.data() +
                                   result.model.coefficients.size());
    out["coefficients"] = coeffs;
    out["gamma"] = result.recovery_gamma;
    out["lower_bound"] = result.lower_bound;
    out["gap"] = result.gap;
    out["anomalies"] = result.model.anomalies;
    out["exactness_certified"] = result.relaxation.exactness.certified;
    out["integrality_gap"] = result.relaxation.exactness.integrality_gap;
    out["dropped_rows"] = dropped;
    std::cout << out.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "key,value\n";
    std::cout << "monomials,\"" << monomial_list(result.model) << "\"\n";
    std::printf("gamma,%.12g\n", result.recovery_gamma);
    std::printf("lower_bound,%.12g\n", result.lower_bound);
    std::printf("gap,%.12g\n", result.gap);
    std::cout << "anomaly_count," << result.model.anomalies.size() << "\n";
  } else {
    std::cout << "selected monomials: {" << monomial_list(result.model)
              << "}\n";
    std::cout << "coefficients:";
    for (int i = 0; i < result.model.coefficients.size(); ++i) {
      std::printf(" %.6g", result.model.coefficients[i]);
    }
    std::cout << "\n";
    std::printf("recovery gamma: %.6g\n", result.recovery_gamma);
    std::printf("relaxation bound: %.6g (gap %.3g)\n", result.lower_bound,
                result.gap);
    std::cout << "anomalies (" << result.model.anomalies.size() << "):";
    for (int k : result.model.anomalies) std::cout << " " << k;
    std::cout << "\n";
    std::cout << "exactness certified: "
              << (result.relaxation.exactness.certified ? "yes" : "no")
              << "\n";
    if (dropped > 0) {
      std::cout << "warning: dropped " << dropped << " unusable rows\n";
    }
  }
  return kExitOk;
}

int run_oracle(const DataFlags& data_flags, int degree, int l_m, int l_b,
               double big_m, std::int64_t budget, const std::string& method,
               const std::string& format) {
  Dataset data = load_dataset(data_flags, nullptr);
  MonomialBasis basis = enumerate_basis(data.dimension(), degree);
  MilpInstance inst;
  inst.design = design_matrix(data, basis);
  inst.y = data.y;
  inst.l_m = l_m;
  inst.l_b = l_b;
  inst.big_m = big_m;
  MilpMethod m = MilpMethod::kAuto;
  if (method == "enumerate") m = MilpMethod::kEnumerate;
  if (method == "bnb") m = MilpMethod::kBranchAndBound;
  MilpSolution sol = solve_milp_exact(inst, budget, m);

  if (format == "json") {
    json out;
    out["support"] = sol.support();
    json monomials = json::array();
    for (int idx : sol.support()) monomials.push_back(basis[idx].to_string());
    out["monomials"] = monomials;
    out["excluded"] = sol.excluded();
    out["gamma"] = sol.gamma;
    out["nodes"] = sol.nodes_explored;
    std::cout << out.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "key,value\n";
    std::printf("gamma,%.12g\n", sol.gamma);
    std::cout << "nodes," << sol.nodes_explored << "\n";
  } else {
    std::cout << "optimal support:";
    for (int idx : sol.support()) std::cout << " " << basis[idx].to_string();
    std::cout << "\nexcluded points:";
    for (int k : sol.excluded()) std::cout << " " << k;
    std::printf("\ngamma: %.6g\nnodes explored: %lld\n", sol.gamma,
                static_cast<long long>(sol.nodes_explored));
  }
  return kExitOk;
}

int run_relax(const DataFlags& data_flags, int degree, int l_m, int l_b,
              double big_m, double rho, const std::string& mps_path,
              const std::string& trace_path, const std::string& format) {
  Dataset data = load_dataset(data_flags, nullptr);
  MonomialBasis basis = enumerate_basis(data.dimension(), degree);
  FpModel model = make_fp_model(design_matrix(data, basis), data.y, l_m, l_b,
                                big_m, rho);
  if (!mps_path.empty()) {
    std::ofstream mps(mps_path);
    if (!mps) throw DataError("cannot write MPS file '" + mps_path + "'");
    relaxation_base_lp(model).write_mps(mps, "RELAX");
  }
  RelaxOptions opts;
  opts.integrality_tol = default_tolerance() == kFeasTol
                             ? opts.integrality_tol
                             : default_tolerance();
  RelaxationSolution sol = solve_linear_relaxation(model, opts);
  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    write_cut_trace(sol, trace);
  }

  if (format == "json") {
    json out;
    out["objective"] = sol.objective;
    out["cut_count"] = sol.cut_count;
    out["quad_residual"] = sol.quad_residual;
    out["exactness_certified"] = sol.exactness.certified;
    out["integrality_gap"] = sol.exactness.integrality_gap;
    out["literal_residual"] = sol.exactness.literal_residual;
    std::cout << out.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "key,value\n";
    std::printf("objective,%.12g\n", sol.objective);
    std::cout << "cut_count," << sol.cut_count << "\n";
    std::printf("quad_residual,%.12g\n", sol.quad_residual);
    std::cout << "certified," << (sol.exactness.certified ? 1 : 0) << "\n";
  } else {
    std::printf("relaxation bound: %.6g\n", sol.objective);
    std::printf("cuts: %d, quad residual: %.3g\n", sol.cut_count,
                sol.quad_residual);
    std::printf("exactness: %s (integrality gap %.3g)\n",
                sol.exactness.certified ? "certified" : "not certified",
                sol.exactness.integrality_gap);
  }
  return kExitOk;
}

int run_verify(std::uint64_t seed, const VerifyOptions& opts,
               const std::string& format) {
  std::vector<CheckResult> results = run_property_suite(seed, opts);
  bool all_pass = true;
  if (format == "json") {
    json out = json::array();
    for (const CheckResult& r : results) {
      out.push_back(
          {{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
      all_pass = all_pass && r.pass;
    }
    std::cout << out.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "name,pass,detail\n";
    for (const CheckResult& r : results) {
      std::cout << r.name << "," << (r.pass ? 1 : 0) << ",\"" << r.detail
                << "\"\n";
      all_pass = all_pass && r.pass;
    }
  } else {
    for (const CheckResult& r : results) {
      std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << " ("
                << r.detail << ")\n";
      all_pass = all_pass && r.pass;
    }
  }
  return all_pass ? kExitOk : kExitSolver;
}

int run_bench(const std::string& config_path, const std::string& out_dir,
              int jobs, bool traces, const std::string& format) {
  BenchConfig config = BenchConfig::parse_file(config_path);
  if (jobs > 0) config.jobs = jobs;
  if (traces) config.write_traces = true;
  BenchReport report = run_benchmark(config, out_dir);

  if (format == "json") {
    json out;
    out["metrics_csv"] = report.metrics_csv_path;
    out["summary_json"] = report.summary_json_path;
    out["rows"] = report.entries.size();
    json failures = json::array();
    for (const BenchFailure& f : report.failures) {
      failures.push_back({{"dataset", f.dataset}, {"error", f.error}});
    }
    out["failures"] = failures;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "wrote " << report.metrics_csv_path << " ("
              << report.entries.size() << " rows) and "
              << report.summary_json_path << "\n";
    for (const BenchFailure& f : report.failures) {
      std::cout << "FAILED " << f.dataset << ": " << f.error << "\n";
    }
  }
  return report.entries.empty() ? kExitSolver : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sparse minimax polynomial regression with anomaly filtering\n"
      "The TSCRR_TOL environment variable overrides the default solution "
      "tolerance."};
  app.require_subcommand(1);

  std::string format = "text";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  std::uint64_t seed = 20260810;
  app.add_option("--seed", seed, "seed for randomized suites")
      ->capture_default_str();

  // enumerate
  auto* enumerate = app.add_subcommand(
      "enumerate", "enumerate the monomial basis for n variables, degree d");
  int en_n = 1, en_d = 0;
  std::int64_t en_cap = kDefaultBasisCap;
  enumerate->add_option("--n", en_n, "number of variables")->required();
  enumerate->add_option("--d", en_d, "total degree bound")->required();
  enumerate->add_option("--cap", en_cap, "basis size capacity limit")
      ->capture_default_str();

  // fit
  auto* fit = app.add_subcommand("fit", "two-step sparse minimax fit");
  DataFlags fit_data;
  add_data_flags(fit, &fit_data);
  TscrrConfig cfg;
  std::string fit_out;
  std::string scope = "kept-only";
  fit->add_option("--degree", cfg.degree, "polynomial degree")->required();
  fit->add_option("--lm", cfg.l_m, "number of selected monomials")->required();
  fit->add_option("--lb", cfg.l_b, "number of kept data points")->required();
  fit->add_option("--big-m", cfg.big_m, "coefficient bound M")
      ->capture_default_str();
  fit->add_option("--rho", cfg.rho, "fractional scaling (0 = auto)")
      ->capture_default_str();
  fit->add_option("--recovery-scope", scope,
                  "rows entering the recovery LP")
      ->check(CLI::IsMember({"kept-only", "all-points"}))
      ->capture_default_str();
  fit->add_flag("--fractional-multipliers", cfg.fractional_multipliers,
                "keep relaxed selection values as multipliers instead of "
                "rounding");
  fit->add_option("--out", fit_out, "write the fitted model to this file");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "exact global solution by enumeration or branch-and-bound");
  DataFlags oracle_data;
  add_data_flags(oracle, &oracle_data);
  int or_degree = 2, or_lm = 1, or_lb = 1;
  double or_big_m = 1000.0;
  std::int64_t or_budget = 1'000'000;
  std::string or_method = "auto";
  oracle->add_option("--degree", or_degree, "polynomial degree")->required();
  oracle->add_option("--lm", or_lm, "number of selected monomials")
      ->required();
  oracle->add_option("--lb", or_lb, "number of kept data points")->required();
  oracle->add_option("--big-m", or_big_m, "coefficient bound M")
      ->capture_default_str();
  oracle->add_option("--node-budget", or_budget, "search node budget")
      ->capture_default_str();
  oracle->add_option("--method", or_method, "search method")
      ->check(CLI::IsMember({"auto", "enumerate", "bnb"}))
      ->capture_default_str();

  // relax
  auto* relax = app.add_subcommand(
      "relax", "solve the linear-based relaxation and report the bound");
  DataFlags relax_data;
  add_data_flags(relax, &relax_data);
  int rx_degree = 2, rx_lm = 1, rx_lb = 1;
  double rx_big_m = 1000.0, rx_rho = 0.0;
  std::string rx_mps, rx_trace;
  relax->add_option("--degree", rx_degree, "polynomial degree")->required();
  relax->add_option("--lm", rx_lm, "number of selected monomials")->required();
  relax->add_option("--lb", rx_lb, "number of kept data points")->required();
  relax->add_option("--big-m", rx_big_m, "coefficient bound M")
      ->capture_default_str();
  relax->add_option("--rho", rx_rho, "fractional scaling (0 = auto)")
      ->capture_default_str();
  relax->add_option("--dump-mps", rx_mps,
                    "write the base relaxation LP in MPS format");
  relax->add_option("--trace", rx_trace, "write the cut trace CSV here");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run the randomized property suite and print pass/fail");
  VerifyOptions vopts;
  verify->add_option("--bijection-points", vopts.bijection_points,
                     "round-trip sample count per scaling")
      ->capture_default_str();
  verify->add_option("--instances", vopts.sandwich_instances,
                     "random instances for the sandwich check")
      ->capture_default_str();
  verify->add_option("--certificate-points", vopts.certificate_points,
                     "points for the certificate check")
      ->capture_default_str();

  // bench
  auto* bench = app.add_subcommand(
      "bench", "run the benchmark harness from a config file");
  std::string bench_config, bench_out = "bench_out";
  int bench_jobs = 0;
  bool bench_traces = false;
  bench->add_option("--config", bench_config, "benchmark config file")
      ->required();
  bench->add_option("--out", bench_out, "output directory")
      ->capture_default_str();
  bench->add_option("--jobs", bench_jobs,
                    "parallel jobs (default: logical cores)");
  bench->add_flag("--traces", bench_traces, "write relaxation cut traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's per-error exit codes onto the documented taxonomy:
    // 0 for --help, 1 for any usage problem.
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*enumerate) return run_enumerate(en_n, en_d, en_cap, format);
    if (*fit) {
      cfg.recovery_scope = scope == "all-points" ? RecoveryScope::kAllPoints
                                                 : RecoveryScope::kKeptOnly;
      if (default_tolerance() != kFeasTol) {
        cfg.integrality_tol = default_tolerance();
      }
      return run_fit(fit_data, cfg, fit_out, format);
    }
    if (*oracle) {
      return run_oracle(oracle_data, or_degree, or_lm, or_lb, or_big_m,
                        or_budget, or_method, format);
    }
    if (*relax) {
      return run_relax(relax_data, rx_degree, rx_lm, rx_lb, rx_big_m, rx_rho,
                       rx_mps, rx_trace, format);
    }
    if (*verify) return run_verify(seed, vopts, format);
    if (*bench) {
      return run_bench(bench_config, bench_out, bench_jobs, bench_traces,
                       format);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}
