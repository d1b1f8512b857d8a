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

#include "sprfit/bench.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace sprfit;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  fs::path dir = fs::current_path() / "bench_tmp";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  fs::path p = tmp_dir() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset tiny(int n_pts) {
  Dataset data;
  data.X.resize(n_pts, 1);
  data.y.resize(n_pts);
  for (int k = 0; k < n_pts; ++k) {
    data.X(k, 0) = k;
    data.y[k] = 2.0 * k + 1.0;
  }
  return data;
}

}  // namespace

TEST_CASE("odd-even split by 1-based position") {
  auto [train, test] = split(tiny(10), SplitSpec{});
  CHECK(train == std::vector<int>{0, 2, 4, 6, 8});
  CHECK(test == std::vector<int>{1, 3, 5, 7, 9});
}

TEST_CASE("head-tail split uses the floor rule") {
  SplitSpec spec;
  spec.kind = SplitSpec::Kind::kHeadTail;
  spec.fraction = 0.97;
  auto [train, test] = split(tiny(720), spec);
  CHECK(train.size() == 698);
  CHECK(test.size() == 22);
  CHECK(train.front() == 0);
  CHECK(test.front() == 698);

  // Boundary guard: both sides stay non-empty.
  auto [t2, s2] = split(tiny(2), spec);
  CHECK(t2 == std::vector<int>{0});
  CHECK(s2 == std::vector<int>{1});

  CHECK_THROWS_AS(split(tiny(1), spec), DataError);
}

TEST_CASE("csv ingestion keeps clean rows and drops broken ones") {
  fs::path p = write_file("clean.csv",
                          "a,b,y\n"
                          "1,2,3\n"
                          "4,5,6\n"
                          "7,,9\n"
                          "10,11,12\n");
  IngestResult r = ingest_csv(p.string(), "y", {"a", "b"});
  CHECK(r.data.num_points() == 3);
  CHECK(r.data.dimension() == 2);
  CHECK(r.dropped_rows == 1);
  CHECK(r.data.y[2] == 12.0);

  CHECK_THROWS_WITH_AS(ingest_csv(p.string(), "target", {"a"}),
                       doctest::Contains("target"), DataError);
  fs::path empty = write_file("empty.csv", "a,b,y\n");
  CHECK_THROWS_AS(ingest_csv(empty.string(), "y", {"a", "b"}), DataError);
}

TEST_CASE("normalization from training statistics only") {
  Dataset data;
  data.X.resize(4, 2);
  data.X << 10, 7,
            20, 7,
            15, 7,
            25, 7;
  data.y.resize(4);
  data.y << 0, 1, 2, 3;
  Dataset norm = normalize(data, {0, 1});
  CHECK(norm.X(0, 0) == 0.0);
  CHECK(norm.X(1, 0) == 1.0);
  // Midpoint of the training span lands on one half.
  CHECK(norm.X(2, 0) == doctest::Approx(0.5));
  // Value outside the training range extrapolates without clamping.
  CHECK(norm.X(3, 0) == doctest::Approx(1.5));
  // Constant columns map to one half.
  CHECK(norm.X(0, 1) == 0.5);
  CHECK(norm.X(3, 1) == 0.5);
  CHECK(norm.normalized);
  CHECK(norm.feature_ranges[0] == std::pair<double, double>{10.0, 20.0});
  CHECK_THROWS_AS(normalize(data, {}), DataError);
}

TEST_CASE("metrics: hand values and the sse identity") {
  Eigen::VectorXd truth(2), pred(2);
  truth << 0, 2;
  pred << 1, 1;
  Metrics m = compute_metrics(truth, pred);
  CHECK(m.sse == doctest::Approx(2.0));
  CHECK(m.mse == doctest::Approx(1.0));
  CHECK(m.r2 == doctest::Approx(0.0));
  CHECK(m.sse == m.mse * m.count);  // exact, not approximate

  Metrics perfect = compute_metrics(truth, truth);
  CHECK(perfect.r2 == 1.0);
  CHECK(perfect.mse == 0.0);

  Eigen::VectorXd constant(3), off(3);
  constant << 1, 1, 1;
  off << 1, 1, 2;
  CHECK(std::isnan(compute_metrics(constant, off).r2));
  CHECK(compute_metrics(constant, constant).r2 == 1.0);

  CHECK_THROWS_AS(compute_metrics(truth, constant), DataError);
}

TEST_CASE("unit change rescales mse by the squared target span") {
  Rng rng(181);
  Dataset data;
  data.X.resize(12, 1);
  data.y.resize(12);
  for (int k = 0; k < 12; ++k) {
    data.X(k, 0) = rng.uniform(0, 1);
    data.y[k] = rng.uniform(5, 11);
  }
  std::vector<int> train{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<int> test{8, 9, 10, 11};
  Dataset norm = normalize(data, train);

  Eigen::VectorXd pred_norm(4), pred_raw(4), truth_norm(4), truth_raw(4);
  for (int i = 0; i < 4; ++i) {
    pred_norm[i] = norm.y[test[i]] + 0.05 * (i + 1);
    pred_raw[i] = denormalize_target(norm, pred_norm[i]);
    truth_norm[i] = norm.y[test[i]];
    truth_raw[i] = data.y[test[i]];
  }
  double span = norm.target_range.second - norm.target_range.first;
  Metrics m_norm = compute_metrics(truth_norm, pred_norm);
  Metrics m_raw = compute_metrics(truth_raw, pred_raw);
  CHECK(m_raw.mse ==
        doctest::Approx(m_norm.mse * span * span).epsilon(1e-10));
}

TEST_CASE("baselines: realizable linear data and nested training fit") {
  Rng rng(191);
  Dataset data;
  data.X.resize(14, 2);
  data.y.resize(14);
  for (int k = 0; k < 14; ++k) {
    data.X(k, 0) = rng.uniform(0, 1);
    data.X(k, 1) = rng.uniform(0, 1);
    data.y[k] = 0.3 + 0.5 * data.X(k, 0) - 0.2 * data.X(k, 1);
  }
  auto [train, test] = split(data, SplitSpec{});
  Dataset norm = normalize(data, train);
  std::vector<MetricsEntry> entries = run_baselines(norm, train, test, 2);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].model == "linear");
  CHECK(entries[0].metrics.r2 == doctest::Approx(1.0).epsilon(1e-9));

  // On the training rows the richer basis can never fit worse.
  std::vector<MetricsEntry> on_train = run_baselines(norm, train, train, 3);
  CHECK(on_train[1].metrics.mse <= on_train[0].metrics.mse + 1e-12);
}

namespace {

std::string make_csv(Rng& rng, int n_pts, bool inject_outliers) {
  std::ostringstream os;
  os << "x1,x2,load\n";
  for (int k = 0; k < n_pts; ++k) {
    double x1 = rng.uniform(0, 1);
    double x2 = rng.uniform(0, 1);
    double y = 1.0 + 0.8 * x1 - 0.5 * x2 * x2 + 0.01 * rng.uniform(-1, 1);
    if (inject_outliers && (k == 5 || k == 11)) y += 4.0;
    os << x1 << "," << x2 << "," << y << "\n";
  }
  return os.str();
}

}  // namespace

TEST_CASE("benchmark run: counts, sandwich column, determinism, isolation") {
  Rng rng(202);
  write_file("ds_a.csv", make_csv(rng, 40, true));
  write_file("ds_b.csv", make_csv(rng, 36, false));
  fs::path config_path = write_file("bench.conf",
                                    "[global]\n"
                                    "jobs = 2\n"
                                    "[alpha]\n"
                                    "file = ds_a.csv\n"
                                    "target = load\n"
                                    "features = x1, x2\n"
                                    "degree = 2\n"
                                    "lm = 3\n"
                                    "lb = 17\n"
                                    "splits = odd-even, head-tail\n"
                                    "fraction = 0.9\n"
                                    "[beta]\n"
                                    "file = ds_b.csv\n"
                                    "target = load\n"
                                    "features = x1, x2\n"
                                    "degree = 2\n"
                                    "lm = 3\n"
                                    "lb = 16\n"
                                    "splits = odd-even, head-tail\n"
                                    "fraction = 0.9\n");
  BenchConfig config = BenchConfig::parse_file(config_path.string());
  REQUIRE(config.datasets.size() == 2);

  fs::path out1 = tmp_dir() / "out1";
  BenchReport report = run_benchmark(config, out1.string());
  CHECK(report.failures.empty());
  // 2 datasets x 3 models x 2 splits
  CHECK(report.entries.size() == 12);
  for (const MetricsEntry& e : report.entries) {
    CHECK(e.metrics.sse == e.metrics.mse * e.metrics.count);
    if (e.model == "tscrr") CHECK(e.gap >= -1e-7);
  }

  fs::path out2 = tmp_dir() / "out2";
  run_benchmark(config, out2.string());
  CHECK(slurp(out1 / "metrics.csv") == slurp(out2 / "metrics.csv"));
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));

  // A broken dataset is reported as a failure without sinking the run.
  BenchConfig broken = config;
  broken.datasets[0].file = (tmp_dir() / "missing.csv").string();
  BenchReport partial =
      run_benchmark(broken, (tmp_dir() / "out3").string());
  CHECK(partial.failures.size() == 2);  // both splits of the broken dataset
  CHECK(partial.entries.size() == 6);
}

TEST_CASE("per-dataset fraction does not leak into later sections") {
  fs::path p = write_file("fractions.conf",
                          "[global]\n"
                          "fraction = 0.8\n"
                          "[one]\n"
                          "file = a.csv\n"
                          "target = y\n"
                          "features = x\n"
                          "fraction = 0.5\n"
                          "splits = head-tail\n"
                          "[two]\n"
                          "file = b.csv\n"
                          "target = y\n"
                          "features = x\n"
                          "splits = head-tail\n");
  BenchConfig config = BenchConfig::parse_file(p.string());
  REQUIRE(config.datasets.size() == 2);
  CHECK(config.datasets[0].splits[0].fraction == 0.5);
  CHECK(config.datasets[1].splits[0].fraction == 0.8);
}

TEST_CASE("config parser rejects malformed input") {
  fs::path no_data = write_file("empty.conf", "[global]\njobs = 1\n");
  CHECK_THROWS_AS(BenchConfig::parse_file(no_data.string()), ConfigError);

  fs::path bad_key = write_file("badkey.conf",
                                "[x]\nfile = a.csv\nwhat = 3\n");
  CHECK_THROWS_AS(BenchConfig::parse_file(bad_key.string()), ConfigError);

  fs::path incomplete = write_file("incomplete.conf",
                                   "[x]\nfile = a.csv\n");
  CHECK_THROWS_AS(BenchConfig::parse_file(incomplete.string()), ConfigError);

  CHECK_THROWS_AS(BenchConfig::parse_file("/nonexistent/cfg"), ConfigError);
}
