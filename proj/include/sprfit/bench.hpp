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

#ifndef SPRFIT_BENCH_HPP_
#define SPRFIT_BENCH_HPP_

#include <string>
#include <utility>
#include <vector>

#include "sprfit/poly.hpp"
#include "sprfit/tscrr.hpp"

namespace sprfit {

struct SplitSpec {
  enum class Kind { kOddEven, kHeadTail };
  Kind kind = Kind::kOddEven;
  double fraction = 0.97;  // head-tail only: share of rows that train

  static SplitSpec parse(const std::string& text);
  std::string name() const;  // "interpolation" / "extrapolation"
};

/// Odd/even assigns rows with odd 1-based position to training; head/tail
/// trains on the first floor(fraction*N) rows (at least one row on each
/// side). Throws DataError when a side would end up empty.
std::pair<std::vector<int>, std::vector<int>> split(const Dataset& data,
                                                    const SplitSpec& spec);

struct IngestResult {
  Dataset data;
  int dropped_rows = 0;  // rows with missing or non-numeric fields
  std::vector<std::string> feature_names;
  std::string target_name;
};

/// Header-based CSV ingestion. Rows with any unusable field in the selected
/// columns are dropped (counted); row order is preserved.
IngestResult ingest_csv(const std::string& path, const std::string& target,
                        const std::vector<std::string>& features);

/// Min-max scales every feature column and the target into [0,1] using
/// statistics of the training rows only; constant columns map to 0.5. The
/// (min, max) pairs are recorded on the returned dataset.
Dataset normalize(const Dataset& data, const std::vector<int>& train_rows);

/// Maps a prediction on the normalized scale back to original units.
double denormalize_target(const Dataset& normalized_data, double value);

struct Metrics {
  double r2 = 0.0;  // NaN marks the undefined case (constant truth, sse > 0)
  double mse = 0.0;
  double sse = 0.0;  // emitted as mse * count so the identity holds exactly
  int count = 0;
};

Metrics compute_metrics(const Eigen::VectorXd& y_true,
                        const Eigen::VectorXd& y_pred);

/// One report row: model x split x dataset.
struct MetricsEntry {
  std::string dataset;
  std::string model;  // "tscrr", "linear", "polynomial"
  std::string split;  // "interpolation", "extrapolation"
  Metrics metrics;
  // TS-CRR extras; NaN for the baselines.
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  int anomaly_count = 0;
  std::vector<int> anomalies;
  bool exactness_certified = false;
};

/// Least-squares baselines on the degree-1 and full degree-d bases, fitted
/// on the training rows of the (already normalized) dataset and scored on
/// the test rows.
std::vector<MetricsEntry> run_baselines(const Dataset& normalized,
                                        const std::vector<int>& train,
                                        const std::vector<int>& test,
                                        int degree);

struct BenchDataset {
  std::string name;
  std::string file;
  std::string target;
  std::vector<std::string> features;
  TscrrConfig tscrr;
  std::vector<SplitSpec> splits;
};

struct BenchConfig {
  std::vector<BenchDataset> datasets;
  int jobs = 0;  // 0 = hardware concurrency
  bool write_traces = false;

  static BenchConfig parse_file(const std::string& path);
};

struct BenchFailure {
  std::string dataset;
  std::string error;
};

struct BenchReport {
  std::vector<MetricsEntry> entries;  // ordered by (dataset, model, split)
  std::vector<BenchFailure> failures;
  std::string metrics_csv_path;
  std::string summary_json_path;
};

/// Runs TS-CRR plus both baselines for every (dataset, split) pair of the
/// config, writing metrics.csv and summary.json under output_dir.
/// Per-dataset failures are recorded and the run continues.
BenchReport run_benchmark(const BenchConfig& config,
                          const std::string& output_dir);

}  // namespace sprfit

#endif  // SPRFIT_BENCH_HPP_
