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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sprfit/lp.hpp"
#include "sprfit/relaxation.hpp"

namespace sprfit {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& text, double* out) {
  if (text.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

// Exact round trip, so identities between emitted numbers survive parsing.
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SplitSpec SplitSpec::parse(const std::string& text) {
  SplitSpec spec;
  std::string t = trim(text);
  if (t == "odd-even") {
    spec.kind = Kind::kOddEven;
  } else if (t == "head-tail") {
    spec.kind = Kind::kHeadTail;
  } else {
    throw ConfigError("unknown split kind '" + t + "'");
  }
  return spec;
}

std::string SplitSpec::name() const {
  return kind == Kind::kOddEven ? "interpolation" : "extrapolation";
}

std::pair<std::vector<int>, std::vector<int>> split(const Dataset& data,
                                                    const SplitSpec& spec) {
  const int n_pts = data.num_points();
  if (n_pts < 2) throw DataError("split needs at least two rows");
  std::vector<int> train, test;
  if (spec.kind == SplitSpec::Kind::kOddEven) {
    for (int k = 0; k < n_pts; ++k) {
      // odd 1-based position trains
      (k % 2 == 0 ? train : test).push_back(k);
    }
  } else {
    if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
      throw ConfigError("head-tail fraction must lie in (0, 1)");
    }
    int head = static_cast<int>(std::floor(spec.fraction * n_pts));
    head = std::clamp(head, 1, n_pts - 1);
    for (int k = 0; k < n_pts; ++k) (k < head ? train : test).push_back(k);
  }
  if (train.empty() || test.empty()) {
    throw DataError("degenerate split: one side is empty");
  }
  return {train, test};
}

IngestResult ingest_csv(const std::string& path, const std::string& target,
                        const std::vector<std::string>& features) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset file is empty");
  std::vector<std::string> header = split_fields(line, ',');

  auto column_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw DataError("column '" + name + "' not found in '" + path + "'");
  };
  int target_col = column_of(target);
  std::vector<int> feature_cols;
  for (const std::string& f : features) feature_cols.push_back(column_of(f));

  std::vector<std::vector<double>> rows;
  int dropped = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line, ',');
    std::vector<double> row(feature_cols.size() + 1);
    bool ok = true;
    for (std::size_t j = 0; j < feature_cols.size() && ok; ++j) {
      ok = feature_cols[j] < static_cast<int>(fields.size()) &&
           parse_number(fields[feature_cols[j]], &row[j]);
    }
    if (ok) {
      ok = target_col < static_cast<int>(fields.size()) &&
           parse_number(fields[target_col], &row.back());
    }
    if (ok) {
      rows.push_back(std::move(row));
    } else {
      ++dropped;
    }
  }
  if (rows.empty()) throw DataError("no usable rows in '" + path + "'");

  IngestResult result;
  result.dropped_rows = dropped;
  result.feature_names = features;
  result.target_name = target;
  const int n_pts = static_cast<int>(rows.size());
  const int n_feat = static_cast<int>(features.size());
  result.data.X.resize(n_pts, n_feat);
  result.data.y.resize(n_pts);
  for (int k = 0; k < n_pts; ++k) {
    for (int j = 0; j < n_feat; ++j) result.data.X(k, j) = rows[k][j];
    result.data.y[k] = rows[k][n_feat];
  }
  return result;
}

namespace {

std::pair<double, double> column_range(const Eigen::VectorXd& column,
                                       const std::vector<int>& rows) {
  double lo = kInfinity, hi = -kInfinity;
  for (int k : rows) {
    lo = std::min(lo, column[k]);
    hi = std::max(hi, column[k]);
  }
  return {lo, hi};
}

double rescale(double v, const std::pair<double, double>& range) {
  if (range.second == range.first) return 0.5;
  return (v - range.first) / (range.second - range.first);
}

}  // namespace

Dataset normalize(const Dataset& data, const std::vector<int>& train_rows) {
  if (train_rows.empty()) throw DataError("normalize: empty training rows");
  data.validate();
  Dataset out = data;
  out.feature_ranges.clear();
  for (int j = 0; j < data.dimension(); ++j) {
    auto range = column_range(data.X.col(j), train_rows);
    out.feature_ranges.push_back(range);
    for (int k = 0; k < data.num_points(); ++k) {
      out.X(k, j) = rescale(data.X(k, j), range);
    }
  }
  out.target_range = column_range(data.y, train_rows);
  for (int k = 0; k < data.num_points(); ++k) {
    out.y[k] = rescale(data.y[k], out.target_range);
  }
  out.normalized = true;
  return out;
}

double denormalize_target(const Dataset& normalized_data, double value) {
  const auto& range = normalized_data.target_range;
  if (range.second == range.first) return range.first;
  return range.first + value * (range.second - range.first);
}

Metrics compute_metrics(const Eigen::VectorXd& y_true,
                        const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.size() < 1) {
    throw DataError("metrics: prediction/truth length mismatch");
  }
  Metrics m;
  m.count = static_cast<int>(y_true.size());
  double raw_sse = (y_true - y_pred).squaredNorm();
  m.mse = raw_sse / m.count;
  m.sse = m.mse * m.count;  // exact identity in the emitted report
  double mean = y_true.mean();
  double denom = (y_true.array() - mean).matrix().squaredNorm();
  if (denom > 0.0) {
    m.r2 = 1.0 - m.sse / denom;
  } else {
    m.r2 = m.sse == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

namespace {

Eigen::VectorXd subset(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<int>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<int>(i)] = v[idx[i]];
  return out;
}

Eigen::MatrixXd subset_rows(const Eigen::MatrixXd& m,
                            const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<int>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<int>(i)) = m.row(idx[i]);
  return out;
}

}  // namespace

std::vector<MetricsEntry> run_baselines(const Dataset& normalized,
                                        const std::vector<int>& train,
                                        const std::vector<int>& test,
                                        int degree) {
  std::vector<MetricsEntry> entries;
  struct Spec {
    const char* name;
    int degree;
  };
  for (const Spec& spec : {Spec{"linear", 1}, Spec{"polynomial", degree}}) {
    MonomialBasis basis = enumerate_basis(normalized.dimension(), spec.degree);
    Eigen::MatrixXd design = design_matrix(normalized, basis);
    Eigen::VectorXd coeffs = solve_least_squares(
        subset_rows(design, train), subset(normalized.y, train));
    Eigen::VectorXd pred = subset_rows(design, test) * coeffs;
    MetricsEntry entry;
    entry.model = spec.name;
    entry.metrics = compute_metrics(subset(normalized.y, test), pred);
    entries.push_back(std::move(entry));
  }
  return entries;
}

BenchConfig BenchConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::filesystem::path base = std::filesystem::path(path).parent_path();

  BenchConfig config;
  BenchDataset* current = nullptr;
  bool in_global = false;
  TscrrConfig defaults;
  double default_fraction = 0.97;   // set in [global], applies everywhere
  double section_fraction = 0.97;   // per-dataset override

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[' && text.back() == ']') {
      std::string name = trim(text.substr(1, text.size() - 2));
      if (name == "global") {
        in_global = true;
        current = nullptr;
      } else {
        in_global = false;
        config.datasets.emplace_back();
        current = &config.datasets.back();
        current->name = name;
        current->tscrr = defaults;
        section_fraction = default_fraction;
      }
      continue;
    }
    std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    auto as_double = [&](const std::string& what) {
      double v;
      if (!parse_number(value, &v)) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": bad number for " + what);
      }
      return v;
    };
    if (in_global) {
      if (key == "jobs") {
        config.jobs = static_cast<int>(as_double("jobs"));
      } else if (key == "traces") {
        config.write_traces = value == "true" || value == "1";
      } else if (key == "big_m") {
        defaults.big_m = as_double("big_m");
      } else if (key == "rho") {
        defaults.rho = as_double("rho");
      } else if (key == "fraction") {
        default_fraction = as_double("fraction");
        section_fraction = default_fraction;
      } else {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unknown global key '" + key + "'");
      }
      continue;
    }
    if (current == nullptr) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside a section");
    }
    if (key == "file") {
      std::filesystem::path p(value);
      current->file = p.is_absolute() ? p.string() : (base / p).string();
    } else if (key == "target") {
      current->target = value;
    } else if (key == "features") {
      current->features.clear();
      for (const std::string& f : split_fields(value, ',')) {
        if (!f.empty()) current->features.push_back(f);
      }
    } else if (key == "degree") {
      current->tscrr.degree = static_cast<int>(as_double("degree"));
    } else if (key == "lm") {
      current->tscrr.l_m = static_cast<int>(as_double("lm"));
    } else if (key == "lb") {
      current->tscrr.l_b = static_cast<int>(as_double("lb"));
    } else if (key == "big_m") {
      current->tscrr.big_m = as_double("big_m");
    } else if (key == "rho") {
      current->tscrr.rho = as_double("rho");
    } else if (key == "splits") {
      current->splits.clear();
      for (const std::string& s : split_fields(value, ',')) {
        if (!s.empty()) {
          SplitSpec spec = SplitSpec::parse(s);
          spec.fraction = section_fraction;
          current->splits.push_back(spec);
        }
      }
    } else if (key == "fraction") {
      section_fraction = as_double("fraction");
      for (auto& s : current->splits) s.fraction = section_fraction;
    } else {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }

  if (config.datasets.empty()) {
    throw ConfigError("config declares no datasets");
  }
  for (const BenchDataset& d : config.datasets) {
    if (d.file.empty() || d.target.empty() || d.features.empty() ||
        d.splits.empty()) {
      throw ConfigError("dataset '" + d.name +
                        "' needs file, target, features and splits");
    }
  }
  return config;
}

namespace {

struct Task {
  int dataset_index;
  SplitSpec spec;
};

struct TaskResult {
  std::vector<MetricsEntry> entries;
  std::string error;
  int dropped_rows = 0;
  int train_count = 0;
  int test_count = 0;
  RelaxationSolution relaxation;  // for optional traces
  bool has_relaxation = false;
};

TaskResult run_task(const BenchDataset& dataset, const SplitSpec& spec) {
  TaskResult result;
  IngestResult ingest = ingest_csv(dataset.file, dataset.target,
                                   dataset.features);
  result.dropped_rows = ingest.dropped_rows;
  auto [train, test] = split(ingest.data, spec);
  result.train_count = static_cast<int>(train.size());
  result.test_count = static_cast<int>(test.size());
  Dataset normalized = normalize(ingest.data, train);

  // Baselines.
  for (MetricsEntry entry :
       run_baselines(normalized, train, test, dataset.tscrr.degree)) {
    entry.dataset = dataset.name;
    entry.split = spec.name();
    result.entries.push_back(std::move(entry));
  }

  // TS-CRR on the training subset.
  Dataset train_data;
  train_data.X = subset_rows(normalized.X, train);
  train_data.y = subset(normalized.y, train);
  train_data.feature_ranges = normalized.feature_ranges;
  train_data.target_range = normalized.target_range;
  train_data.normalized = true;

  TscrrConfig cfg = dataset.tscrr;
  if (cfg.l_b > train_data.num_points()) {
    throw ConfigError("dataset '" + dataset.name +
                      "': lb exceeds the training row count");
  }
  TscrrResult fit = fit_tscrr(train_data, cfg);
  result.relaxation = fit.relaxation;
  result.has_relaxation = true;

  Eigen::VectorXd pred(static_cast<int>(test.size()));
  for (std::size_t i = 0; i < test.size(); ++i) {
    Eigen::VectorXd x = normalized.X.row(test[i]);
    pred[static_cast<int>(i)] = predict(fit.model, x);
  }
  MetricsEntry entry;
  entry.dataset = dataset.name;
  entry.model = "tscrr";
  entry.split = spec.name();
  entry.metrics = compute_metrics(subset(normalized.y, test), pred);
  entry.gamma = fit.recovery_gamma;
  entry.lower_bound = fit.lower_bound;
  entry.gap = fit.gap;
  entry.anomaly_count = static_cast<int>(fit.model.anomalies.size());
  for (int local : fit.model.anomalies) entry.anomalies.push_back(train[local]);
  entry.exactness_certified = fit.relaxation.exactness.certified;
  result.entries.push_back(std::move(entry));
  return result;
}

std::string csv_cell(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& config,
                          const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);

  std::vector<Task> tasks;
  for (std::size_t i = 0; i < config.datasets.size(); ++i) {
    for (const SplitSpec& spec : config.datasets[i].splits) {
      tasks.push_back({static_cast<int>(i), spec});
    }
  }

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  int workers = config.jobs > 0
                    ? config.jobs
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp<int>(workers, 1, static_cast<int>(tasks.size()));

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      try {
        results[i] = run_task(config.datasets[task.dataset_index], task.spec);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  BenchReport report;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const BenchDataset& dataset = config.datasets[tasks[i].dataset_index];
    if (!results[i].error.empty()) {
      report.failures.push_back(
          {dataset.name + " (" + tasks[i].spec.name() + ")",
           results[i].error});
      continue;
    }
    for (const MetricsEntry& e : results[i].entries) {
      report.entries.push_back(e);
    }
    if (config.write_traces && results[i].has_relaxation) {
      std::ofstream trace(std::filesystem::path(output_dir) /
                          ("trace_" + dataset.name + "_" +
                           tasks[i].spec.name() + ".csv"));
      write_cut_trace(results[i].relaxation, trace);
    }
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const MetricsEntry& a, const MetricsEntry& b) {
              return std::tie(a.dataset, a.model, a.split) <
                     std::tie(b.dataset, b.model, b.split);
            });

  // metrics.csv
  std::filesystem::path csv_path =
      std::filesystem::path(output_dir) / "metrics.csv";
  {
    std::ofstream csv(csv_path);
    csv << "dataset,model,split,r2,mse,sse,gamma,lower_bound,gap,"
           "anomaly_count\n";
    for (const MetricsEntry& e : report.entries) {
      csv << e.dataset << "," << e.model << "," << e.split << ",";
      csv << (std::isnan(e.metrics.r2) ? "undefined"
                                       : format_double(e.metrics.r2));
      csv << "," << format_double(e.metrics.mse) << ","
          << format_double(e.metrics.sse) << "," << csv_cell(e.gamma) << ","
          << csv_cell(e.lower_bound) << "," << csv_cell(e.gap) << ","
          << e.anomaly_count << "\n";
    }
  }
  report.metrics_csv_path = csv_path.string();

  // summary.json
  nlohmann::json summary;
  summary["entries"] = nlohmann::json::array();
  for (const MetricsEntry& e : report.entries) {
    nlohmann::json row;
    row["dataset"] = e.dataset;
    row["model"] = e.model;
    row["split"] = e.split;
    row["r2"] = e.metrics.r2;
    row["mse"] = e.metrics.mse;
    row["sse"] = e.metrics.sse;
    row["test_count"] = e.metrics.count;
    if (e.model == "tscrr") {
      row["gamma"] = e.gamma;
      row["lower_bound"] = e.lower_bound;
      row["gap"] = e.gap;
      row["anomaly_count"] = e.anomaly_count;
      row["anomalies"] = e.anomalies;
      row["exactness_certified"] = e.exactness_certified;
    }
    summary["entries"].push_back(row);
  }
  summary["failures"] = nlohmann::json::array();
  for (const BenchFailure& f : report.failures) {
    summary["failures"].push_back({{"dataset", f.dataset}, {"error", f.error}});
  }
  std::filesystem::path json_path =
      std::filesystem::path(output_dir) / "summary.json";
  {
    std::ofstream js(json_path);
    js << summary.dump(2) << "\n";
  }
  report.summary_json_path = json_path.string();
  return report;
}

}  // namespace sprfit
