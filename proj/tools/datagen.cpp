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

// Regenerates the bundled synthetic datasets under data/. Both files are
// deterministic; re-running produces byte-identical output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "sprfit/common.hpp"

namespace {

void write_value(std::ofstream& os, double v, bool last) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf << (last ? "\n" : ",");
}

// 20 points of y = 1 + 2 x1 - x2^2 with gross outliers at rows 4 and 11.
// Each feature column contains exact 0 and 1, so min-max normalization is
// the identity on the features and only shifts/scales the target, which
// leaves the sparse support unchanged.
void write_outlier_synthetic(const std::string& path) {
  std::ofstream os(path);
  os << "x1,x2,y\n";
  sprfit::Rng rng(9001);
  const int n_pts = 20;
  double x1[n_pts], x2[n_pts];
  for (int k = 0; k < n_pts; ++k) {
    x1[k] = rng.uniform(0, 1);
    x2[k] = rng.uniform(0, 1);
  }
  x1[0] = 0.0;
  x1[1] = 1.0;
  x2[0] = 0.0;
  x2[1] = 1.0;
  for (int k = 0; k < n_pts; ++k) {
    double y = 1.0 + 2.0 * x1[k] - x2[k] * x2[k];
    if (k == 4) y += 8.0;
    if (k == 11) y -= 6.0;
    write_value(os, x1[k], false);
    write_value(os, x2[k], false);
    write_value(os, y, true);
  }
}

// 720 hourly rows: a drifting daily feature, a weekly feature, and a sparse
// cubic response with mild noise plus six gross anomalies late in the
// sample (where an unfiltered fit is bent right before the extrapolation
// window).
void write_timeseries_synthetic(const std::string& path) {
  std::ofstream os(path);
  os << "x1,x2,y\n";
  sprfit::Rng rng(42424242);
  const int n_pts = 720;
  const double pi = 3.14159265358979323846;
  for (int t = 0; t < n_pts; ++t) {
    double u = static_cast<double>(t) / (n_pts - 1);
    double x1 = 0.1 + 0.6 * u * u * u * u + 0.03 * std::sin(2.0 * pi * t / 24.0);
    double x2 = 0.5 + 0.35 * std::sin(2.0 * pi * t / 168.0 + 1.0);
    double y = 1.0 + 2.0 * x1 - 1.5 * x2 * x2 + 0.8 * x1 * x2 +
               0.01 * rng.uniform(-1, 1);
    if (t == 620 || t == 650 || t == 661) y += 3.0 + 0.3 * (t % 7);
    if (t == 673 || t == 680 || t == 690) y -= 2.5 + 0.2 * (t % 5);
    write_value(os, x1, false);
    write_value(os, x2, false);
    write_value(os, y, true);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "data";
  write_outlier_synthetic(dir + "/synth20.csv");
  write_timeseries_synthetic(dir + "/synth720.csv");
  std::printf("wrote %s/synth20.csv and %s/synth720.csv\n", dir.c_str(),
              dir.c_str());
  return 0;
}
