// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

#include "qritz/metrics.hpp"
#include "qritz/types.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace qritz {

inline constexpr const char* kVersion = "qritz 0.1.0";

// Flat key/value run configuration; every key can come from the config
// file or a --set override.
struct RunConfig {
    std::string problem = "dirichlet2";
    Index blocks = 3;
    Index width = 8;
    std::string sampler = "sobol"; // sobol | mc
    std::uint64_t seed = 1;
    std::uint64_t sobol_offset = 0;
    bool sampler_fixed = false; // reuse the first batch every iteration
    Index batch = 500;
    Index batch_boundary = 100;
    std::string optimizer = "adam"; // adam | sgd
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    Index iterations = 10000;
    Index eval_every = 50; // 0 disables error evaluation
    Index eval_points = 16384;
    Index window_iters = 50;
    double penalty_beta = 1.0;
    std::string out_dir = ".";
    std::string stem = "run";

    static RunConfig from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::map<std::string, std::string> echo() const;
    void validate() const;
};

struct RunRecord {
    RunConfig config;
    ErrorSeries errors;
    std::vector<double> loss_series; // one entry per iteration
    double final_windowed = std::numeric_limits<double>::quiet_NaN();
    // same error on a grid twice the size, a self-consistency guard
    double final_windowed_2x = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
    bool complete = false;
    std::string version = kVersion;

    std::string errors_path;
    std::string loss_path;
    std::string plot_path;
    std::string meta_path;
    std::string params_path;
};

// Full training loop: sample, evaluate loss and gradient, step, measure.
// Persists the record under config.out_dir; on numeric failure the partial
// record is written with complete=false before the error propagates.
RunRecord train(const RunConfig& config);

// Writes <stem>_{errors,loss,plot,meta}.csv and <stem>_params.bin.  All CSV
// content is a pure function of (config, seeds); wall-clock goes to a
// separate timing file.
void write_record(RunRecord& record, const Vector* params = nullptr);

// One row per (problem, sampler, batch) cell aggregated over seeds.
struct CompareRow {
    std::string problem;
    Index dimension = 0;
    std::string sampler;
    double batch = 0;
    int seeds = 0;
    double error_mean = 0.0;
    double error_min = 0.0;
    double error_max = 0.0;
    double pairwise = std::numeric_limits<double>::quiet_NaN(); // vs previous batch
    double fitted = std::numeric_limits<double>::quiet_NaN();   // per sampler group
};

// Joins finished runs (their meta CSVs) into the comparison table.  All
// runs must share one problem.
std::vector<CompareRow> compare(const std::vector<std::string>& meta_paths);
std::string compare_to_csv(const std::vector<CompareRow>& rows);

// (ln N, ln error) long-format series with run labels preserved.
std::string compare_plot_data(const std::vector<CompareRow>& rows);

// (iteration, ln error) for one run; header only when nothing was evaluated.
std::string training_plot_data(const ErrorSeries& series);

// Minimal key,value meta reader used by compare and the tests.
std::map<std::string, std::string> read_meta(const std::string& path);

} // namespace qritz
