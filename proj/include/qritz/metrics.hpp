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

#include "qritz/layout.hpp"
#include "qritz/problems.hpp"
#include "qritz/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qritz {

// Fixed Sobol evaluation grid living far past any index range a training
// stream can reach, with the reference solution cached.
struct EvalGrid {
    Matrix pts; // domain frame
    Vector u_exact;
    double denom = 0.0; // sum u_exact^2

    Index size() const { return pts.cols(); }
};

// Training streams stay strictly below this Sobol index; the grid starts here.
inline constexpr std::uint64_t kEvalGridIndexBase = 1ull << 28;

EvalGrid make_eval_grid(const ProblemSpec& spec, Index n_eval,
                        std::shared_ptr<const DirectionTable> table,
                        std::uint64_t index_base = kEvalGridIndexBase);

// sqrt( sum (u_hat - u)^2 / sum u^2 ) over the grid; the volume factors cancel.
double relative_l2_error(const Vector& params, const ParamLayout& layout, const ProblemSpec& spec,
                         const EvalGrid& grid);

struct ErrorSeries {
    std::vector<std::int64_t> iteration;
    std::vector<double> raw;
    std::vector<double> windowed;

    // windowed[i] = mean of raw over the trailing window_iters iterations
    void push(std::int64_t iter, double raw_error, std::int64_t window_iters);
    std::string to_csv() const; // iteration, raw_error, windowed_error
};

// Least-squares slope of log(error) against log(1/N); positive means the
// error decays as N grows.
double fit_order(const std::vector<std::pair<double, double>>& n_error);

// log(e1/e2) / log(N2/N1) for one refinement step.
double pairwise_order(double e1, double e2, double ratio);

} // namespace qritz
