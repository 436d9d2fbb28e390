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

#include "qritz/metrics.hpp"

#include "qritz/batch_kernel.hpp"
#include "qritz/errors.hpp"

#include <cmath>
#include <cstdio>

namespace qritz {

EvalGrid make_eval_grid(const ProblemSpec& spec, Index n_eval,
                        std::shared_ptr<const DirectionTable> table, std::uint64_t index_base)
{
    if (n_eval < 1) throw ConfigError("evaluation grid needs at least one point");
    SobolSequence seq = SobolSequence::at_index(spec.box.dim(), index_base, std::move(table));
    EvalGrid grid;
    grid.pts = map_to_box(sobol_points(seq, n_eval), spec.box).pts;
    grid.u_exact.resize(n_eval);
    for (Index i = 0; i < n_eval; ++i) grid.u_exact[i] = spec.exact(grid.pts.col(i));
    grid.denom = grid.u_exact.squaredNorm();
    return grid;
}

double relative_l2_error(const Vector& params, const ParamLayout& layout, const ProblemSpec& spec,
                         const EvalGrid& grid)
{
    if (!(grid.denom > 0.0)) {
        throw ConfigError("relative error undefined: reference solution vanishes on the grid");
    }
    BatchKernel kernel(layout);
    double num = 0.0;
    const bool wrapped = spec.wrap.mode == BoundaryWrap::Mode::wrapped;
    for (Index start = 0; start < grid.size(); start += kernel.chunk_capacity()) {
        const Index n = std::min<Index>(kernel.chunk_capacity(), grid.size() - start);
        const auto chunk = grid.pts.middleCols(start, n);
        const Eigen::RowVectorXd u = kernel.values_only(params, chunk);
        for (Index i = 0; i < n; ++i) {
            double uh = u[i];
            if (wrapped) {
                const WrapEval w = spec.wrap.eval(chunk.col(i));
                uh = w.a * u[i] + w.b;
            }
            const double diff = uh - grid.u_exact[start + i];
            num += diff * diff;
        }
    }
    return std::sqrt(num / grid.denom);
}

void ErrorSeries::push(std::int64_t iter, double raw_error, std::int64_t window_iters)
{
    iteration.push_back(iter);
    raw.push_back(raw_error);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = iteration.size(); j-- > 0;) {
        if (iteration[j] <= iter - window_iters) break;
        sum += raw[j];
        ++count;
    }
    windowed.push_back(count > 0 ? sum / static_cast<double>(count) : raw_error);
}

std::string ErrorSeries::to_csv() const
{
    std::string out = "iteration,raw_error,windowed_error\n";
    char buf[96];
    for (std::size_t i = 0; i < iteration.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n",
                      static_cast<long long>(iteration[i]), raw[i], windowed[i]);
        out += buf;
    }
    return out;
}

double fit_order(const std::vector<std::pair<double, double>>& n_error)
{
    if (n_error.size() < 2) throw ConfigError("order fit needs at least two points");
    double mean_t = 0.0;
    double mean_y = 0.0;
    for (const auto& [n, e] : n_error) {
        if (!(n > 0.0)) throw ConfigError("order fit needs positive batch sizes");
        if (!(e > 0.0)) throw ConfigError("order fit needs positive errors");
        mean_t += std::log(n);
        mean_y += std::log(e);
    }
    mean_t /= static_cast<double>(n_error.size());
    mean_y /= static_cast<double>(n_error.size());
    double num = 0.0;
    double den = 0.0;
    for (const auto& [n, e] : n_error) {
        const double dt = std::log(n) - mean_t;
        num += dt * (std::log(e) - mean_y);
        den += dt * dt;
    }
    if (!(den > 0.0)) throw ConfigError("order fit needs at least two distinct batch sizes");
    // slope against log(1/N) flips the sign
    return -num / den;
}

double pairwise_order(double e1, double e2, double ratio)
{
    if (!(e1 > 0.0) || !(e2 > 0.0)) throw ConfigError("pairwise order needs positive errors");
    if (!(ratio > 1.0)) throw ConfigError("pairwise order needs a ratio > 1");
    return std::log(e1 / e2) / std::log(ratio);
}

} // namespace qritz
