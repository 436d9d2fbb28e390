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

#include "qritz/gradients.hpp"

#include "qritz/errors.hpp"

#include <cmath>
#include <vector>

namespace qritz {

std::pair<double, Vector> loss_param_grad(const Vector& params, const ParamLayout& layout,
                                          const TapeEvaluator& evaluator)
{
    layout.check_sized(params.size(), "loss_param_grad");
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(static_cast<std::size_t>(params.size()));
    for (Index i = 0; i < params.size(); ++i) leaves.push_back(tape.leaf(params[i]));
    const ParamView<Var> pv(leaves.data(), layout);
    const Var loss = evaluator(tape, pv);
    if (!std::isfinite(loss.val)) throw NumericError("loss evaluated to a non-finite value");
    const std::vector<double> adj = tape.gradient(loss);
    Vector grad(params.size());
    for (Index i = 0; i < params.size(); ++i) grad[i] = adj[static_cast<std::size_t>(i)];
    if (!grad.allFinite()) throw NumericError("parameter gradient is non-finite");
    return {loss.val, std::move(grad)};
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& params,
                            double h)
{
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
    Vector grad(params.size());
    Vector shifted = params;
    for (Index j = 0; j < params.size(); ++j) {
        const double orig = shifted[j];
        shifted[j] = orig + h;
        const double up = f(shifted);
        shifted[j] = orig - h;
        const double down = f(shifted);
        shifted[j] = orig;
        grad[j] = (up - down) / (2.0 * h);
    }
    return grad;
}

} // namespace qritz
