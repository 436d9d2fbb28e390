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

#include "qritz/optimizer.hpp"

#include "qritz/errors.hpp"

#include <cmath>

namespace qritz {

Vector sgd_step(const Vector& params, const Vector& grad, const SgdConfig& cfg)
{
    if (!(cfg.stepsize > 0.0)) throw ConfigError("SGD stepsize must be positive");
    if (!grad.allFinite()) throw NumericError("SGD received a non-finite gradient");
    return params - cfg.stepsize * grad;
}

Vector adam_step(const Vector& params, const Vector& grad, AdamState& state)
{
    if (!grad.allFinite()) throw NumericError("ADAM received a non-finite gradient");
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ConfigError("ADAM state does not match parameter size");
    }
    ++state.step;
    const auto& c = state.cfg;
    state.m = c.beta1 * state.m + (1.0 - c.beta1) * grad;
    state.v = (c.beta2 * state.v.array() + (1.0 - c.beta2) * grad.array().square()).matrix();
    const double hat1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double hat2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    return params.array()
           - c.alpha * (state.m.array() / hat1)
                 / ((state.v.array() / hat2).sqrt() + c.eps);
}

} // namespace qritz
