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

#include "qritz/types.hpp"

#include <cstdint>

namespace qritz {

struct SgdConfig {
    double stepsize = 1e-3; // fixed alpha > 0
};

// theta <- theta - alpha * grad.  Plain descent with a fixed stepsize, the
// form covered by the convergence analysis in gapsim.
Vector sgd_step(const Vector& params, const Vector& grad, const SgdConfig& cfg);

struct AdamConfig {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    Vector m; // first moment
    Vector v; // second moment
    std::uint64_t step = 0;

    explicit AdamState(Index n, AdamConfig cfg_ = {})
        : cfg(cfg_), m(Vector::Zero(n)), v(Vector::Zero(n))
    {
    }
};

// Standard bias-corrected update; increments the step counter.
Vector adam_step(const Vector& params, const Vector& grad, AdamState& state);

} // namespace qritz
