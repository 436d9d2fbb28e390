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
#include "qritz/tape.hpp"
#include "qritz/types.hpp"

#include <functional>
#include <utility>

namespace qritz {

// Builds the scalar batch loss on a tape, given the parameters as leaves.
using TapeEvaluator = std::function<Var(Tape&, const ParamView<Var>&)>;

// Records the evaluator on a fresh tape (one tape per batch, discarded on
// return) and runs a single reverse sweep.  Returns the loss value and
// d(loss)/d(theta) for every parameter, including parameters reached only
// through the input-gradient channels.
std::pair<double, Vector> loss_param_grad(const Vector& params, const ParamLayout& layout,
                                          const TapeEvaluator& evaluator);

// Central differences (f(x+h e_j) - f(x-h e_j)) / 2h, the test oracle.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& params,
                            double h);

} // namespace qritz
