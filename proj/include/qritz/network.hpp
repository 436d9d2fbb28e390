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

#include "qritz/dual.hpp"
#include "qritz/layout.hpp"
#include "qritz/types.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qritz {

// --- generic forward pass ----------------------------------------------------
//
// P is the parameter scalar (double or Var), S the state scalar (P itself,
// or Dual<P> when input tangents are propagated).  The same code therefore
// serves plain evaluation, forward-mode input gradients, and the recorded
// mixed-derivative pass used for parameter gradients.

template <class P, class S>
std::vector<S> lift_apply(const ParamView<P>& pv, std::span<const S> x)
{
    const Index m = pv.shape().width;
    const Index k = pv.shape().input_dim;
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(m));
    for (Index r = 0; r < m; ++r) {
        S acc = lift_state(pv.lift_b(r), x[0]);
        for (Index c = 0; c < k; ++c) acc += pv.lift_w(r, c) * x[static_cast<std::size_t>(c)];
        out.push_back(std::move(acc));
    }
    return out;
}

// t = swish(W2 . swish(W1 . s + b1) + b2) + s
template <class P, class S>
void block_apply(const ParamView<P>& pv, Index blk, std::vector<S>& s)
{
    const Index m = pv.shape().width;
    std::vector<S> h1;
    h1.reserve(static_cast<std::size_t>(m));
    for (Index r = 0; r < m; ++r) {
        S acc = lift_state(pv.block_b1(blk, r), s[0]);
        for (Index c = 0; c < m; ++c) acc += pv.block_w1(blk, r, c) * s[static_cast<std::size_t>(c)];
        h1.push_back(swish(acc));
    }
    for (Index r = 0; r < m; ++r) {
        S acc = lift_state(pv.block_b2(blk, r), s[0]);
        for (Index c = 0; c < m; ++c) acc += pv.block_w2(blk, r, c) * h1[static_cast<std::size_t>(c)];
        s[static_cast<std::size_t>(r)] += swish(acc);
    }
}

template <class P, class S>
S net_value(const ParamView<P>& pv, std::span<const S> x)
{
    std::vector<S> s = lift_apply(pv, x);
    for (Index blk = 0; blk < pv.shape().num_blocks; ++blk) block_apply(pv, blk, s);
    S acc = lift_state(pv.head_b(), x[0]);
    for (Index r = 0; r < pv.shape().width; ++r) acc += pv.head_a(r) * s[static_cast<std::size_t>(r)];
    return acc;
}

// --- boundary wrapping --------------------------------------------------------

// Values and x-gradients of the wrap fields at one point.  A vanishes on
// the boundary and B matches the boundary data there, so A*net + B
// satisfies the Dirichlet condition by construction.
struct WrapEval {
    double a = 1.0;
    double b = 0.0;
    Vector da;
    Vector db;
};

struct BoundaryWrap {
    enum class Mode { bare, wrapped };
    Mode mode = Mode::bare;
    std::function<WrapEval(const Vector& x)> eval;
};

// u = A(x) * n + B(x), propagated through the tangent channels.
template <class T>
Dual<T> apply_wrap(const WrapEval& w, const Dual<T>& n)
{
    Dual<T> out;
    out.v = w.a * n.v + w.b;
    out.d.reserve(n.d.size());
    for (std::size_t k = 0; k < n.d.size(); ++k) {
        out.d.push_back(w.da[static_cast<Index>(k)] * n.v + w.a * n.d[k]
                        + w.db[static_cast<Index>(k)]);
    }
    return out;
}

// --- public entry points -------------------------------------------------------

// u(x) and the K-vector of input derivatives, exact to roundoff via
// forward-mode tangent propagation (no finite differences involved).
std::pair<double, Vector> forward_with_input_grad(const Vector& params,
                                                  const ParamLayout& layout,
                                                  const Vector& x);

double net_forward(const Vector& params, const ParamLayout& layout, const Vector& x);

double wrapped_forward(const Vector& params, const ParamLayout& layout,
                       const BoundaryWrap& wrap, const Vector& x);

std::pair<double, Vector> wrapped_forward_with_input_grad(const Vector& params,
                                                          const ParamLayout& layout,
                                                          const BoundaryWrap& wrap,
                                                          const Vector& x);

// Glorot-style init: weights ~ N(0, 2/(fan_in+fan_out)), biases zero, head
// offset zero.  Deterministic per seed.
Vector init_params(const ParamLayout& layout, std::uint64_t seed);

// Checkpoint file: version byte, then K/m/n as little-endian uint32, then
// the flat parameter array as little-endian 64-bit floats.
void save_params(const std::string& path, const ParamLayout& layout, const Vector& params);
std::pair<NetworkShape, Vector> load_params(const std::string& path);

// Dual-valued helpers shared by the loss evaluators.
template <class P>
Dual<P> net_dual(const ParamView<P>& pv, std::span<const Dual<P>> x)
{
    return net_value<P, Dual<P>>(pv, x);
}

// Seed one dual input per coordinate (unit tangent on its own channel).
std::vector<Dual<double>> seed_point(const Vector& x);

} // namespace qritz
