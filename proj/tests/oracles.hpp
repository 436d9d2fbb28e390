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

// Independent oracles for the test suite.  Everything here is a separate
// straight-line implementation kept deliberately away from the library's
// evaluation paths.

#pragma once

#include "qritz/layout.hpp"
#include "qritz/types.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Base-2 radical inverse of the Gray code of i: the i-th point of the
// one-dimensional dyadic sequence in generation order (origin at i = 0).
inline double radical_inverse_gray(std::uint64_t i)
{
    std::uint64_t g = i ^ (i >> 1);
    double f = 0.5;
    double r = 0.0;
    while (g != 0) {
        if (g & 1ull) r += f;
        g >>= 1;
        f *= 0.5;
    }
    return r;
}

// Duplicate straight-line network evaluator: plain scalar loops, no shared
// code with the library's forward pass beyond the layout contract.
inline double straight_line_net(const qritz::Vector& p, const qritz::ParamLayout& lay,
                                const qritz::Vector& x)
{
    const auto m = lay.shape().width;
    const auto k = lay.shape().input_dim;
    auto sw = [](double v) {
        const double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
        return v * s;
    };
    std::vector<double> s(static_cast<std::size_t>(m));
    for (qritz::Index r = 0; r < m; ++r) {
        double acc = p[lay.lift_b(r)];
        for (qritz::Index c = 0; c < k; ++c) acc += p[lay.lift_w(r, c)] * x[c];
        s[static_cast<std::size_t>(r)] = acc;
    }
    std::vector<double> h(static_cast<std::size_t>(m));
    for (qritz::Index blk = 0; blk < lay.shape().num_blocks; ++blk) {
        for (qritz::Index r = 0; r < m; ++r) {
            double acc = p[lay.block_b1(blk, r)];
            for (qritz::Index c = 0; c < m; ++c)
                acc += p[lay.block_w1(blk, r, c)] * s[static_cast<std::size_t>(c)];
            h[static_cast<std::size_t>(r)] = sw(acc);
        }
        for (qritz::Index r = 0; r < m; ++r) {
            double acc = p[lay.block_b2(blk, r)];
            for (qritz::Index c = 0; c < m; ++c)
                acc += p[lay.block_w2(blk, r, c)] * h[static_cast<std::size_t>(c)];
            s[static_cast<std::size_t>(r)] += sw(acc);
        }
    }
    double acc = p[lay.head_b()];
    for (qritz::Index r = 0; r < m; ++r) acc += p[lay.head_a(r)] * s[static_cast<std::size_t>(r)];
    return acc;
}

// Fourth-order central Laplacian, accurate enough for 1e-9 checks on
// smooth trigonometric fields.
inline double fd_laplacian(const std::function<double(const qritz::Vector&)>& f,
                           const qritz::Vector& x, double h = 2e-3)
{
    double lap = 0.0;
    qritz::Vector y = x;
    for (qritz::Index d = 0; d < x.size(); ++d) {
        const double orig = y[d];
        y[d] = orig - 2 * h;
        const double m2 = f(y);
        y[d] = orig - h;
        const double m1 = f(y);
        y[d] = orig;
        const double c0 = f(y);
        y[d] = orig + h;
        const double p1 = f(y);
        y[d] = orig + 2 * h;
        const double p2 = f(y);
        y[d] = orig;
        lap += (-m2 + 16.0 * m1 - 30.0 * c0 + 16.0 * p1 - p2) / (12.0 * h * h);
    }
    return lap;
}

// Central-difference gradient of a scalar field over x (test-side copy).
inline qritz::Vector fd_gradient_x(const std::function<double(const qritz::Vector&)>& f,
                                   const qritz::Vector& x, double h = 1e-6)
{
    qritz::Vector g(x.size());
    qritz::Vector y = x;
    for (qritz::Index d = 0; d < x.size(); ++d) {
        const double orig = y[d];
        y[d] = orig + h;
        const double up = f(y);
        y[d] = orig - h;
        const double down = f(y);
        y[d] = orig;
        g[d] = (up - down) / (2.0 * h);
    }
    return g;
}

// Exact fixed point of gap' = (1 - c a)^2 gap + (c/2) a^2 V, the recursion
// the isotropic quadratic with unbiased noise actually follows.
inline double quadratic_gap_fixed_point(double c, double alpha, double variance)
{
    const double rho = (1.0 - c * alpha) * (1.0 - c * alpha);
    return 0.5 * c * alpha * alpha * variance / (1.0 - rho);
}

} // namespace oracle
