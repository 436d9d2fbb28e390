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
#include "qritz/types.hpp"

#include <vector>

namespace qritz {

// Batched forward/backward pass over one chunk of points, matrix-valued
// throughout (one column per point).  The forward pass propagates the K
// input-tangent channels alongside the values; the backward pass
// accumulates d/d(theta) of any functional given its per-point adjoints
// with respect to the bare network value u_i and input gradient g_i.
//
// Shapes: X is K x n, values() is 1 x n, tangents() is K x n.
class BatchKernel {
public:
    explicit BatchKernel(const ParamLayout& layout);

    // Points per chunk, sized so the cached intermediates stay modest.
    Index chunk_capacity() const { return chunk_; }

    // Value-only pass; no state is retained.
    Eigen::RowVectorXd values_only(const Vector& params, const Eigen::Ref<const Matrix>& x) const;

    // Forward with tangent channels; intermediates are cached for backward.
    void forward(const Vector& params, const Eigen::Ref<const Matrix>& x);

    const Eigen::RowVectorXd& values() const { return u_; }
    const Matrix& tangents() const { return g_; } // K x n, row k = du/dx_k

    // Accumulates into grad the gradient of
    //   sum_i ( pu[i] * u_i + sum_k pg(k,i) * g_{k,i} )
    // with respect to the flat parameter vector.  Must follow forward().
    void backward(const Vector& params, const Eigen::RowVectorXd& pu, const Matrix& pg,
                  Vector& grad) const;

private:
    struct BlockCache {
        Matrix s_in;             // block input values
        Matrix h1, sig1;         // first layer pre-activation and its sigmoid
        Matrix a1;               // swish(h1)
        Matrix h2, sig2;         // second layer pre-activation and sigmoid
        std::vector<Matrix> d_in; // input tangents, one m x n matrix per k
        std::vector<Matrix> u1;  // W1 * d_in
        std::vector<Matrix> e1;  // swish'(h1) .* u1
        std::vector<Matrix> u2;  // W2 * e1
    };

    const ParamLayout* lay_;
    Index chunk_;
    Index n_ = 0; // points in the last forward pass

    Matrix x_;                 // input chunk
    Matrix s_;                 // final state values
    std::vector<Matrix> d_;    // final state tangents
    Eigen::RowVectorXd u_;
    Matrix g_;
    mutable std::vector<BlockCache> cache_;
};

} // namespace qritz
