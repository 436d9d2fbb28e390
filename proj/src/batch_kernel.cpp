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

#include "qritz/batch_kernel.hpp"

#include "qritz/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qritz {

namespace {

using RowMap = Eigen::Map<const RowMatrix>;
using VecMap = Eigen::Map<const Vector>;
using RowMapMut = Eigen::Map<RowMatrix>;
using VecMapMut = Eigen::Map<Vector>;

// Elementwise stable sigmoid.
Matrix sigmoid_mat(const Matrix& x)
{
    return x.unaryExpr([](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
    });
}

// swish'(h) from h and sigmoid(h): s (1 + h (1 - s))
Matrix swish_grad_mat(const Matrix& h, const Matrix& sig)
{
    return (sig.array() * (1.0 + h.array() * (1.0 - sig.array()))).matrix();
}

// swish''(h): s (1 - s) (2 + h (1 - 2 s))
Matrix swish_grad2_mat(const Matrix& h, const Matrix& sig)
{
    return (sig.array() * (1.0 - sig.array()) * (2.0 + h.array() * (1.0 - 2.0 * sig.array())))
        .matrix();
}

} // namespace

BatchKernel::BatchKernel(const ParamLayout& layout) : lay_(&layout)
{
    const Index m = layout.shape().width;
    const Index k = layout.shape().input_dim;
    const Index blocks = std::max<Index>(layout.shape().num_blocks, 1);
    // cap the cached intermediates at roughly 64 MB
    const Index budget = 64ll * 1024 * 1024;
    const Index per_point = 8 * m * (6 + 4 * k) * blocks;
    chunk_ = std::clamp<Index>(budget / std::max<Index>(per_point, 1), 64, 4096);
}

Eigen::RowVectorXd BatchKernel::values_only(const Vector& params,
                                            const Eigen::Ref<const Matrix>& x) const
{
    lay_->check_sized(params.size(), "BatchKernel::values_only");
    const Index m = lay_->shape().width;
    const Index k = lay_->shape().input_dim;
    if (x.rows() != k) throw ConfigError("point batch dimension mismatch");

    RowMap lift_w(params.data() + lay_->lift_w(0, 0), m, k);
    VecMap lift_b(params.data() + lay_->lift_b(0), m);
    Matrix s = (lift_w * x).colwise() + lift_b;
    Matrix h;
    for (Index blk = 0; blk < lay_->shape().num_blocks; ++blk) {
        RowMap w1(params.data() + lay_->block_w1(blk, 0, 0), m, m);
        VecMap b1(params.data() + lay_->block_b1(blk, 0), m);
        RowMap w2(params.data() + lay_->block_w2(blk, 0, 0), m, m);
        VecMap b2(params.data() + lay_->block_b2(blk, 0), m);
        h = (w1 * s).colwise() + b1;
        Matrix a1 = (h.array() * sigmoid_mat(h).array()).matrix();
        h = (w2 * a1).colwise() + b2;
        s += (h.array() * sigmoid_mat(h).array()).matrix();
    }
    VecMap head_a(params.data() + lay_->head_a(0), m);
    return (head_a.transpose() * s).array() + params[lay_->head_b()];
}

void BatchKernel::forward(const Vector& params, const Eigen::Ref<const Matrix>& x)
{
    lay_->check_sized(params.size(), "BatchKernel::forward");
    const Index m = lay_->shape().width;
    const Index k = lay_->shape().input_dim;
    const Index blocks = lay_->shape().num_blocks;
    if (x.rows() != k) throw ConfigError("point batch dimension mismatch");
    if (x.cols() > chunk_) throw ConfigError("chunk exceeds kernel capacity");
    n_ = x.cols();
    x_ = x;

    RowMap lift_w(params.data() + lay_->lift_w(0, 0), m, k);
    VecMap lift_b(params.data() + lay_->lift_b(0), m);

    s_ = (lift_w * x).colwise() + lift_b;
    d_.assign(static_cast<std::size_t>(k), Matrix());
    for (Index c = 0; c < k; ++c) {
        d_[static_cast<std::size_t>(c)] = lift_w.col(c).replicate(1, n_);
    }

    cache_.assign(static_cast<std::size_t>(blocks), BlockCache{});
    for (Index blk = 0; blk < blocks; ++blk) {
        auto& cc = cache_[static_cast<std::size_t>(blk)];
        RowMap w1(params.data() + lay_->block_w1(blk, 0, 0), m, m);
        VecMap b1(params.data() + lay_->block_b1(blk, 0), m);
        RowMap w2(params.data() + lay_->block_w2(blk, 0, 0), m, m);
        VecMap b2(params.data() + lay_->block_b2(blk, 0), m);

        cc.s_in = s_;
        cc.d_in = d_;

        cc.h1 = (w1 * s_).colwise() + b1;
        cc.sig1 = sigmoid_mat(cc.h1);
        cc.a1 = (cc.h1.array() * cc.sig1.array()).matrix();
        const Matrix p1 = swish_grad_mat(cc.h1, cc.sig1);

        cc.u1.resize(static_cast<std::size_t>(k));
        cc.e1.resize(static_cast<std::size_t>(k));
        for (Index c = 0; c < k; ++c) {
            auto& u1 = cc.u1[static_cast<std::size_t>(c)];
            auto& e1 = cc.e1[static_cast<std::size_t>(c)];
            u1 = w1 * cc.d_in[static_cast<std::size_t>(c)];
            e1 = (p1.array() * u1.array()).matrix();
        }

        cc.h2 = (w2 * cc.a1).colwise() + b2;
        cc.sig2 = sigmoid_mat(cc.h2);
        const Matrix p2 = swish_grad_mat(cc.h2, cc.sig2);

        cc.u2.resize(static_cast<std::size_t>(k));
        for (Index c = 0; c < k; ++c) {
            auto& u2 = cc.u2[static_cast<std::size_t>(c)];
            u2 = w2 * cc.e1[static_cast<std::size_t>(c)];
            d_[static_cast<std::size_t>(c)] += (p2.array() * u2.array()).matrix();
        }
        s_ += (cc.h2.array() * cc.sig2.array()).matrix();
    }

    VecMap head_a(params.data() + lay_->head_a(0), m);
    u_ = (head_a.transpose() * s_).array() + params[lay_->head_b()];
    g_.resize(k, n_);
    for (Index c = 0; c < k; ++c) g_.row(c) = head_a.transpose() * d_[static_cast<std::size_t>(c)];
}

void BatchKernel::backward(const Vector& params, const Eigen::RowVectorXd& pu, const Matrix& pg,
                           Vector& grad) const
{
    const Index m = lay_->shape().width;
    const Index k = lay_->shape().input_dim;
    const Index blocks = lay_->shape().num_blocks;
    if (pu.cols() != n_ || pg.cols() != n_ || pg.rows() != k) {
        throw ConfigError("adjoint shape does not match the last forward pass");
    }
    lay_->check_sized(grad.size(), "BatchKernel::backward");

    VecMap head_a(params.data() + lay_->head_a(0), m);
    VecMapMut head_a_bar(grad.data() + lay_->head_a(0), m);

    // head: u = a^T s + b, g_k = a^T d_k
    head_a_bar += s_ * pu.transpose();
    for (Index c = 0; c < k; ++c) head_a_bar += d_[static_cast<std::size_t>(c)] * pg.row(c).transpose();
    grad[lay_->head_b()] += pu.sum();

    Matrix s_bar = head_a * pu;                      // m x n
    std::vector<Matrix> d_bar(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) d_bar[static_cast<std::size_t>(c)] = head_a * pg.row(c);

    for (Index blk = blocks - 1; blk >= 0; --blk) {
        const auto& cc = cache_[static_cast<std::size_t>(blk)];
        RowMap w1(params.data() + lay_->block_w1(blk, 0, 0), m, m);
        RowMap w2(params.data() + lay_->block_w2(blk, 0, 0), m, m);
        RowMapMut w1_bar(grad.data() + lay_->block_w1(blk, 0, 0), m, m);
        VecMapMut b1_bar(grad.data() + lay_->block_b1(blk, 0), m);
        RowMapMut w2_bar(grad.data() + lay_->block_w2(blk, 0, 0), m, m);
        VecMapMut b2_bar(grad.data() + lay_->block_b2(blk, 0), m);

        const Matrix p1 = swish_grad_mat(cc.h1, cc.sig1);
        const Matrix q1 = swish_grad2_mat(cc.h1, cc.sig1);
        const Matrix p2 = swish_grad_mat(cc.h2, cc.sig2);
        const Matrix q2 = swish_grad2_mat(cc.h2, cc.sig2);

        // layer 2: block output adds swish(h2) to the shortcut, and the
        // tangent update adds p2 .* u2 to the carried tangent.
        Matrix h2_bar = (p2.array() * s_bar.array()).matrix();
        std::vector<Matrix> u2_bar(static_cast<std::size_t>(k));
        for (Index c = 0; c < k; ++c) {
            const auto& u2 = cc.u2[static_cast<std::size_t>(c)];
            const auto& db = d_bar[static_cast<std::size_t>(c)];
            h2_bar.array() += q2.array() * u2.array() * db.array();
            u2_bar[static_cast<std::size_t>(c)] = (p2.array() * db.array()).matrix();
        }

        w2_bar += h2_bar * cc.a1.transpose();
        for (Index c = 0; c < k; ++c) {
            w2_bar += u2_bar[static_cast<std::size_t>(c)] * cc.e1[static_cast<std::size_t>(c)].transpose();
        }
        b2_bar += h2_bar.rowwise().sum();

        Matrix a1_bar = w2.transpose() * h2_bar;
        std::vector<Matrix> e1_bar(static_cast<std::size_t>(k));
        for (Index c = 0; c < k; ++c) {
            e1_bar[static_cast<std::size_t>(c)] = w2.transpose() * u2_bar[static_cast<std::size_t>(c)];
        }

        // layer 1
        Matrix h1_bar = (p1.array() * a1_bar.array()).matrix();
        std::vector<Matrix> u1_bar(static_cast<std::size_t>(k));
        for (Index c = 0; c < k; ++c) {
            const auto& u1 = cc.u1[static_cast<std::size_t>(c)];
            const auto& eb = e1_bar[static_cast<std::size_t>(c)];
            h1_bar.array() += q1.array() * u1.array() * eb.array();
            u1_bar[static_cast<std::size_t>(c)] = (p1.array() * eb.array()).matrix();
        }

        w1_bar += h1_bar * cc.s_in.transpose();
        for (Index c = 0; c < k; ++c) {
            w1_bar += u1_bar[static_cast<std::size_t>(c)] * cc.d_in[static_cast<std::size_t>(c)].transpose();
        }
        b1_bar += h1_bar.rowwise().sum();

        // into the block input: shortcut carry plus the linear path
        s_bar += w1.transpose() * h1_bar;
        for (Index c = 0; c < k; ++c) {
            d_bar[static_cast<std::size_t>(c)] += w1.transpose() * u1_bar[static_cast<std::size_t>(c)];
        }
    }

    // lift: s0 = W x + b, d0_k = W e_k 1^T
    RowMapMut lift_w_bar(grad.data() + lay_->lift_w(0, 0), m, k);
    VecMapMut lift_b_bar(grad.data() + lay_->lift_b(0), m);
    lift_w_bar += s_bar * x_.transpose();
    lift_b_bar += s_bar.rowwise().sum();
    for (Index c = 0; c < k; ++c) {
        lift_w_bar.col(c) += d_bar[static_cast<std::size_t>(c)].rowwise().sum();
    }
}

} // namespace qritz
