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

#include "qritz/errors.hpp"
#include "qritz/types.hpp"

#include <string>

namespace qritz {

struct NetworkShape {
    Index input_dim = 1; // K
    Index width = 1;     // m, nodes per layer
    Index num_blocks = 0; // n, residual blocks

    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

// Offsets of every parameter group inside the flat vector.  Order: input
// lift (W row-major, then offset), per block (W1, b1, W2, b2), output head
// (a, then scalar b).  Weight matrices are row-major by output unit.
class ParamLayout {
public:
    ParamLayout() = default;
    explicit ParamLayout(NetworkShape shape) : shape_(shape)
    {
        if (shape.input_dim < 1 || shape.width < 1 || shape.num_blocks < 0) {
            throw ConfigError("network shape must have K >= 1, m >= 1, n >= 0");
        }
        const Index m = shape.width;
        const Index k = shape.input_dim;
        block_stride_ = 2 * m * m + 2 * m;
        lift_w_ = 0;
        lift_b_ = m * k;
        blocks_ = lift_b_ + m;
        head_a_ = blocks_ + shape.num_blocks * block_stride_;
        head_b_ = head_a_ + m;
        total_ = head_b_ + 1;
    }

    const NetworkShape& shape() const { return shape_; }
    Index total() const { return total_; }

    Index lift_w(Index row, Index col) const { return lift_w_ + row * shape_.input_dim + col; }
    Index lift_b(Index row) const { return lift_b_ + row; }
    Index block_w1(Index blk, Index row, Index col) const
    {
        return blocks_ + blk * block_stride_ + row * shape_.width + col;
    }
    Index block_b1(Index blk, Index row) const
    {
        return blocks_ + blk * block_stride_ + shape_.width * shape_.width + row;
    }
    Index block_w2(Index blk, Index row, Index col) const
    {
        return blocks_ + blk * block_stride_ + shape_.width * shape_.width + shape_.width
               + row * shape_.width + col;
    }
    Index block_b2(Index blk, Index row) const
    {
        return blocks_ + blk * block_stride_ + 2 * shape_.width * shape_.width + shape_.width
               + row;
    }
    Index head_a(Index row) const { return head_a_ + row; }
    Index head_b() const { return head_b_; }

    void check_sized(Index n, const std::string& what) const
    {
        if (n != total_) {
            throw ConfigError(what + ": parameter vector has " + std::to_string(n)
                              + " entries, layout needs " + std::to_string(total_));
        }
    }

private:
    NetworkShape shape_{};
    Index block_stride_ = 0;
    Index lift_w_ = 0;
    Index lift_b_ = 0;
    Index blocks_ = 0;
    Index head_a_ = 0;
    Index head_b_ = 0;
    Index total_ = 1;
};

inline Index param_count(NetworkShape shape) { return ParamLayout(shape).total(); }

// Read-only typed view over flat parameter storage.  T is double for plain
// evaluation or Var when the parameters are tape leaves.
template <class T>
class ParamView {
public:
    ParamView(const T* data, const ParamLayout& layout) : p_(data), lay_(&layout) {}

    const ParamLayout& layout() const { return *lay_; }
    const NetworkShape& shape() const { return lay_->shape(); }

    const T& lift_w(Index r, Index c) const { return p_[lay_->lift_w(r, c)]; }
    const T& lift_b(Index r) const { return p_[lay_->lift_b(r)]; }
    const T& block_w1(Index blk, Index r, Index c) const { return p_[lay_->block_w1(blk, r, c)]; }
    const T& block_b1(Index blk, Index r) const { return p_[lay_->block_b1(blk, r)]; }
    const T& block_w2(Index blk, Index r, Index c) const { return p_[lay_->block_w2(blk, r, c)]; }
    const T& block_b2(Index blk, Index r) const { return p_[lay_->block_b2(blk, r)]; }
    const T& head_a(Index r) const { return p_[lay_->head_a(r)]; }
    const T& head_b() const { return p_[lay_->head_b()]; }

private:
    const T* p_;
    const ParamLayout* lay_;
};

} // namespace qritz
