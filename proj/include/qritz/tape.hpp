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
#include "qritz/swish.hpp"

#include <cassert>
#include <cstdint>
#include <vector>

namespace qritz {

class Tape;

// A recorded scalar.  Cheap to copy; the value is cached so that reading a
// result never touches the tape.
struct Var {
    Tape* tape = nullptr;
    std::int32_t id = -1;
    double val = 0.0;
};

// Reverse-mode tape over scalar operations.  Nodes are appended in
// evaluation order, so every operand index precedes the node that uses it
// and a single reverse sweep accumulates adjoints.  Leaves (trainable
// parameters) must be registered first; their adjoints are the gradient.
class Tape {
public:
    enum class Op : std::uint8_t {
        leaf,
        constant,
        add,        // a + b
        sub,        // a - b
        mul,        // a * b
        neg,        // -a
        add_c,      // a + aux
        rsub_c,     // aux - a
        mul_c,      // a * aux
        square,     // a * a
        swish_op,   // swish(a)
        swish_grad_op, // swish'(a); derivative is swish''(a)
    };

    Var leaf(double v)
    {
        assert(nodes_built_ == leaf_count_ && "leaves must be registered first");
        ++leaf_count_;
        return emit(Op::leaf, -1, -1, 0.0, v);
    }

    Var constant(double v) { return emit(Op::constant, -1, -1, 0.0, v); }

    // Shared cached constants; reused freely since copies are just ids.
    Var zero()
    {
        if (zero_.id < 0) zero_ = constant(0.0);
        return zero_;
    }
    Var one()
    {
        if (one_.id < 0) one_ = constant(1.0);
        return one_;
    }

    Var add(Var a, Var b) { return emit(Op::add, a.id, b.id, 0.0, a.val + b.val); }
    Var sub(Var a, Var b) { return emit(Op::sub, a.id, b.id, 0.0, a.val - b.val); }
    Var mul(Var a, Var b) { return emit(Op::mul, a.id, b.id, 0.0, a.val * b.val); }
    Var neg(Var a) { return emit(Op::neg, a.id, -1, 0.0, -a.val); }
    Var add_c(Var a, double c) { return emit(Op::add_c, a.id, -1, c, a.val + c); }
    Var rsub_c(double c, Var a) { return emit(Op::rsub_c, a.id, -1, c, c - a.val); }
    Var mul_c(Var a, double c) { return emit(Op::mul_c, a.id, -1, c, a.val * c); }
    Var square(Var a) { return emit(Op::square, a.id, -1, 0.0, a.val * a.val); }
    Var swish(Var a) { return emit(Op::swish_op, a.id, -1, 0.0, qritz::swish(a.val)); }
    Var swish_grad(Var a)
    {
        return emit(Op::swish_grad_op, a.id, -1, 0.0, qritz::swish_grad(a.val));
    }

    std::size_t size() const { return kind_.size(); }
    std::size_t leaf_count() const { return leaf_count_; }
    const std::vector<double>& values() const { return val_; }

    // Adjoints of all leaves, in registration order, for d(output)/d(leaf).
    std::vector<double> gradient(Var output) const
    {
        assert(output.tape == this);
        std::vector<double> adj(kind_.size(), 0.0);
        adj[static_cast<std::size_t>(output.id)] = 1.0;
        for (std::size_t i = kind_.size(); i-- > 0;) {
            const double g = adj[i];
            if (g == 0.0) continue;
            const auto a = static_cast<std::size_t>(a_[i]);
            switch (kind_[i]) {
            case Op::leaf:
            case Op::constant:
                break;
            case Op::add:
                adj[a] += g;
                adj[static_cast<std::size_t>(b_[i])] += g;
                break;
            case Op::sub:
                adj[a] += g;
                adj[static_cast<std::size_t>(b_[i])] -= g;
                break;
            case Op::mul:
                adj[a] += g * val_[static_cast<std::size_t>(b_[i])];
                adj[static_cast<std::size_t>(b_[i])] += g * val_[a];
                break;
            case Op::neg:
                adj[a] -= g;
                break;
            case Op::add_c:
                adj[a] += g;
                break;
            case Op::rsub_c:
                adj[a] -= g;
                break;
            case Op::mul_c:
                adj[a] += g * aux_[i];
                break;
            case Op::square:
                adj[a] += g * 2.0 * val_[a];
                break;
            case Op::swish_op:
                adj[a] += g * qritz::swish_grad(val_[a]);
                break;
            case Op::swish_grad_op:
                adj[a] += g * qritz::swish_grad2(val_[a]);
                break;
            }
        }
        return std::vector<double>(adj.begin(),
                                   adj.begin() + static_cast<std::ptrdiff_t>(leaf_count_));
    }

    // Recompute every node value from the recorded structure.  Used to test
    // that replaying the tape reproduces the forward pass bitwise.
    std::vector<double> replay() const
    {
        std::vector<double> out(kind_.size(), 0.0);
        for (std::size_t i = 0; i < kind_.size(); ++i) {
            const auto a = static_cast<std::size_t>(a_[i]);
            switch (kind_[i]) {
            case Op::leaf:
            case Op::constant: out[i] = val_[i]; break;
            case Op::add: out[i] = out[a] + out[static_cast<std::size_t>(b_[i])]; break;
            case Op::sub: out[i] = out[a] - out[static_cast<std::size_t>(b_[i])]; break;
            case Op::mul: out[i] = out[a] * out[static_cast<std::size_t>(b_[i])]; break;
            case Op::neg: out[i] = -out[a]; break;
            case Op::add_c: out[i] = out[a] + aux_[i]; break;
            case Op::rsub_c: out[i] = aux_[i] - out[a]; break;
            case Op::mul_c: out[i] = out[a] * aux_[i]; break;
            case Op::square: out[i] = out[a] * out[a]; break;
            case Op::swish_op: out[i] = qritz::swish(out[a]); break;
            case Op::swish_grad_op: out[i] = qritz::swish_grad(out[a]); break;
            }
        }
        return out;
    }

private:
    Var emit(Op op, std::int32_t a, std::int32_t b, double aux, double v)
    {
        kind_.push_back(op);
        a_.push_back(a);
        b_.push_back(b);
        aux_.push_back(aux);
        val_.push_back(v);
        ++nodes_built_;
        return Var{this, static_cast<std::int32_t>(kind_.size() - 1), v};
    }

    std::vector<Op> kind_;
    std::vector<std::int32_t> a_;
    std::vector<std::int32_t> b_;
    std::vector<double> aux_;
    std::vector<double> val_;
    std::size_t leaf_count_ = 0;
    std::size_t nodes_built_ = 0;
    Var zero_{};
    Var one_{};
};

inline Var operator+(Var a, Var b)
{
    assert(a.tape == b.tape);
    return a.tape->add(a, b);
}
inline Var operator-(Var a, Var b)
{
    assert(a.tape == b.tape);
    return a.tape->sub(a, b);
}
inline Var operator*(Var a, Var b)
{
    assert(a.tape == b.tape);
    return a.tape->mul(a, b);
}
inline Var operator-(Var a) { return a.tape->neg(a); }
inline Var operator+(Var a, double c) { return a.tape->add_c(a, c); }
inline Var operator+(double c, Var a) { return a.tape->add_c(a, c); }
inline Var operator-(Var a, double c) { return a.tape->add_c(a, -c); }
inline Var operator-(double c, Var a) { return a.tape->rsub_c(c, a); }
inline Var operator*(Var a, double c) { return a.tape->mul_c(a, c); }
inline Var operator*(double c, Var a) { return a.tape->mul_c(a, c); }
inline Var& operator+=(Var& a, Var b) { a = a + b; return a; }

inline Var swish(Var a) { return a.tape->swish(a); }
inline Var swish_grad(Var a) { return a.tape->swish_grad(a); }
inline Var square(Var a) { return a.tape->square(a); }
inline double value_of(Var a) { return a.val; }
inline double value_of(double a) { return a; }

} // namespace qritz
