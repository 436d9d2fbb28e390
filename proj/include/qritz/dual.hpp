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

#include "qritz/swish.hpp"
#include "qritz/tape.hpp"

#include <cassert>
#include <cstddef>
#include <vector>

namespace qritz {

// Forward-mode value with one tangent channel per input coordinate.  The
// scalar type T is either plain double or a tape Var; with T = Var the
// whole forward-mode computation is recorded for a later reverse sweep,
// which is how mixed d/dtheta of x-gradients are obtained.
template <class T>
struct DualBatchScalar {
    T v{};
    std::vector<T> d; // tangent count equals the input dimension

    std::size_t tangents() const { return d.size(); }
};

template <class T>
using Dual = DualBatchScalar<T>;

// --- scalar lifting helpers -------------------------------------------------

inline double zero_scalar(const double&) { return 0.0; }
inline Var zero_scalar(const Var& proto) { return proto.tape->zero(); }

inline double square(double x) { return x * x; }

// Promote a parameter scalar to the state type of the forward pass.
inline const double& lift_state(const double& p, const double&) { return p; }
inline const Var& lift_state(const Var& p, const Var&) { return p; }

template <class T>
Dual<T> lift_state(const T& p, const Dual<T>& proto)
{
    Dual<T> out;
    out.v = p;
    out.d.assign(proto.d.size(), zero_scalar(p));
    return out;
}

// --- dual arithmetic (only what the network forward pass needs) -------------

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b)
{
    assert(a.d.size() == b.d.size());
    Dual<T> out;
    out.v = a.v + b.v;
    out.d.reserve(a.d.size());
    for (std::size_t k = 0; k < a.d.size(); ++k) out.d.push_back(a.d[k] + b.d[k]);
    return out;
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b)
{
    assert(a.d.size() == b.d.size());
    Dual<T> out;
    out.v = a.v - b.v;
    out.d.reserve(a.d.size());
    for (std::size_t k = 0; k < a.d.size(); ++k) out.d.push_back(a.d[k] - b.d[k]);
    return out;
}

// parameter * state (the parameter carries no x-tangent)
template <class T>
Dual<T> operator*(const T& w, const Dual<T>& s)
{
    Dual<T> out;
    out.v = w * s.v;
    out.d.reserve(s.d.size());
    for (std::size_t k = 0; k < s.d.size(); ++k) out.d.push_back(w * s.d[k]);
    return out;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b)
{
    assert(a.d.size() == b.d.size());
    a.v = a.v + b.v;
    for (std::size_t k = 0; k < a.d.size(); ++k) a.d[k] = a.d[k] + b.d[k];
    return a;
}

template <class T>
Dual<T> swish(const Dual<T>& x)
{
    Dual<T> out;
    out.v = swish(x.v);
    const auto sp = swish_grad(x.v);
    out.d.reserve(x.d.size());
    for (std::size_t k = 0; k < x.d.size(); ++k) out.d.push_back(sp * x.d[k]);
    return out;
}

} // namespace qritz
