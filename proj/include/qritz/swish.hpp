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

#include <cmath>

namespace qritz {

// Numerically stable logistic sigmoid: the exp argument is never positive.
inline double sigmoid(double x)
{
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// swish(x) = x * sigmoid(x)
inline double swish(double x)
{
    return x * sigmoid(x);
}

// d/dx swish(x) = s(x) * (1 + x * (1 - s(x)))
inline double swish_grad(double x)
{
    const double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

// d^2/dx^2 swish(x) = s(x)(1-s(x)) * (2 + x(1 - 2 s(x)))
inline double swish_grad2(double x)
{
    const double s = sigmoid(x);
    return s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s));
}

} // namespace qritz
