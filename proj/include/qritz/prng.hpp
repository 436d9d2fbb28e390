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
#include <cstdint>
#include <numbers>

namespace qritz {

// Counter-based generator: output i is the splitmix64 finalizer applied to
// seed + (i+1) * golden-gamma.  Stateless apart from (seed, position), so
// streams are reproducible across platforms and can seek in O(1).  This is
// deliberately not a std:: engine; std distributions are
// implementation-defined and would break bitwise reproducibility.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t position = 0;

    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64()
    {
        ++position;
        return mix(seed + position * 0x9E3779B97F4A7C15ULL);
    }

    // uniform in [0, 1) with 53 random bits
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller; consumes two uniforms per call
    double next_normal()
    {
        // shift into (0,1] so the log is finite
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

// Deterministic seed derivation for independent sub-streams of one run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    return CounterRng::mix(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

} // namespace qritz
