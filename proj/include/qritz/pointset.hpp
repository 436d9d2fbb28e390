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

#include "qritz/prng.hpp"
#include "qritz/sobol.hpp"
#include "qritz/types.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace qritz {

enum class Frame { unit, domain };
enum class SampleStrategy { qmc, mc };

// One point per column.
struct PointSet {
    Matrix pts;
    Frame frame = Frame::unit;

    Index dim() const { return pts.rows(); }
    Index size() const { return pts.cols(); }
};

struct DomainBox {
    Vector lo;
    Vector hi;

    DomainBox() = default;
    DomainBox(Vector lo_, Vector hi_);
    static DomainBox cube(Index k, double lo, double hi);

    Index dim() const { return lo.size(); }
    double volume() const;
    double surface_area() const;
    // area of one of the two faces orthogonal to dimension d
    double face_area(Index d) const;
};

// N points of the continuing uniform stream; reproducible from (seed, position).
PointSet mc_points(CounterRng& state, Index n, Index k);

PointSet sobol_points(SobolSequence& state, Index n);

// Affine per-coordinate map lo + (hi-lo)*t; the quadrature weight picks up
// the box volume (handled by the loss functionals).
PointSet map_to_box(const PointSet& ps, const DomainBox& box);

// Boundary sample: every point sits exactly on one face (face id
// 2*d + side, side 0 = lower, 1 = upper).
struct BoundaryBatch {
    Matrix pts; // domain frame
    std::vector<int> face;

    Index size() const { return pts.cols(); }
};

Vector outward_normal(const DomainBox& box, int face);

// Generates boundary batches: faces cycle deterministically for QMC and
// are drawn area-weighted for MC; free coordinates come from a
// (K-1)-dimensional stream of the matching strategy.
class BoundarySampler {
public:
    BoundarySampler(DomainBox box, SampleStrategy strategy, std::uint64_t mc_seed,
                    std::shared_ptr<const DirectionTable> table);

    BoundaryBatch next(Index n);

private:
    DomainBox box_;
    SampleStrategy strategy_;
    CounterRng rng_;
    std::unique_ptr<SobolSequence> sobol_; // K-1 dims; null when K == 1 or MC
    std::uint64_t cycle_ = 0;
};

// Exact L2-star discrepancy (Warnock's closed form), the computable
// surrogate used instead of the star discrepancy.
double l2_star_discrepancy(const PointSet& ps);

} // namespace qritz
