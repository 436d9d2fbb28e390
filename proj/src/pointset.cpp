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

#include "qritz/pointset.hpp"

#include "qritz/errors.hpp"

#include <cmath>
#include <string>

namespace qritz {

DomainBox::DomainBox(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_))
{
    if (lo.size() != hi.size() || lo.size() < 1) {
        throw ConfigError("domain box bounds must have equal positive dimension");
    }
    for (Index d = 0; d < lo.size(); ++d) {
        if (!(lo[d] < hi[d])) throw ConfigError("domain box needs lo < hi in every dimension");
    }
}

DomainBox DomainBox::cube(Index k, double lo, double hi)
{
    return DomainBox(Vector::Constant(k, lo), Vector::Constant(k, hi));
}

double DomainBox::volume() const
{
    double v = 1.0;
    for (Index d = 0; d < dim(); ++d) v *= hi[d] - lo[d];
    return v;
}

double DomainBox::face_area(Index d) const { return volume() / (hi[d] - lo[d]); }

double DomainBox::surface_area() const
{
    double a = 0.0;
    for (Index d = 0; d < dim(); ++d) a += 2.0 * face_area(d);
    return a;
}

PointSet mc_points(CounterRng& state, Index n, Index k)
{
    if (n < 0 || k < 1) throw ConfigError("mc_points needs n >= 0 and k >= 1");
    PointSet ps;
    ps.frame = Frame::unit;
    ps.pts.resize(k, n);
    for (Index i = 0; i < n; ++i)
        for (Index d = 0; d < k; ++d) ps.pts(d, i) = state.next_uniform();
    return ps;
}

PointSet sobol_points(SobolSequence& state, Index n)
{
    PointSet ps;
    ps.frame = Frame::unit;
    ps.pts = state.next(n);
    return ps;
}

PointSet map_to_box(const PointSet& ps, const DomainBox& box)
{
    if (ps.frame != Frame::unit) throw ConfigError("map_to_box expects a unit-frame point set");
    if (ps.dim() != box.dim()) throw ConfigError("point set and box dimensions differ");
    PointSet out;
    out.frame = Frame::domain;
    const Vector span = box.hi - box.lo;
    out.pts = (ps.pts.array().colwise() * span.array()).colwise() + box.lo.array();
    return out;
}

Vector outward_normal(const DomainBox& box, int face)
{
    const Index d = face / 2;
    if (d < 0 || d >= box.dim()) throw ConfigError("face id out of range");
    Vector n = Vector::Zero(box.dim());
    n[d] = (face % 2 == 0) ? -1.0 : 1.0;
    return n;
}

BoundarySampler::BoundarySampler(DomainBox box, SampleStrategy strategy, std::uint64_t mc_seed,
                                 std::shared_ptr<const DirectionTable> table)
    : box_(std::move(box)), strategy_(strategy), rng_{mc_seed, 0}
{
    if (strategy_ == SampleStrategy::qmc && box_.dim() > 1) {
        sobol_ = std::make_unique<SobolSequence>(box_.dim() - 1, std::move(table));
    }
}

BoundaryBatch BoundarySampler::next(Index n)
{
    const Index k = box_.dim();
    BoundaryBatch batch;
    batch.pts.resize(k, n);
    batch.face.resize(static_cast<std::size_t>(n));

    Matrix free_coords; // (K-1) x n unit coordinates, QMC only
    if (sobol_) free_coords = sobol_->next(n);

    const double total_area = box_.surface_area();
    for (Index i = 0; i < n; ++i) {
        int face = 0;
        if (strategy_ == SampleStrategy::qmc) {
            face = static_cast<int>(cycle_ % static_cast<std::uint64_t>(2 * k));
            ++cycle_;
        } else {
            const double u = rng_.next_uniform() * total_area;
            double acc = 0.0;
            face = static_cast<int>(2 * k - 1);
            for (int f = 0; f < 2 * k; ++f) {
                acc += box_.face_area(f / 2);
                if (u < acc) {
                    face = f;
                    break;
                }
            }
        }
        const Index pinned = face / 2;
        batch.face[static_cast<std::size_t>(i)] = face;
        batch.pts(pinned, i) = (face % 2 == 0) ? box_.lo[pinned] : box_.hi[pinned];
        Index slot = 0;
        for (Index d = 0; d < k; ++d) {
            if (d == pinned) continue;
            const double t = sobol_ ? free_coords(slot, i)
                                    : (strategy_ == SampleStrategy::mc ? rng_.next_uniform() : 0.0);
            batch.pts(d, i) = box_.lo[d] + (box_.hi[d] - box_.lo[d]) * t;
            ++slot;
        }
    }
    return batch;
}

double l2_star_discrepancy(const PointSet& ps)
{
    if (ps.frame != Frame::unit) throw ConfigError("discrepancy is defined on unit-frame sets");
    const Index n = ps.size();
    const Index k = ps.dim();
    if (n < 1) throw ConfigError("discrepancy of an empty point set");

    const double n_d = static_cast<double>(n);
    double single = 0.0;
    for (Index i = 0; i < n; ++i) {
        double prod = 1.0;
        for (Index d = 0; d < k; ++d) prod *= 1.0 - ps.pts(d, i) * ps.pts(d, i);
        single += prod;
    }
    double pair = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            double prod = 1.0;
            for (Index d = 0; d < k; ++d) prod *= 1.0 - std::max(ps.pts(d, i), ps.pts(d, j));
            pair += prod;
        }
    }
    const double t2 = std::pow(3.0, -static_cast<double>(k))
                      - std::pow(2.0, 1.0 - static_cast<double>(k)) / n_d * single
                      + pair / (n_d * n_d);
    return std::sqrt(std::max(t2, 0.0));
}

} // namespace qritz
