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

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace qritz;

namespace {

std::shared_ptr<const DirectionTable> table() { return DirectionTable::load_default(); }

} // namespace

TEST_CASE("first Sobol points follow the radical-inverse oracle in 1D")
{
    SobolSequence seq(1, table());
    const Matrix pts = seq.next(64);
    CHECK(pts(0, 0) == 0.5);
    CHECK(pts(0, 1) == 0.75);
    CHECK(pts(0, 2) == 0.25);
    CHECK(pts(0, 3) == 0.375);
    for (Index i = 0; i < 64; ++i) {
        CHECK(pts(0, i) == oracle::radical_inverse_gray(static_cast<std::uint64_t>(i) + 1));
    }
}

TEST_CASE("first Sobol points in higher dimensions match the reference stream")
{
    // Frozen from an independent generator seeded by the same published
    // direction-number table (origin skipped).
    const double ref_d3[8][3] = {
        {0.5, 0.5, 0.5},       {0.75, 0.25, 0.25},    {0.25, 0.75, 0.75},
        {0.375, 0.375, 0.625}, {0.875, 0.875, 0.125}, {0.625, 0.125, 0.875},
        {0.125, 0.625, 0.375}, {0.1875, 0.3125, 0.9375}};
    SobolSequence seq(3, table());
    const Matrix pts = seq.next(8);
    for (Index i = 0; i < 8; ++i)
        for (Index d = 0; d < 3; ++d) CHECK(pts(d, i) == ref_d3[i][d]);

    const double ref_d8_row2[8] = {0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75};
    const double ref_d8_row8[8] = {0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125, 0.4375, 0.9375};
    SobolSequence seq8(8, table());
    const Matrix p8 = seq8.next(8);
    for (Index d = 0; d < 8; ++d) {
        CHECK(p8(d, 1) == ref_d8_row2[d]);
        CHECK(p8(d, 7) == ref_d8_row8[d]);
    }
}

TEST_CASE("Sobol dyadic blocks are midpoint-stratified in every 1D projection")
{
    // For the block of indices [2^m, 2^{m+1}) each coordinate visits the
    // midpoint of every dyadic bin of width 2^-m exactly once.
    for (Index k : {1, 2, 3, 5, 8}) {
        for (int m = 0; m <= 10; ++m) {
            // emit indices 2^m .. 2^{m+1}-1
            SobolSequence seq = SobolSequence::at_index(k, (1ull << m) - 1, table());
            const Matrix pts = seq.next(1ll << m);
            for (Index d = 0; d < k; ++d) {
                std::vector<int> bin_count(1ull << m, 0);
                for (Index i = 0; i < pts.cols(); ++i) {
                    const double x = pts(d, i);
                    const auto bin = static_cast<std::size_t>(x * static_cast<double>(1ull << m));
                    REQUIRE(bin < bin_count.size());
                    ++bin_count[bin];
                    // exact midpoint offset (2j+1) / 2^{m+1}
                    const double mid = (2.0 * static_cast<double>(bin) + 1.0)
                                       / static_cast<double>(1ull << (m + 1));
                    CHECK(x == mid);
                }
                CHECK(std::all_of(bin_count.begin(), bin_count.end(),
                                  [](int c) { return c == 1; }));
            }
        }
    }
}

TEST_CASE("Sobol streams with equal state emit identical points")
{
    SobolSequence a = SobolSequence::at_index(4, 1000, table());
    SobolSequence b = SobolSequence::at_index(4, 1000, table());
    const Matrix pa = a.next(100);
    const Matrix pb = b.next(100);
    CHECK((pa.array() == pb.array()).all());

    // seeking is consistent with advancing
    SobolSequence c(4, table());
    (void)c.next(1000);
    const Matrix pc = c.next(100);
    CHECK((pa.array() == pc.array()).all());
}

TEST_CASE("Sobol edge cases")
{
    SobolSequence seq(2, table());
    const Matrix empty = seq.next(0);
    CHECK(empty.cols() == 0);
    CHECK(seq.index() == 0); // state unchanged
    CHECK_THROWS_AS(SobolSequence(100, table()), ConfigError);
    CHECK_THROWS_AS(SobolSequence::at_index(2, 1ull << 40, table()), ConfigError);

    // outputs stay in [0,1)
    const Matrix pts = seq.next(4096);
    CHECK((pts.array() >= 0.0).all());
    CHECK((pts.array() < 1.0).all());
}

TEST_CASE("mc_points is reproducible and uniform")
{
    SUBCASE("same seed and position give identical sets")
    {
        CounterRng a{123, 0};
        CounterRng b{123, 0};
        const PointSet pa = mc_points(a, 50, 3);
        const PointSet pb = mc_points(b, 50, 3);
        CHECK((pa.pts.array() == pb.pts.array()).all());
        CHECK(a.position == b.position);
    }
    SUBCASE("one point has all coordinates in [0,1)")
    {
        CounterRng rng{9, 0};
        const PointSet ps = mc_points(rng, 1, 5);
        CHECK(ps.size() == 1);
        CHECK((ps.pts.array() >= 0.0).all());
        CHECK((ps.pts.array() < 1.0).all());
    }
    SUBCASE("sample mean satisfies the 5-sigma CLT bound for >= 99 of 100 seeds")
    {
        const Index n = 10000;
        const double bound = 5.0 / std::sqrt(12.0 * static_cast<double>(n));
        int ok = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            CounterRng rng{seed, 0};
            const PointSet ps = mc_points(rng, n, 1);
            const double mean = ps.pts.mean();
            if (std::abs(mean - 0.5) <= bound) ++ok;
        }
        CHECK(ok >= 99);
    }
}

TEST_CASE("map_to_box maps the unit frame affinely")
{
    PointSet ps;
    ps.frame = Frame::unit;
    ps.pts.resize(2, 2);
    ps.pts.col(0) << 0.5, 0.5;
    ps.pts.col(1) << 0.0, 1.0;
    const DomainBox box = DomainBox::cube(2, -1.0, 1.0);
    const PointSet mapped = map_to_box(ps, box);
    CHECK(mapped.frame == Frame::domain);
    CHECK(mapped.pts(0, 0) == 0.0);
    CHECK(mapped.pts(1, 0) == 0.0);
    CHECK(mapped.pts(0, 1) == -1.0);
    CHECK(mapped.pts(1, 1) == 1.0);

    CHECK(DomainBox::cube(4, -1.0, 1.0).volume() == 16.0);
    CHECK_THROWS_AS(map_to_box(mapped, box), ConfigError); // frame mismatch
    CHECK_THROWS_AS(DomainBox(Vector::Ones(2), Vector::Zero(2)), ConfigError);
}

TEST_CASE("boundary sampling pins exactly one coordinate per point")
{
    SUBCASE("K=1 cycling alternates the two endpoints")
    {
        BoundarySampler sampler(DomainBox::cube(1, 0.0, 1.0), SampleStrategy::qmc, 0, table());
        const BoundaryBatch batch = sampler.next(6);
        for (Index i = 0; i < 6; ++i) {
            CHECK(batch.pts(0, i) == (i % 2 == 0 ? 0.0 : 1.0));
        }
    }
    SUBCASE("K=2 cycling places exactly two of eight points on each face")
    {
        BoundarySampler sampler(DomainBox::cube(2, 0.0, 1.0), SampleStrategy::qmc, 0, table());
        const BoundaryBatch batch = sampler.next(8);
        std::vector<int> per_face(4, 0);
        for (int f : batch.face) ++per_face[static_cast<std::size_t>(f)];
        for (int c : per_face) CHECK(c == 2);
    }
    SUBCASE("every sampled point satisfies the one-pinned-coordinate predicate")
    {
        for (SampleStrategy strat : {SampleStrategy::qmc, SampleStrategy::mc}) {
            const DomainBox box = DomainBox::cube(3, -1.0, 2.0);
            BoundarySampler sampler(box, strat, 77, table());
            const BoundaryBatch batch = sampler.next(200);
            for (Index i = 0; i < batch.size(); ++i) {
                int pinned = 0;
                for (Index d = 0; d < 3; ++d) {
                    const double v = batch.pts(d, i);
                    if (v == box.lo[d] || v == box.hi[d]) {
                        ++pinned;
                    } else {
                        CHECK(v > box.lo[d]);
                        CHECK(v < box.hi[d]);
                    }
                }
                CHECK(pinned == 1);
                const Index fd = batch.face[static_cast<std::size_t>(i)] / 2;
                const double expect = batch.face[static_cast<std::size_t>(i)] % 2 == 0
                                          ? box.lo[fd]
                                          : box.hi[fd];
                CHECK(batch.pts(fd, i) == expect);
            }
        }
    }
}

TEST_CASE("L2-star discrepancy closed form")
{
    SUBCASE("single midpoint in 1D")
    {
        PointSet ps;
        ps.frame = Frame::unit;
        ps.pts = Matrix::Constant(1, 1, 0.5);
        // T^2 = 1/3 - 3/4 + 1/2 = 1/12
        CHECK(l2_star_discrepancy(ps) == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-15));
    }
    SUBCASE("exact duplication leaves the discrepancy unchanged")
    {
        CounterRng rng{5, 0};
        const PointSet ps = mc_points(rng, 37, 3);
        PointSet doubled;
        doubled.frame = Frame::unit;
        doubled.pts.resize(3, 74);
        doubled.pts << ps.pts, ps.pts;
        CHECK(l2_star_discrepancy(doubled)
              == doctest::Approx(l2_star_discrepancy(ps)).epsilon(1e-13));
    }
    SUBCASE("Sobol beats the mean MC discrepancy at N=1024, K=2")
    {
        SobolSequence seq(2, table());
        const double t_sobol = l2_star_discrepancy(sobol_points(seq, 1024));
        double mc_mean = 0.0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            CounterRng rng{seed, 0};
            mc_mean += l2_star_discrepancy(mc_points(rng, 1024, 2));
        }
        mc_mean /= 50.0;
        CHECK(t_sobol < mc_mean);
    }
    SUBCASE("empty set is rejected")
    {
        PointSet ps;
        ps.frame = Frame::unit;
        ps.pts.resize(2, 0);
        CHECK_THROWS_AS(l2_star_discrepancy(ps), ConfigError);
    }
}
