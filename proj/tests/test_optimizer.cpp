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

#include "qritz/optimizer.hpp"

#include "qritz/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace qritz;

TEST_CASE("sgd_step basics")
{
    Vector theta = Vector::Constant(3, 1.0);
    const SgdConfig cfg{0.5};

    SUBCASE("zero gradient leaves parameters unchanged")
    {
        const Vector out = sgd_step(theta, Vector::Zero(3), cfg);
        CHECK((out.array() == theta.array()).all());
    }
    SUBCASE("one step on the quadratic c=1 halves theta at alpha=0.5")
    {
        Vector t(1);
        t << 1.0;
        const Vector g = t; // gradient of theta^2/2
        CHECK(sgd_step(t, g, cfg)[0] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("two steps on f = theta^2 with alpha = 0.25")
    {
        Vector t(1);
        t << 1.0;
        const SgdConfig quarter{0.25};
        for (int i = 0; i < 2; ++i) {
            Vector g = 2.0 * t;
            t = sgd_step(t, g, quarter);
        }
        CHECK(t[0] == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("invalid inputs")
    {
        CHECK_THROWS_AS(sgd_step(theta, Vector::Zero(3), SgdConfig{0.0}), ConfigError);
        Vector bad = Vector::Constant(3, std::numeric_limits<double>::quiet_NaN());
        CHECK_THROWS_AS(sgd_step(theta, bad, cfg), NumericError);
    }
}

TEST_CASE("sgd converges linearly on the strongly convex quadratic")
{
    // |theta_{i+1}| = (1 - alpha c) |theta_i|; the log-error slope must
    // equal log(1 - alpha c) to near machine precision.
    const double c = 1.0;
    const double alpha = 0.5;
    const SgdConfig cfg{alpha};
    Vector t(1);
    t << 1.0;
    std::vector<double> logs;
    for (int i = 0; i < 40; ++i) {
        logs.push_back(std::log(std::abs(t[0])));
        Vector g = c * t;
        t = sgd_step(t, g, cfg);
    }
    double slope_sum = 0.0;
    for (std::size_t i = 1; i < logs.size(); ++i) slope_sum += logs[i] - logs[i - 1];
    const double slope = slope_sum / static_cast<double>(logs.size() - 1);
    CHECK(std::abs(slope - std::log(1.0 - alpha * c)) < 1e-6);
}

TEST_CASE("adam_step basics")
{
    SUBCASE("zero gradient at fresh state leaves parameters unchanged")
    {
        Vector t = Vector::Constant(2, 3.0);
        AdamState state(2);
        const Vector out = adam_step(t, Vector::Zero(2), state);
        CHECK((out.array() == t.array()).all());
        CHECK(state.step == 1);
    }
    SUBCASE("first step moves by about alpha regardless of gradient scale")
    {
        for (double scale : {1e-8, 1e-3, 1.0, 1e4, 1e8}) {
            Vector t = Vector::Zero(1);
            AdamState state(1, AdamConfig{1e-3, 0.9, 0.999, 1e-8});
            const Vector g = Vector::Constant(1, scale);
            const Vector out = adam_step(t, g, state);
            // bias-corrected first step: alpha * g / (|g| + eps')
            CHECK(std::abs(out[0]) <= 1e-3 * 1.0000001);
            if (scale >= 1e-3) CHECK(std::abs(out[0]) > 0.9e-3);
        }
    }
    SUBCASE("constant-gradient steps stay bounded by alpha")
    {
        Vector t = Vector::Zero(1);
        AdamState state(1);
        const Vector g = Vector::Constant(1, 7.5);
        for (int i = 0; i < 200; ++i) {
            const Vector out = adam_step(t, g, state);
            CHECK(std::abs(out[0] - t[0]) <= state.cfg.alpha * 1.0000001);
            t = out;
        }
    }
    SUBCASE("deterministic bitwise")
    {
        Vector t = Vector::Constant(3, 0.5);
        const Vector g = Vector::Constant(3, 0.25);
        AdamState s1(3), s2(3);
        const Vector a = adam_step(t, g, s1);
        const Vector b = adam_step(t, g, s2);
        CHECK((a.array() == b.array()).all());
    }
    SUBCASE("errors")
    {
        Vector t = Vector::Zero(2);
        AdamState state(3);
        CHECK_THROWS_AS(adam_step(t, Vector::Zero(2), state), ConfigError);
        AdamState ok(2);
        Vector bad = Vector::Constant(2, std::numeric_limits<double>::infinity());
        CHECK_THROWS_AS(adam_step(t, bad, ok), NumericError);
    }
}
