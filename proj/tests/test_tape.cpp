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

#include "qritz/gradients.hpp"
#include "qritz/network.hpp"
#include "qritz/prng.hpp"
#include "qritz/tape.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace qritz;

TEST_CASE("finite differences on analytic functions")
{
    auto sq = [](const Vector& t) { return t[0] * t[0]; };
    Vector theta(1);
    theta << 2.0;
    const Vector g = finite_diff_gradient(sq, theta, 1e-6);
    CHECK(g[0] == doctest::Approx(4.0).epsilon(1e-8));

    auto prod = [](const Vector& t) { return t[0] * t[1]; };
    Vector theta2(2);
    theta2 << 1.0, 5.0;
    const Vector g2 = finite_diff_gradient(prod, theta2, 1e-6);
    CHECK(g2[0] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(g2[1] == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(finite_diff_gradient(sq, theta, 0.0), ConfigError);
}

TEST_CASE("finite-difference error halves twice when h halves (Richardson)")
{
    auto cube = [](const Vector& t) { return t[0] * t[0] * t[0]; };
    Vector theta(1);
    theta << 1.0;
    const double e1 = std::abs(finite_diff_gradient(cube, theta, 1e-3)[0] - 3.0);
    const double e2 = std::abs(finite_diff_gradient(cube, theta, 5e-4)[0] - 3.0);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("tape gradients match analytic derivatives")
{
    Tape tape;
    const Var x = tape.leaf(1.5);
    const Var y = tape.leaf(-0.5);
    // f = (x*y + swish(x))^2 - 3 x
    const Var f = square(x * y + swish(x)) - 3.0 * x;
    const auto grad = tape.gradient(f);

    const double sx = qritz::swish(1.5);
    const double inner = 1.5 * -0.5 + sx;
    const double dfdx = 2.0 * inner * (-0.5 + swish_grad(1.5)) - 3.0;
    const double dfdy = 2.0 * inner * 1.5;
    CHECK(grad[0] == doctest::Approx(dfdx).epsilon(1e-14));
    CHECK(grad[1] == doctest::Approx(dfdy).epsilon(1e-14));
}

TEST_CASE("tape replay reproduces forward values bitwise")
{
    Tape tape;
    const Var a = tape.leaf(0.3);
    const Var b = tape.leaf(1.7);
    Var acc = tape.constant(0.25);
    for (int i = 0; i < 5; ++i) acc = swish(acc * a + b) - 0.5 * acc + swish_grad(acc);
    (void)square(acc - 1.0);

    const auto replayed = tape.replay();
    REQUIRE(replayed.size() == tape.values().size());
    for (std::size_t i = 0; i < replayed.size(); ++i) {
        CHECK(replayed[i] == tape.values()[i]); // bitwise
    }
}

TEST_CASE("gradient is linear in the loss")
{
    CounterRng rng{77, 0};
    for (int rep = 0; rep < 10; ++rep) {
        const double va = rng.next_normal();
        const double vb = rng.next_normal();
        const double alpha = rng.next_normal();
        const double beta = rng.next_normal();

        auto build = [&](Tape& tape, Var x, Var y) {
            const Var f = swish(x * y) + square(x - 0.5);
            const Var g = x * x * y + swish_grad(y);
            return std::pair{f, g};
        };

        Tape t1;
        Var x1 = t1.leaf(va), y1 = t1.leaf(vb);
        auto [f1, g1] = build(t1, x1, y1);
        const auto gf = t1.gradient(f1);
        const auto gg = t1.gradient(g1);

        Tape t2;
        Var x2 = t2.leaf(va), y2 = t2.leaf(vb);
        auto [f2, g2] = build(t2, x2, y2);
        const auto gsum = t2.gradient(alpha * f2 + beta * g2);

        for (int i = 0; i < 2; ++i) {
            CHECK(gsum[static_cast<std::size_t>(i)]
                  == doctest::Approx(alpha * gf[static_cast<std::size_t>(i)]
                                     + beta * gg[static_cast<std::size_t>(i)])
                         .epsilon(1e-12));
        }
    }
}

TEST_CASE("loss_param_grad on a constant loss is zero")
{
    const ParamLayout layout(NetworkShape{2, 4, 1});
    const Vector params = Vector::Zero(layout.total());
    auto evaluator = [](Tape& tape, const ParamView<Var>&) { return tape.constant(4.25); };
    const auto [loss, grad] = loss_param_grad(params, layout, evaluator);
    CHECK(loss == 4.25);
    CHECK(grad.norm() == 0.0);
}

TEST_CASE("loss_param_grad reproduces the 1-parameter surrogate gradient")
{
    // u = theta x on [0,1]; the Ritz integrand (1/2)(u')^2 is theta^2/2 at
    // every quadrature point, so the gradient must equal theta.
    const ParamLayout layout(NetworkShape{1, 1, 0});
    Vector params = Vector::Zero(layout.total());
    params[layout.lift_w(0, 0)] = 3.0; // theta

    auto evaluator = [&](Tape&, const ParamView<Var>& pv) {
        const Var theta = pv.lift_w(0, 0);
        return 0.5 * (theta * theta);
    };
    const auto [loss, grad] = loss_param_grad(params, layout, evaluator);
    CHECK(loss == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(grad[layout.lift_w(0, 0)] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("forward_with_input_grad trivial cases")
{
    SUBCASE("all parameters zero")
    {
        const ParamLayout layout(NetworkShape{3, 5, 2});
        const Vector params = Vector::Zero(layout.total());
        Vector x(3);
        x << 0.2, -0.4, 0.9;
        const auto [u, g] = forward_with_input_grad(params, layout, x);
        CHECK(u == 0.0);
        CHECK(g.norm() == 0.0);
    }
    SUBCASE("identity lift, unit head")
    {
        const ParamLayout layout(NetworkShape{2, 2, 0});
        Vector params = Vector::Zero(layout.total());
        params[layout.lift_w(0, 0)] = 1.0;
        params[layout.lift_w(1, 1)] = 1.0;
        params[layout.head_a(0)] = 1.0;
        params[layout.head_a(1)] = 1.0;
        Vector x(2);
        x << 0.3, 0.4;
        const auto [u, g] = forward_with_input_grad(params, layout, x);
        CHECK(u == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("rejects mismatched parameter vector")
    {
        const ParamLayout layout(NetworkShape{2, 2, 0});
        Vector bad = Vector::Zero(layout.total() + 1);
        Vector x = Vector::Zero(2);
        CHECK_THROWS_AS(forward_with_input_grad(bad, layout, x), ConfigError);
    }
}

TEST_CASE("input gradients match central finite differences on a random net")
{
    const ParamLayout layout(NetworkShape{2, 8, 2});
    const Vector params = init_params(layout, 42);
    CounterRng rng{7, 0};
    for (int rep = 0; rep < 4; ++rep) {
        Vector x(2);
        x << rng.next_uniform() * 2.0 - 1.0, rng.next_uniform() * 2.0 - 1.0;
        const auto [u, g] = forward_with_input_grad(params, layout, x);
        CHECK(u == doctest::Approx(net_forward(params, layout, x)).epsilon(1e-14));
        const Vector fd = oracle::fd_gradient_x(
            [&](const Vector& y) { return net_forward(params, layout, y); }, x, 1e-6);
        for (Index d = 0; d < 2; ++d) {
            CHECK(g[d] == doctest::Approx(fd[d]).epsilon(1e-6));
        }
    }
}

TEST_CASE("forward evaluation is deterministic bitwise")
{
    const ParamLayout layout(NetworkShape{3, 6, 3});
    const Vector params = init_params(layout, 5);
    Vector x(3);
    x << 0.11, -0.62, 0.35;
    const auto [u1, g1] = forward_with_input_grad(params, layout, x);
    const auto [u2, g2] = forward_with_input_grad(params, layout, x);
    CHECK(u1 == u2);
    CHECK((g1.array() == g2.array()).all());
}
