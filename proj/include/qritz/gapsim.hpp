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

#include "qritz/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qritz {

// Isotropic quadratic I(theta) = c/2 |theta|^2 with minimizer 0; curvature
// and Lipschitz constant coincide by construction.
struct QuadraticProblem {
    Index dim = 1;
    double curvature = 1.0; // c = L
};

// Gradient-noise variance law V(N) = c_v * r(N).
struct NoisyGradientModel {
    enum class Law { inverse_n, log_pow_over_n2, constant };
    Law law = Law::inverse_n;
    double c_v = 1.0;
    int k_exponent = 2; // K in (ln N)^{2K} / N^2

    // First/second-moment constants of the model: the injected noise is
    // exactly unbiased (mu = mu_G = 1) with no gradient-proportional part
    // (M_V = 0), so M_G = mu_G^2 (1 + r(N)).
    double mu = 1.0;
    double mu_g = 1.0;
    double m_v = 0.0;

    double r_of(double n) const;
    double variance(double n) const; // c_v * r(N), or c_v for the constant law
    double m_g(double n) const { return m_v + mu_g * mu_g * (1.0 + r_of(n)); }
    static Law parse_law(const std::string& name);
    static std::string law_name(Law law);
};

struct GapConfig {
    QuadraticProblem problem;
    NoisyGradientModel noise;
    double alpha = 0.1;
    double n = 100; // mini-batch size entering r(N)
    Index iters = 1000;
    Index replicas = 1000;
    double theta0 = 1.0;      // every coordinate of the start point
    double tail_fraction = 0.2;
    std::uint64_t seed = 1;
};

// Asymptotic expected optimality gap of the fixed-stepsize analysis,
// alpha * L * C_V * r / (2 c mu).
double predicted_gap(const QuadraticProblem& problem, double mu, double alpha, double c_v,
                     double r);

// Exact fixed point of the recursion the isotropic quadratic actually
// follows: gap' = (1 - c alpha)^2 gap + (c/2) alpha^2 V.
double exact_quadratic_gap(const QuadraticProblem& problem, double alpha, double variance);

// Runs SGD with g = grad I(theta) + eta, eta zero-mean Gaussian with total
// variance V(N), and returns the replica-averaged gap over the tail window.
// Throws if alpha violates the admissible bound mu / (L M_G).
double simulate_gap(const GapConfig& cfg);

struct GapRow {
    double n = 0.0;
    double alpha = 0.0;
    std::string r_law;
    double predicted = 0.0;
    double measured = 0.0;
    double relative_deviation = 0.0;
};

std::string gap_rows_to_csv(const std::vector<GapRow>& rows);

} // namespace qritz
