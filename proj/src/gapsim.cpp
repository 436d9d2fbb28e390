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

#include "qritz/gapsim.hpp"

#include "qritz/errors.hpp"
#include "qritz/prng.hpp"

#include <cmath>
#include <cstdio>

namespace qritz {

double NoisyGradientModel::r_of(double n) const
{
    if (!(n >= 1.0)) throw ConfigError("mini-batch size must be >= 1");
    switch (law) {
    case Law::inverse_n: return 1.0 / n;
    case Law::log_pow_over_n2:
        return std::pow(std::log(n), 2.0 * k_exponent) / (n * n);
    case Law::constant: return 1.0;
    }
    throw ConfigError("unknown variance law");
}

double NoisyGradientModel::variance(double n) const { return c_v * r_of(n); }

NoisyGradientModel::Law NoisyGradientModel::parse_law(const std::string& name)
{
    if (name == "mc") return Law::inverse_n;
    if (name == "qmc") return Law::log_pow_over_n2;
    if (name == "constant") return Law::constant;
    throw ConfigError("unknown variance law: " + name + " (want mc, qmc or constant)");
}

std::string NoisyGradientModel::law_name(Law law)
{
    switch (law) {
    case Law::inverse_n: return "mc";
    case Law::log_pow_over_n2: return "qmc";
    case Law::constant: return "constant";
    }
    return "?";
}

double predicted_gap(const QuadraticProblem& problem, double mu, double alpha, double c_v,
                     double r)
{
    return alpha * problem.curvature * c_v * r / (2.0 * problem.curvature * mu);
}

double exact_quadratic_gap(const QuadraticProblem& problem, double alpha, double variance)
{
    const double c = problem.curvature;
    const double contraction = (1.0 - c * alpha) * (1.0 - c * alpha);
    if (!(contraction < 1.0)) throw ConfigError("stepsize leaves the contracting regime");
    return 0.5 * c * alpha * alpha * variance / (1.0 - contraction);
}

double simulate_gap(const GapConfig& cfg)
{
    const auto& pb = cfg.problem;
    const auto& nm = cfg.noise;
    if (pb.dim < 1 || !(pb.curvature > 0.0)) throw ConfigError("invalid quadratic problem");
    const double bound = nm.mu / (pb.curvature * nm.m_g(cfg.n));
    if (!(cfg.alpha > 0.0) || cfg.alpha > bound * (1.0 + 1e-12)) {
        throw ConfigError("stepsize " + std::to_string(cfg.alpha)
                          + " violates the admissible bound " + std::to_string(bound));
    }
    if (cfg.iters < 10 || cfg.replicas < 1) throw ConfigError("need iters >= 10 and replicas >= 1");

    const double c = pb.curvature;
    const double total_var = nm.variance(cfg.n);
    const double sd = std::sqrt(total_var / static_cast<double>(pb.dim));
    const Index tail_start =
        cfg.iters - std::max<Index>(1, static_cast<Index>(cfg.tail_fraction * static_cast<double>(cfg.iters)));

    double grand = 0.0;
    Vector theta(pb.dim);
    for (Index rep = 0; rep < cfg.replicas; ++rep) {
        CounterRng rng{derive_seed(cfg.seed, static_cast<std::uint64_t>(rep)), 0};
        theta.setConstant(cfg.theta0);
        double tail_sum = 0.0;
        Index tail_count = 0;
        for (Index it = 0; it < cfg.iters; ++it) {
            for (Index d = 0; d < pb.dim; ++d) {
                const double g = c * theta[d] + sd * rng.next_normal();
                theta[d] -= cfg.alpha * g;
            }
            if (it >= tail_start) {
                tail_sum += 0.5 * c * theta.squaredNorm();
                ++tail_count;
            }
        }
        grand += tail_sum / static_cast<double>(tail_count);
    }
    return grand / static_cast<double>(cfg.replicas);
}

std::string gap_rows_to_csv(const std::vector<GapRow>& rows)
{
    std::string out = "n,alpha,r_law,predicted_gap,measured_gap,relative_deviation\n";
    char buf[192];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%.17g,%.17g\n", r.n, r.alpha,
                      r.r_law.c_str(), r.predicted, r.measured, r.relative_deviation);
        out += buf;
    }
    return out;
}

} // namespace qritz
