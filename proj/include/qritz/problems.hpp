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

#include "qritz/gradients.hpp"
#include "qritz/network.hpp"
#include "qritz/pointset.hpp"
#include "qritz/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace qritz {

enum class BcMode { hard_dirichlet, natural_neumann, penalty_neumann };

struct ProblemSpec {
    std::string name;
    DomainBox box;
    std::function<double(const Vector&)> source;     // f
    std::function<double(const Vector&)> exact;      // reference solution
    std::function<double(const Vector&)> boundary_g; // Neumann data (penalty mode)
    BcMode bc_mode = BcMode::hard_dirichlet;
    double penalty_beta = 1.0; // penalty mode only
    double mass_coeff = 0.0;   // coefficient of the u^2 volume term
    BoundaryWrap wrap;         // hard-Dirichlet mode only

    Index dim() const { return box.dim(); }
};

struct LossBreakdown {
    double volume_term = 0.0;
    double penalty_term = 0.0; // boundary integral, without the beta weight
    double total = 0.0;
};

// Benchmark constructions ------------------------------------------------------

// -lap(u) = pi^2 sum cos(pi x_k) on [-1,1]^K with the exact solution
// imposed on the boundary through the vanishing/matching wrap fields.
ProblemSpec benchmark_dirichlet(Index k);

// -lap(u) + pi^2 u = 2 pi^2 sum cos(pi x_k) on [0,1]^K with zero Neumann
// data; the flux condition is natural for the volume functional.
ProblemSpec benchmark_neumann(Index k);

// Same operator, zero-flux data enforced through a weighted boundary
// penalty instead.
ProblemSpec benchmark_neumann_penalty(Index k, double beta);

// "dirichlet16", "neumann4", "neumann_penalty2" ...
ProblemSpec make_problem(const std::string& name, double penalty_beta = 1.0);

// Discretized functionals ------------------------------------------------------

LossBreakdown dirichlet_loss(const Vector& params, const ParamLayout& layout,
                             const ProblemSpec& spec, const Matrix& batch);

LossBreakdown neumann_loss(const Vector& params, const ParamLayout& layout,
                           const ProblemSpec& spec, const Matrix& batch);

LossBreakdown penalty_loss(const Vector& params, const ParamLayout& layout,
                           const ProblemSpec& spec, const Matrix& volume_batch,
                           const BoundaryBatch& boundary_batch);

// Fused value + parameter gradient over a batch, the training path.
std::pair<LossBreakdown, Vector> loss_and_grad(const Vector& params, const ParamLayout& layout,
                                               const ProblemSpec& spec, const Matrix& volume_batch,
                                               const BoundaryBatch* boundary_batch);

// Tape-recorded form of the same functional for loss_param_grad.
TapeEvaluator make_tape_evaluator(const ProblemSpec& spec, Matrix volume_batch,
                                  std::optional<BoundaryBatch> boundary_batch = std::nullopt);

// Generic per-point form shared by the tape evaluator and the reference
// value path in the tests.  P is double or Var; make_const lifts a plain
// number into P.
template <class P>
struct LossParts {
    P volume;
    P penalty;
};

template <class P, class MakeConst>
LossParts<P> loss_generic(const ParamView<P>& pv, const ProblemSpec& spec, const Matrix& volume,
                          const BoundaryBatch* boundary, MakeConst&& make_const)
{
    const Index k = spec.box.dim();
    const Index n = volume.cols();
    LossParts<P> parts{make_const(0.0), make_const(0.0)};

    std::vector<Dual<P>> xs(static_cast<std::size_t>(k));
    for (Index i = 0; i < n; ++i) {
        const Vector x = volume.col(i);
        for (Index c = 0; c < k; ++c) {
            auto& xc = xs[static_cast<std::size_t>(c)];
            xc.v = make_const(x[c]);
            xc.d.assign(static_cast<std::size_t>(k), make_const(0.0));
            xc.d[static_cast<std::size_t>(c)] = make_const(1.0);
        }
        Dual<P> u = net_dual<P>(pv, xs);
        if (spec.wrap.mode == BoundaryWrap::Mode::wrapped) {
            u = apply_wrap(spec.wrap.eval(x), u);
        }
        P grad_sq = square(u.d[0]);
        for (Index c = 1; c < k; ++c) grad_sq += square(u.d[static_cast<std::size_t>(c)]);
        P integrand = 0.5 * grad_sq - spec.source(x) * u.v;
        if (spec.mass_coeff != 0.0) integrand += spec.mass_coeff * square(u.v);
        parts.volume += integrand;
    }
    parts.volume = (spec.box.volume() / static_cast<double>(n)) * parts.volume;

    if (boundary != nullptr && boundary->size() > 0) {
        P acc = make_const(0.0);
        for (Index i = 0; i < boundary->size(); ++i) {
            const Vector x = boundary->pts.col(i);
            for (Index c = 0; c < k; ++c) {
                auto& xc = xs[static_cast<std::size_t>(c)];
                xc.v = make_const(x[c]);
                xc.d.assign(static_cast<std::size_t>(k), make_const(0.0));
                xc.d[static_cast<std::size_t>(c)] = make_const(1.0);
            }
            const Dual<P> u = net_dual<P>(pv, xs);
            const Vector nrm = outward_normal(spec.box, boundary->face[static_cast<std::size_t>(i)]);
            P flux = make_const(0.0);
            for (Index c = 0; c < k; ++c) {
                if (nrm[c] != 0.0) flux += nrm[c] * u.d[static_cast<std::size_t>(c)];
            }
            acc += square(flux - spec.boundary_g(x));
        }
        parts.penalty =
            (spec.box.surface_area() / static_cast<double>(boundary->size())) * acc;
    }
    return parts;
}

} // namespace qritz
