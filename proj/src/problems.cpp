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

#include "qritz/problems.hpp"

#include "qritz/batch_kernel.hpp"
#include "qritz/errors.hpp"

#include <cmath>
#include <numbers>

namespace qritz {

namespace {

constexpr double kPi = std::numbers::pi;

double sum_cos_pi(const Vector& x)
{
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) s += std::cos(kPi * x[i]);
    return s;
}

// Wrap of the Dirichlet benchmark: with P = prod(x_k^2 - 1),
//   A = exp(P) - 1,  B = exp(P) * sum cos(pi x_k).
// On any face some x_k^2 - 1 is exactly zero, so A vanishes and B reduces
// to the boundary data exactly, not just to roundoff.
WrapEval dirichlet_wrap_eval(const Vector& x)
{
    const Index k = x.size();
    Vector terms(k);
    for (Index i = 0; i < k; ++i) terms[i] = x[i] * x[i] - 1.0;

    // leave-one-out products via prefix/suffix scans
    Vector pre(k + 1), suf(k + 1);
    pre[0] = 1.0;
    for (Index i = 0; i < k; ++i) pre[i + 1] = pre[i] * terms[i];
    suf[k] = 1.0;
    for (Index i = k; i-- > 0;) suf[i] = suf[i + 1] * terms[i];

    const double p = pre[k];
    const double e = std::exp(p);
    const double c = sum_cos_pi(x);

    WrapEval w;
    w.a = e - 1.0;
    w.b = e * c;
    w.da.resize(k);
    w.db.resize(k);
    for (Index i = 0; i < k; ++i) {
        const double dp = 2.0 * x[i] * pre[i] * suf[i + 1];
        w.da[i] = e * dp;
        w.db[i] = e * (dp * c - kPi * std::sin(kPi * x[i]));
    }
    return w;
}

} // namespace

ProblemSpec benchmark_dirichlet(Index k)
{
    if (k < 1) throw ConfigError("benchmark dimension must be >= 1");
    ProblemSpec spec;
    spec.name = "dirichlet" + std::to_string(k);
    spec.box = DomainBox::cube(k, -1.0, 1.0);
    spec.source = [](const Vector& x) { return kPi * kPi * sum_cos_pi(x); };
    spec.exact = [](const Vector& x) { return sum_cos_pi(x); };
    spec.boundary_g = [](const Vector&) { return 0.0; };
    spec.bc_mode = BcMode::hard_dirichlet;
    spec.mass_coeff = 0.0;
    spec.wrap.mode = BoundaryWrap::Mode::wrapped;
    spec.wrap.eval = dirichlet_wrap_eval;
    return spec;
}

ProblemSpec benchmark_neumann(Index k)
{
    if (k < 1) throw ConfigError("benchmark dimension must be >= 1");
    ProblemSpec spec;
    spec.name = "neumann" + std::to_string(k);
    spec.box = DomainBox::cube(k, 0.0, 1.0);
    spec.source = [](const Vector& x) { return 2.0 * kPi * kPi * sum_cos_pi(x); };
    spec.exact = [](const Vector& x) { return sum_cos_pi(x); };
    spec.boundary_g = [](const Vector&) { return 0.0; };
    spec.bc_mode = BcMode::natural_neumann;
    spec.mass_coeff = kPi * kPi;
    spec.wrap.mode = BoundaryWrap::Mode::bare;
    return spec;
}

ProblemSpec benchmark_neumann_penalty(Index k, double beta)
{
    if (!(beta > 0.0)) throw ConfigError("penalty weight must be positive");
    ProblemSpec spec = benchmark_neumann(k);
    spec.name = "neumann_penalty" + std::to_string(k);
    spec.bc_mode = BcMode::penalty_neumann;
    spec.penalty_beta = beta;
    return spec;
}

ProblemSpec make_problem(const std::string& name, double penalty_beta)
{
    auto digits = name.find_last_not_of("0123456789");
    if (digits == std::string::npos || digits + 1 >= name.size()) {
        throw ConfigError("problem name must end in a dimension, e.g. dirichlet2: " + name);
    }
    const std::string base = name.substr(0, digits + 1);
    const Index k = std::stoll(name.substr(digits + 1));
    if (base == "dirichlet") return benchmark_dirichlet(k);
    if (base == "neumann") return benchmark_neumann(k);
    if (base == "neumann_penalty") return benchmark_neumann_penalty(k, penalty_beta);
    throw ConfigError("unknown problem: " + name);
}

namespace {

void check_boundary_batch(const ProblemSpec& spec, const BoundaryBatch& bnd)
{
    for (Index i = 0; i < bnd.size(); ++i) {
        const int face = bnd.face[static_cast<std::size_t>(i)];
        const Index d = face / 2;
        if (d < 0 || d >= spec.box.dim()) throw ConfigError("boundary point has no valid face id");
        const double bound = (face % 2 == 0) ? spec.box.lo[d] : spec.box.hi[d];
        if (bnd.pts(d, i) != bound) {
            throw ConfigError("boundary point " + std::to_string(i)
                              + " does not lie on its face");
        }
    }
}

// Shared fused evaluation; writes the gradient when grad != nullptr.
LossBreakdown evaluate(const Vector& params, const ParamLayout& layout, const ProblemSpec& spec,
                       const Matrix& volume_batch, const BoundaryBatch* boundary_batch,
                       Vector* grad)
{
    layout.check_sized(params.size(), "loss evaluation");
    const Index k = spec.box.dim();
    if (layout.shape().input_dim != k) {
        throw ConfigError("network input dimension does not match the problem");
    }
    if (volume_batch.cols() < 1) throw ConfigError("volume batch must be nonempty");
    const bool wrapped = spec.wrap.mode == BoundaryWrap::Mode::wrapped;

    if (grad != nullptr) {
        grad->setZero(layout.total());
    }

    BatchKernel kernel(layout);
    const double vol_w = spec.box.volume() / static_cast<double>(volume_batch.cols());
    double volume_term = 0.0;

    for (Index start = 0; start < volume_batch.cols(); start += kernel.chunk_capacity()) {
        const Index n = std::min<Index>(kernel.chunk_capacity(), volume_batch.cols() - start);
        const auto chunk = volume_batch.middleCols(start, n);
        kernel.forward(params, chunk);
        const auto& u = kernel.values();
        const auto& g = kernel.tangents();

        Eigen::RowVectorXd pu = Eigen::RowVectorXd::Zero(n);
        Matrix pg = Matrix::Zero(k, n);
        for (Index i = 0; i < n; ++i) {
            const Vector x = chunk.col(i);
            const double f = spec.source(x);
            double uh = u[i];
            Vector gh = g.col(i);
            WrapEval w;
            if (wrapped) {
                w = spec.wrap.eval(x);
                gh = w.da * u[i] + w.a * g.col(i) + w.db;
                uh = w.a * u[i] + w.b;
            }
            const double integrand =
                0.5 * gh.squaredNorm() + spec.mass_coeff * uh * uh - f * uh;
            if (!std::isfinite(integrand)) {
                throw NumericError("non-finite loss integrand at volume point "
                                   + std::to_string(start + i));
            }
            volume_term += vol_w * integrand;
            if (grad != nullptr) {
                const double pu_hat = vol_w * (2.0 * spec.mass_coeff * uh - f);
                const Vector pg_hat = vol_w * gh;
                if (wrapped) {
                    pu[i] = pu_hat * w.a + pg_hat.dot(w.da);
                    pg.col(i) = w.a * pg_hat;
                } else {
                    pu[i] = pu_hat;
                    pg.col(i) = pg_hat;
                }
            }
        }
        if (grad != nullptr) kernel.backward(params, pu, pg, *grad);
    }

    double penalty_term = 0.0;
    if (spec.bc_mode == BcMode::penalty_neumann) {
        if (boundary_batch == nullptr || boundary_batch->size() < 1) {
            throw ConfigError("penalty mode needs a nonempty boundary batch");
        }
        check_boundary_batch(spec, *boundary_batch);
        const double area_w =
            spec.box.surface_area() / static_cast<double>(boundary_batch->size());
        for (Index start = 0; start < boundary_batch->size(); start += kernel.chunk_capacity()) {
            const Index n = std::min<Index>(kernel.chunk_capacity(), boundary_batch->size() - start);
            const auto chunk = boundary_batch->pts.middleCols(start, n);
            kernel.forward(params, chunk);
            const auto& g = kernel.tangents();

            Eigen::RowVectorXd pu = Eigen::RowVectorXd::Zero(n);
            Matrix pg = Matrix::Zero(k, n);
            for (Index i = 0; i < n; ++i) {
                const Vector x = chunk.col(i);
                const int face = boundary_batch->face[static_cast<std::size_t>(start + i)];
                const Vector nrm = outward_normal(spec.box, face);
                const double flux = g.col(i).dot(nrm);
                const double r = flux - spec.boundary_g(x);
                if (!std::isfinite(r)) {
                    throw NumericError("non-finite penalty residual at boundary point "
                                       + std::to_string(start + i));
                }
                penalty_term += area_w * r * r;
                if (grad != nullptr) {
                    pg.col(i) = spec.penalty_beta * area_w * 2.0 * r * nrm;
                }
            }
            if (grad != nullptr) kernel.backward(params, pu, pg, *grad);
        }
    }

    LossBreakdown out;
    out.volume_term = volume_term;
    out.penalty_term = penalty_term;
    out.total = volume_term
                + (spec.bc_mode == BcMode::penalty_neumann ? spec.penalty_beta * penalty_term : 0.0);
    return out;
}

} // namespace

LossBreakdown dirichlet_loss(const Vector& params, const ParamLayout& layout,
                             const ProblemSpec& spec, const Matrix& batch)
{
    if (spec.bc_mode != BcMode::hard_dirichlet) {
        throw ConfigError("dirichlet_loss needs a hard-Dirichlet problem");
    }
    return evaluate(params, layout, spec, batch, nullptr, nullptr);
}

LossBreakdown neumann_loss(const Vector& params, const ParamLayout& layout,
                           const ProblemSpec& spec, const Matrix& batch)
{
    if (spec.bc_mode != BcMode::natural_neumann) {
        throw ConfigError("neumann_loss needs a natural-Neumann problem");
    }
    if (spec.wrap.mode != BoundaryWrap::Mode::bare) {
        throw ConfigError("neumann_loss expects an unwrapped network");
    }
    return evaluate(params, layout, spec, batch, nullptr, nullptr);
}

LossBreakdown penalty_loss(const Vector& params, const ParamLayout& layout,
                           const ProblemSpec& spec, const Matrix& volume_batch,
                           const BoundaryBatch& boundary_batch)
{
    if (spec.bc_mode != BcMode::penalty_neumann) {
        throw ConfigError("penalty_loss needs a penalty-Neumann problem");
    }
    return evaluate(params, layout, spec, volume_batch, &boundary_batch, nullptr);
}

std::pair<LossBreakdown, Vector> loss_and_grad(const Vector& params, const ParamLayout& layout,
                                               const ProblemSpec& spec, const Matrix& volume_batch,
                                               const BoundaryBatch* boundary_batch)
{
    Vector grad;
    const LossBreakdown loss = evaluate(params, layout, spec, volume_batch, boundary_batch, &grad);
    if (!grad.allFinite()) throw NumericError("parameter gradient is non-finite");
    return {loss, std::move(grad)};
}

TapeEvaluator make_tape_evaluator(const ProblemSpec& spec, Matrix volume_batch,
                                  std::optional<BoundaryBatch> boundary_batch)
{
    return [spec, volume_batch = std::move(volume_batch),
            boundary_batch = std::move(boundary_batch)](Tape& tape, const ParamView<Var>& pv) {
        auto make_const = [&tape](double v) {
            if (v == 0.0) return tape.zero();
            if (v == 1.0) return tape.one();
            return tape.constant(v);
        };
        const BoundaryBatch* bnd = boundary_batch ? &*boundary_batch : nullptr;
        const LossParts<Var> parts = loss_generic(pv, spec, volume_batch, bnd, make_const);
        if (spec.bc_mode == BcMode::penalty_neumann) {
            return parts.volume + spec.penalty_beta * parts.penalty;
        }
        return parts.volume;
    };
}

} // namespace qritz
