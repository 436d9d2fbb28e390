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

#include "qritz/network.hpp"

#include "qritz/errors.hpp"
#include "qritz/prng.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace qritz {

std::vector<Dual<double>> seed_point(const Vector& x)
{
    const auto k = static_cast<std::size_t>(x.size());
    std::vector<Dual<double>> duals(k);
    for (std::size_t i = 0; i < k; ++i) {
        duals[i].v = x[static_cast<Index>(i)];
        duals[i].d.assign(k, 0.0);
        duals[i].d[i] = 1.0;
    }
    return duals;
}

static void check_point(const Vector& x, const ParamLayout& layout)
{
    if (x.size() != layout.shape().input_dim) {
        throw ConfigError("point dimension " + std::to_string(x.size())
                          + " does not match network input dimension "
                          + std::to_string(layout.shape().input_dim));
    }
    if (!x.allFinite()) throw NumericError("non-finite input point");
}

std::pair<double, Vector> forward_with_input_grad(const Vector& params,
                                                  const ParamLayout& layout,
                                                  const Vector& x)
{
    layout.check_sized(params.size(), "forward_with_input_grad");
    check_point(x, layout);
    const ParamView<double> pv(params.data(), layout);
    const auto duals = seed_point(x);
    const Dual<double> u = net_dual<double>(pv, duals);
    Vector grad(x.size());
    for (Index k = 0; k < x.size(); ++k) grad[k] = u.d[static_cast<std::size_t>(k)];
    return {u.v, grad};
}

double net_forward(const Vector& params, const ParamLayout& layout, const Vector& x)
{
    layout.check_sized(params.size(), "net_forward");
    check_point(x, layout);
    const ParamView<double> pv(params.data(), layout);
    std::vector<double> xs(x.data(), x.data() + x.size());
    return net_value<double, double>(pv, xs);
}

double wrapped_forward(const Vector& params, const ParamLayout& layout,
                       const BoundaryWrap& wrap, const Vector& x)
{
    const double n = net_forward(params, layout, x);
    if (wrap.mode == BoundaryWrap::Mode::bare) return n;
    const WrapEval w = wrap.eval(x);
    return w.a * n + w.b;
}

std::pair<double, Vector> wrapped_forward_with_input_grad(const Vector& params,
                                                          const ParamLayout& layout,
                                                          const BoundaryWrap& wrap,
                                                          const Vector& x)
{
    auto [n, gn] = forward_with_input_grad(params, layout, x);
    if (wrap.mode == BoundaryWrap::Mode::bare) return {n, std::move(gn)};
    const WrapEval w = wrap.eval(x);
    Vector grad = w.da * n + w.a * gn + w.db;
    return {w.a * n + w.b, std::move(grad)};
}

Vector init_params(const ParamLayout& layout, std::uint64_t seed)
{
    const NetworkShape shape = layout.shape();
    const Index m = shape.width;
    const Index k = shape.input_dim;
    Vector params = Vector::Zero(layout.total());
    CounterRng rng{seed, 0};

    const double lift_sd = std::sqrt(2.0 / static_cast<double>(k + m));
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < k; ++c) params[layout.lift_w(r, c)] = lift_sd * rng.next_normal();

    const double block_sd = std::sqrt(1.0 / static_cast<double>(m));
    for (Index blk = 0; blk < shape.num_blocks; ++blk) {
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c)
                params[layout.block_w1(blk, r, c)] = block_sd * rng.next_normal();
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c)
                params[layout.block_w2(blk, r, c)] = block_sd * rng.next_normal();
    }

    const double head_sd = std::sqrt(2.0 / static_cast<double>(m + 1));
    for (Index r = 0; r < m; ++r) params[layout.head_a(r)] = head_sd * rng.next_normal();
    return params;
}

namespace {

constexpr std::uint8_t kCheckpointVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& in)
{
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void save_params(const std::string& path, const ParamLayout& layout, const Vector& params)
{
    layout.check_sized(params.size(), "save_params");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open checkpoint for writing: " + path);
    out.put(static_cast<char>(kCheckpointVersion));
    write_u32(out, static_cast<std::uint32_t>(layout.shape().input_dim));
    write_u32(out, static_cast<std::uint32_t>(layout.shape().width));
    write_u32(out, static_cast<std::uint32_t>(layout.shape().num_blocks));
    out.write(reinterpret_cast<const char*>(params.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(params.size())));
    if (!out) throw ConfigError("failed writing checkpoint: " + path);
}

std::pair<NetworkShape, Vector> load_params(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    const int version = in.get();
    if (version != kCheckpointVersion) {
        throw ConfigError("unsupported checkpoint version in " + path);
    }
    NetworkShape shape;
    shape.input_dim = static_cast<Index>(read_u32(in));
    shape.width = static_cast<Index>(read_u32(in));
    shape.num_blocks = static_cast<Index>(read_u32(in));
    const ParamLayout layout(shape);
    Vector params(layout.total());
    in.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(params.size())));
    if (!in || in.gcount() != static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(params.size()))) {
        throw ConfigError("checkpoint truncated: " + path);
    }
    return {shape, std::move(params)};
}

} // namespace qritz
