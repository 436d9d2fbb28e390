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

#include "qritz/harness.hpp"

#include "qritz/errors.hpp"
#include "qritz/network.hpp"
#include "qritz/optimizer.hpp"
#include "qritz/problems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qritz {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_g17(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Index parse_index(const std::string& v, const std::string& key)
{
    try {
        return static_cast<Index>(std::stoll(v));
    } catch (...) {
        throw ConfigError("config key " + key + " needs an integer, got: " + v);
    }
}

double parse_double(const std::string& v, const std::string& key)
{
    try {
        return std::stod(v);
    } catch (...) {
        throw ConfigError("config key " + key + " needs a number, got: " + v);
    }
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
    if (!out) throw ConfigError("failed writing: " + path);
}

} // namespace

RunConfig RunConfig::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value, got: " + line);
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    if (key == "problem") problem = value;
    else if (key == "blocks") blocks = parse_index(value, key);
    else if (key == "width") width = parse_index(value, key);
    else if (key == "sampler") sampler = value;
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_index(value, key));
    else if (key == "sobol_offset") sobol_offset = static_cast<std::uint64_t>(parse_index(value, key));
    else if (key == "sampler_fixed") sampler_fixed = (value == "true" || value == "1");
    else if (key == "batch") batch = parse_index(value, key);
    else if (key == "batch_boundary") batch_boundary = parse_index(value, key);
    else if (key == "optimizer") optimizer = value;
    else if (key == "alpha") alpha = parse_double(value, key);
    else if (key == "beta1") beta1 = parse_double(value, key);
    else if (key == "beta2") beta2 = parse_double(value, key);
    else if (key == "eps") eps = parse_double(value, key);
    else if (key == "iterations") iterations = parse_index(value, key);
    else if (key == "eval_every") eval_every = parse_index(value, key);
    else if (key == "eval_points") eval_points = parse_index(value, key);
    else if (key == "window_iters") window_iters = parse_index(value, key);
    else if (key == "penalty_beta") penalty_beta = parse_double(value, key);
    else if (key == "out_dir") out_dir = value;
    else if (key == "stem") stem = value;
    else throw ConfigError("unknown config key: " + key);
}

std::map<std::string, std::string> RunConfig::echo() const
{
    return {
        {"alpha", format_g17(alpha)},
        {"batch", std::to_string(batch)},
        {"batch_boundary", std::to_string(batch_boundary)},
        {"beta1", format_g17(beta1)},
        {"beta2", format_g17(beta2)},
        {"blocks", std::to_string(blocks)},
        {"eps", format_g17(eps)},
        {"eval_every", std::to_string(eval_every)},
        {"eval_points", std::to_string(eval_points)},
        {"iterations", std::to_string(iterations)},
        {"optimizer", optimizer},
        {"penalty_beta", format_g17(penalty_beta)},
        {"problem", problem},
        {"sampler", sampler},
        {"sampler_fixed", sampler_fixed ? "true" : "false"},
        {"seed", std::to_string(seed)},
        {"sobol_offset", std::to_string(sobol_offset)},
        {"width", std::to_string(width)},
        {"window_iters", std::to_string(window_iters)},
    };
}

void RunConfig::validate() const
{
    if (batch < 1) throw ConfigError("batch size must be >= 1");
    if (batch_boundary < 1) throw ConfigError("boundary batch size must be >= 1");
    if (blocks < 0 || width < 1) throw ConfigError("invalid network shape");
    if (sampler != "sobol" && sampler != "mc") throw ConfigError("sampler must be sobol or mc");
    if (optimizer != "adam" && optimizer != "sgd") throw ConfigError("optimizer must be adam or sgd");
    if (iterations < 0) throw ConfigError("iterations must be >= 0");
    if (eval_every < 0) throw ConfigError("eval_every must be >= 0");
    if (eval_points < 1) throw ConfigError("eval_points must be >= 1");
    if (window_iters < 1) throw ConfigError("window_iters must be >= 1");
}

namespace {

std::string loss_to_csv(const std::vector<double>& loss)
{
    std::string out = "iteration,loss\n";
    for (std::size_t i = 0; i < loss.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_g17(loss[i]) + "\n";
    }
    return out;
}

std::string meta_to_csv(const RunRecord& rec)
{
    std::string out = "key,value\n";
    for (const auto& [k, v] : rec.config.echo()) out += k + "," + v + "\n";
    out += "complete," + std::string(rec.complete ? "true" : "false") + "\n";
    out += "final_windowed_error," + format_g17(rec.final_windowed) + "\n";
    out += "final_windowed_error_2x_grid," + format_g17(rec.final_windowed_2x) + "\n";
    out += "version," + std::string(rec.version) + "\n";
    return out;
}

} // namespace

std::string training_plot_data(const ErrorSeries& series)
{
    std::string out = "iteration,ln_error\n";
    for (std::size_t i = 0; i < series.iteration.size(); ++i) {
        out += std::to_string(series.iteration[i]) + ","
               + format_g17(std::log(series.windowed[i])) + "\n";
    }
    return out;
}

void write_record(RunRecord& rec, const Vector* params)
{
    namespace fs = std::filesystem;
    fs::create_directories(rec.config.out_dir);
    const std::string base = (fs::path(rec.config.out_dir) / rec.config.stem).string();
    rec.errors_path = base + "_errors.csv";
    rec.loss_path = base + "_loss.csv";
    rec.plot_path = base + "_plot.csv";
    rec.meta_path = base + "_meta.csv";
    write_file(rec.errors_path, rec.errors.to_csv());
    write_file(rec.loss_path, loss_to_csv(rec.loss_series));
    write_file(rec.plot_path, training_plot_data(rec.errors));
    write_file(rec.meta_path, meta_to_csv(rec));
    // wall clock is intentionally outside the CSVs so that re-running a
    // config reproduces them byte for byte
    write_file(base + "_timing.txt", format_g17(rec.wall_seconds) + " seconds\n");
    if (params != nullptr) {
        rec.params_path = base + "_params.bin";
        const ParamLayout layout(
            NetworkShape{make_problem(rec.config.problem).box.dim(), rec.config.width,
                         rec.config.blocks});
        save_params(rec.params_path, layout, *params);
    }
}

RunRecord train(const RunConfig& config)
{
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const ProblemSpec spec = make_problem(config.problem, config.penalty_beta);
    const Index k = spec.box.dim();
    const ParamLayout layout(NetworkShape{k, config.width, config.blocks});
    const auto table = DirectionTable::load_default();

    RunRecord rec;
    rec.config = config;

    Vector params = init_params(layout, config.seed);

    const bool qmc = config.sampler == "sobol";
    const bool penalty = spec.bc_mode == BcMode::penalty_neumann;

    SobolSequence vol_sobol(k, table);
    CounterRng vol_rng{derive_seed(config.seed, 1), 0};
    if (qmc) {
        const std::uint64_t last =
            config.sobol_offset + static_cast<std::uint64_t>(config.iterations)
                                      * static_cast<std::uint64_t>(config.batch);
        if (last >= kEvalGridIndexBase) {
            throw ConfigError("Sobol training stream would reach the evaluation grid range");
        }
        vol_sobol.seek(config.sobol_offset);
    }

    BoundarySampler boundary(spec.box, qmc ? SampleStrategy::qmc : SampleStrategy::mc,
                             derive_seed(config.seed, 2), table);

    EvalGrid grid;
    EvalGrid grid2x;
    if (config.eval_every > 0) {
        grid = make_eval_grid(spec, config.eval_points, table);
        grid2x = make_eval_grid(spec, 2 * config.eval_points, table);
    }

    AdamState adam(layout.total(), AdamConfig{config.alpha, config.beta1, config.beta2, config.eps});
    const SgdConfig sgd{config.alpha};

    auto evaluate_error = [&](std::int64_t iter) {
        const double err = relative_l2_error(params, layout, spec, grid);
        rec.errors.push(iter, err, config.window_iters);
    };

    Matrix fixed_volume;
    BoundaryBatch fixed_boundary;
    if (config.sampler_fixed) {
        fixed_volume = qmc ? map_to_box(sobol_points(vol_sobol, config.batch), spec.box).pts
                           : map_to_box(mc_points(vol_rng, config.batch, k), spec.box).pts;
        if (penalty) fixed_boundary = boundary.next(config.batch_boundary);
    }

    if (config.eval_every > 0) evaluate_error(0);

    try {
        for (Index it = 1; it <= config.iterations; ++it) {
            Matrix volume;
            BoundaryBatch bnd;
            if (config.sampler_fixed) {
                volume = fixed_volume;
                if (penalty) bnd = fixed_boundary;
            } else {
                volume = qmc ? map_to_box(sobol_points(vol_sobol, config.batch), spec.box).pts
                             : map_to_box(mc_points(vol_rng, config.batch, k), spec.box).pts;
                if (penalty) bnd = boundary.next(config.batch_boundary);
            }

            auto [loss, grad] =
                loss_and_grad(params, layout, spec, volume, penalty ? &bnd : nullptr);
            rec.loss_series.push_back(loss.total);

            params = config.optimizer == "adam" ? adam_step(params, grad, adam)
                                                : sgd_step(params, grad, sgd);

            if (config.eval_every > 0 && it % config.eval_every == 0) evaluate_error(it);
        }
    } catch (const NumericError& err) {
        rec.complete = false;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_record(rec, &params);
        throw NumericError(std::string(err.what()) + " (iteration "
                           + std::to_string(rec.loss_series.size() + 1) + ")");
    }

    rec.complete = true;
    if (!rec.errors.windowed.empty()) {
        rec.final_windowed = rec.errors.windowed.back();
        rec.final_windowed_2x = relative_l2_error(params, layout, spec, grid2x);
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_record(rec, &params);
    return rec;
}

std::map<std::string, std::string> read_meta(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open meta file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("malformed meta row: " + line);
        kv[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return kv;
}

std::vector<CompareRow> compare(const std::vector<std::string>& meta_paths)
{
    if (meta_paths.empty()) throw ConfigError("compare needs at least one run");

    struct Cell {
        std::vector<double> finals;
    };
    std::map<std::pair<std::string, double>, Cell> cells; // (sampler, batch)
    std::string problem;
    for (const auto& path : meta_paths) {
        const auto kv = read_meta(path);
        const std::string prob = kv.at("problem");
        if (problem.empty()) problem = prob;
        if (prob != problem) {
            throw ConfigError("compare expects runs of one problem, got " + problem + " and "
                              + prob);
        }
        const double final_err = std::stod(kv.at("final_windowed_error"));
        const double batch = std::stod(kv.at("batch"));
        cells[{kv.at("sampler"), batch}].finals.push_back(final_err);
    }
    const Index dimension = make_problem(problem).box.dim();

    std::vector<CompareRow> rows;
    std::string prev_sampler;
    double prev_batch = 0.0;
    double prev_mean = 0.0;
    for (const auto& [key, cell] : cells) {
        CompareRow row;
        row.problem = problem;
        row.dimension = dimension;
        row.sampler = key.first;
        row.batch = key.second;
        row.seeds = static_cast<int>(cell.finals.size());
        row.error_min = *std::min_element(cell.finals.begin(), cell.finals.end());
        row.error_max = *std::max_element(cell.finals.begin(), cell.finals.end());
        row.error_mean = 0.0;
        for (double e : cell.finals) row.error_mean += e;
        row.error_mean /= static_cast<double>(cell.finals.size());
        if (key.first == prev_sampler && row.error_mean > 0.0 && prev_mean > 0.0
            && key.second > prev_batch) {
            row.pairwise = pairwise_order(prev_mean, row.error_mean, key.second / prev_batch);
        }
        prev_sampler = key.first;
        prev_batch = key.second;
        prev_mean = row.error_mean;
        rows.push_back(row);
    }

    // fitted order per sampler group
    std::map<std::string, std::vector<std::pair<double, double>>> groups;
    for (const auto& row : rows) groups[row.sampler].push_back({row.batch, row.error_mean});
    for (auto& row : rows) {
        const auto& pts = groups[row.sampler];
        if (pts.size() >= 2) row.fitted = fit_order(pts);
    }
    return rows;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows)
{
    std::string out =
        "problem,dimension,sampler,batch,seeds,error_mean,error_min,error_max,pairwise_order,"
        "fitted_order\n";
    for (const auto& r : rows) {
        out += r.problem + "," + std::to_string(r.dimension) + "," + r.sampler + ","
               + format_g17(r.batch) + "," + std::to_string(r.seeds) + ","
               + format_g17(r.error_mean) + "," + format_g17(r.error_min) + ","
               + format_g17(r.error_max) + ","
               + (std::isnan(r.pairwise) ? "" : format_g17(r.pairwise)) + ","
               + (std::isnan(r.fitted) ? "" : format_g17(r.fitted)) + "\n";
    }
    return out;
}

std::string compare_plot_data(const std::vector<CompareRow>& rows)
{
    std::string out = "label,ln_n,ln_error\n";
    for (const auto& r : rows) {
        if (!(r.error_mean > 0.0)) continue;
        out += r.sampler + "," + format_g17(std::log(r.batch)) + ","
               + format_g17(std::log(r.error_mean)) + "\n";
    }
    return out;
}

} // namespace qritz
