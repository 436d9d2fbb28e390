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

#include "qritz/errors.hpp"
#include "qritz/gapsim.hpp"
#include "qritz/harness.hpp"
#include "qritz/pointset.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

void apply_overrides(qritz::RunConfig& cfg, const std::vector<std::string>& sets)
{
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw qritz::ConfigError("--set expects key=value: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
}

std::vector<double> parse_list(const std::string& csv)
{
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw qritz::ConfigError("empty list: " + csv);
    return out;
}

int run(int argc, char** argv)
{
    CLI::App app{"Deep Ritz solver with Monte Carlo and quasi-Monte Carlo sampling"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train one configuration");
    std::string train_config;
    std::vector<std::string> train_sets;
    std::string train_out;
    train_cmd->add_option("config", train_config, "flat key=value config file")->required();
    train_cmd->add_option("--set", train_sets, "override, key=value (repeatable)");
    train_cmd->add_option("--out", train_out, "output directory override");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "join finished runs into a table");
    std::vector<std::string> metas;
    std::string compare_out = "comparison.csv";
    compare_cmd->add_option("metas", metas, "run meta CSV files")->required();
    compare_cmd->add_option("--out", compare_out, "comparison CSV path");

    // gapsim
    auto* gap_cmd = app.add_subcommand("gapsim", "optimality-gap simulation grid");
    std::string gap_alphas = "0.05,0.1";
    std::string gap_ns = "100,1000,10000";
    std::string gap_laws = "mc,qmc";
    std::string gap_out = "gapsim.csv";
    long long gap_replicas = 1000;
    long long gap_iters = 1000;
    double gap_cv = 1.0;
    int gap_k = 2;
    double gap_curvature = 0.0; // 0 = tight stepsize choice per cell
    std::uint64_t gap_seed = 1;
    gap_cmd->add_option("--alphas", gap_alphas, "comma list of stepsizes");
    gap_cmd->add_option("--ns", gap_ns, "comma list of mini-batch sizes");
    gap_cmd->add_option("--laws", gap_laws, "comma list of variance laws: mc,qmc,constant");
    gap_cmd->add_option("--replicas", gap_replicas, "independent replicas per cell");
    gap_cmd->add_option("--iters", gap_iters, "iterations per replica");
    gap_cmd->add_option("--cv", gap_cv, "noise constant C_V");
    gap_cmd->add_option("--k", gap_k, "dimension exponent of the qmc law");
    gap_cmd->add_option("--curvature", gap_curvature,
                        "quadratic curvature c = L (default: 1/(alpha (1+r)), the largest "
                        "curvature admitting the stepsize)");
    gap_cmd->add_option("--seed", gap_seed, "master seed");
    gap_cmd->add_option("--out", gap_out, "output CSV path");

    // discrepancy
    auto* disc_cmd = app.add_subcommand("discrepancy", "L2-star discrepancy of a point set");
    std::string disc_kind = "sobol";
    long long disc_n = 1024;
    long long disc_k = 2;
    std::uint64_t disc_seed = 1;
    disc_cmd->add_option("--kind", disc_kind, "sobol or mc")->required();
    disc_cmd->add_option("--n", disc_n, "number of points")->required();
    disc_cmd->add_option("--k", disc_k, "dimension")->required();
    disc_cmd->add_option("--seed", disc_seed, "seed (mc only)");

    CLI11_PARSE(app, argc, argv);

    if (*train_cmd) {
        qritz::RunConfig cfg = qritz::RunConfig::from_file(train_config);
        apply_overrides(cfg, train_sets);
        if (!train_out.empty()) cfg.out_dir = train_out;
        const qritz::RunRecord rec = qritz::train(cfg);
        std::printf("run %s: final windowed error %.6g (%.1f s)\n", cfg.stem.c_str(),
                    rec.final_windowed, rec.wall_seconds);
        std::printf("wrote %s\n", rec.meta_path.c_str());
        return 0;
    }

    if (*compare_cmd) {
        const auto rows = qritz::compare(metas);
        std::ofstream out(compare_out, std::ios::trunc);
        if (!out) throw qritz::ConfigError("cannot open " + compare_out);
        out << qritz::compare_to_csv(rows);
        std::ofstream plot(compare_out + ".plot.csv", std::ios::trunc);
        plot << qritz::compare_plot_data(rows);
        std::printf("wrote %s (%zu rows)\n", compare_out.c_str(), rows.size());
        return 0;
    }

    if (*gap_cmd) {
        std::vector<qritz::GapRow> rows;
        std::stringstream laws(gap_laws);
        std::string law_name;
        while (std::getline(laws, law_name, ',')) {
            const auto law = qritz::NoisyGradientModel::parse_law(law_name);
            for (double alpha : parse_list(gap_alphas)) {
                for (double n : parse_list(gap_ns)) {
                    qritz::GapConfig cell;
                    cell.noise.law = law;
                    cell.noise.c_v = gap_cv;
                    cell.noise.k_exponent = gap_k;
                    cell.alpha = alpha;
                    cell.n = n;
                    cell.iters = gap_iters;
                    cell.replicas = gap_replicas;
                    cell.seed = gap_seed;
                    const double r = cell.noise.r_of(n);
                    cell.problem.curvature = gap_curvature > 0.0
                                                 ? gap_curvature
                                                 : 1.0 / (alpha * (1.0 + r));
                    qritz::GapRow row;
                    row.n = n;
                    row.alpha = alpha;
                    row.r_law = law_name;
                    row.predicted = qritz::predicted_gap(cell.problem, cell.noise.mu, alpha,
                                                         gap_cv, r);
                    row.measured = qritz::simulate_gap(cell);
                    row.relative_deviation = row.measured / row.predicted - 1.0;
                    rows.push_back(row);
                }
            }
        }
        std::ofstream out(gap_out, std::ios::trunc);
        if (!out) throw qritz::ConfigError("cannot open " + gap_out);
        out << qritz::gap_rows_to_csv(rows);
        std::printf("wrote %s (%zu cells)\n", gap_out.c_str(), rows.size());
        return 0;
    }

    if (*disc_cmd) {
        qritz::PointSet ps;
        if (disc_kind == "sobol") {
            qritz::SobolSequence seq(disc_k, qritz::DirectionTable::load_default());
            ps = qritz::sobol_points(seq, disc_n);
        } else if (disc_kind == "mc") {
            qritz::CounterRng rng{disc_seed, 0};
            ps = qritz::mc_points(rng, disc_n, disc_k);
        } else {
            throw qritz::ConfigError("kind must be sobol or mc");
        }
        std::printf("kind=%s n=%lld k=%lld t=%.12g\n", disc_kind.c_str(), disc_n, disc_k,
                    qritz::l2_star_discrepancy(ps));
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const qritz::NumericError& err) {
        std::cerr << "numeric failure: " << err.what() << "\n";
        return 2;
    } catch (const qritz::ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
