// Command-line front end: generate graphs, count walks, inspect spectra, run
// seeded ensemble experiments, evaluate RMT predictions, and render plots.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nbspec/csv.hpp"
#include "nbspec/experiment.hpp"
#include "nbspec/graph.hpp"
#include "nbspec/hashimoto.hpp"
#include "nbspec/rmt.hpp"
#include "nbspec/spectral.hpp"
#include "nbspec/version.hpp"

namespace {

void write_out(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        nbspec::write_file(out_path, content);
}

nbspec::RegularGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nbspec::ConfigError("cannot open graph file " + path);
    return nbspec::load_graph(in);
}

nbspec::CsvTable load_csv_file(const std::string& path) {
    if (!std::ifstream(path)) throw nbspec::ConfigError("cannot open csv file " + path);
    return nbspec::load_csv(path);
}

int cmd_generate(int V, int d, std::uint64_t seed, const std::string& out) {
    auto g = nbspec::generate_regular(V, d, seed);
    write_out(out, nbspec::serialize_graph(g));
    return 0;
}

int cmd_walks(const std::string& graph_path, int t_max, bool oracle, const std::string& out) {
    auto g = load_graph_file(graph_path);
    auto wc = nbspec::count_periodic_exact(nbspec::build_hashimoto(g), t_max);
    if (oracle) {
        for (int t = 1; t <= t_max; ++t) {
            const auto ref = nbspec::brute_force_count(g, t);
            if (!(wc.P[t] == nbspec::BigUInt(ref)))
                throw std::runtime_error("oracle mismatch at t = " + std::to_string(t) +
                                         ": counted " + wc.P[t].to_string() + ", oracle " +
                                         std::to_string(ref));
        }
        std::cerr << "oracle agreement for t = 1.." << t_max << "\n";
    }
    nbspec::CsvTable tbl;
    tbl.header = {"t", "P_t", "C_t"};
    for (int t = 1; t <= t_max; ++t)
        tbl.rows.push_back({std::to_string(t), wc.P[t].to_string(), nbspec::format_cell(wc.C[t])});
    write_out(out, nbspec::to_csv(tbl));
    return 0;
}

int cmd_spectrum(const std::string& graph_path, const std::string& out) {
    auto g = load_graph_file(graph_path);
    auto s = nbspec::split_spectrum(g);
    const int V = s.V();
    const int V_eff = V - 1 - s.r_c;
    const double band = 2.0 * std::sqrt(s.d - 1.0);

    nbspec::CsvTable tbl;
    tbl.header = {"k", "mu_k", "class", "phi_k", "psi_k", "theta_k"};
    for (int k = 0; k < V; ++k) {
        const double mu = s.mu[k];
        std::string cls, phi, psi, theta;
        if (k == V - 1) {
            cls = "trivial";
        } else if (std::abs(mu) <= band + nbspec::band_edge_tol) {
            cls = "R";
            const double ph = std::acos(std::clamp(mu / band, -1.0, 1.0));
            phi = nbspec::format_cell(ph);
            theta = nbspec::format_cell((2.0 * std::numbers::pi / V_eff) *
                                        nbspec::counting_function(ph, s.d, double(V_eff)));
        } else {
            cls = "Rc";
            psi = nbspec::format_cell(std::acosh(std::abs(mu) / band));
        }
        tbl.rows.push_back({std::to_string(k), nbspec::format_cell(mu), cls, phi, psi, theta});
    }
    write_out(out, nbspec::to_csv(tbl));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-backtracking walk statistics on random regular graphs"};
    app.set_version_flag("--version", std::string("nbspec ") + nbspec::version);
    app.require_subcommand(1);

    // --- generate ---
    auto* gen = app.add_subcommand("generate", "sample a random d-regular graph");
    int gen_V = 100, gen_d = 3;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--V", gen_V, "number of vertices");
    gen->add_option("--d", gen_d, "degree");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // --- walks ---
    auto* walks = app.add_subcommand("walks", "count non-backtracking periodic walks");
    std::string walks_graph, walks_out;
    int walks_tmax = 12;
    bool walks_oracle = false;
    walks->add_option("--graph", walks_graph, "graph file")->required();
    walks->add_option("--tmax", walks_tmax, "maximum period");
    walks->add_flag("--oracle", walks_oracle, "cross-check against the brute-force oracle");
    walks->add_option("--out", walks_out, "output file (default stdout)");

    // --- spectrum ---
    auto* spec = app.add_subcommand("spectrum", "adjacency spectrum, classification, unfolding");
    std::string spec_graph, spec_out;
    spec->add_option("--graph", spec_graph, "graph file")->required();
    spec->add_option("--out", spec_out, "output file (default stdout)");

    // --- run ---
    auto* run = app.add_subcommand("run", "run a seeded ensemble experiment");
    std::string run_config;
    nbspec::ExperimentConfig defaults;
    int run_V = -1, run_d = -1, run_tmax = -1, run_workers = -1;
    long long run_trials = -1;
    std::int64_t run_seed = -1;
    std::string run_out, run_tasks;
    run->add_option("--config", run_config, "JSON config file");
    run->add_option("--V", run_V, "override: vertices");
    run->add_option("--d", run_d, "override: degree");
    run->add_option("--trials", run_trials, "override: number of trials");
    run->add_option("--tmax", run_tmax, "override: maximum period");
    run->add_option("--seed", run_seed, "override: base seed");
    run->add_option("--workers", run_workers, "override: worker threads (0 = auto)");
    run->add_option("--out", run_out, "override: output directory");
    run->add_option("--tasks", run_tasks, "override: comma-separated task list");

    // --- predict ---
    auto* pred = app.add_subcommand("predict", "evaluate RMT predictions on a tau grid");
    int pred_d = 10, pred_points = 200;
    double pred_tmin = 1e-4, pred_tmax = 10.0, pred_tol = 1e-10;
    std::string pred_out;
    pred->add_option("--d", pred_d, "degree")->required();
    pred->add_option("--tau-min", pred_tmin, "grid start");
    pred->add_option("--tau-max", pred_tmax, "grid end");
    pred->add_option("--points", pred_points, "grid size (log-spaced)");
    pred->add_option("--tol", pred_tol, "quadrature tolerance");
    pred->add_option("--out", pred_out, "output file (default stdout)");

    // --- plot ---
    auto* plot = app.add_subcommand("plot", "render a CSV table to SVG");
    std::vector<std::string> plot_csvs;
    std::vector<int> plot_ds;
    std::string plot_kind, plot_out;
    plot->add_option("--csv", plot_csvs, "input CSV (repeat for collapse overlays)")->required();
    plot->add_option("--kind", plot_kind, "spacing | formfactor | vtm | collapse")->required();
    plot->add_option("--d", plot_ds, "degree per CSV (collapse only)");
    plot->add_option("--out", plot_out, "output SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit cleanly; usage errors are config errors
    }

    try {
        if (*gen) return cmd_generate(gen_V, gen_d, gen_seed, gen_out);
        if (*walks) return cmd_walks(walks_graph, walks_tmax, walks_oracle, walks_out);
        if (*spec) return cmd_spectrum(spec_graph, spec_out);
        if (*pred) {
            if (pred_points < 1 || pred_tmin <= 0 || pred_tmax < pred_tmin)
                throw nbspec::ConfigError("invalid tau grid");
            write_out(pred_out, nbspec::to_csv(nbspec::prediction_table(
                                    pred_d, pred_tmin, pred_tmax, pred_points, pred_tol)));
            return 0;
        }
        if (*run) {
            nbspec::ExperimentConfig cfg;
            if (!run_config.empty()) cfg = nbspec::load_config(run_config);
            if (run_V >= 0) cfg.V = run_V;
            if (run_d >= 0) cfg.d = run_d;
            if (run_trials >= 0) cfg.n_trials = run_trials;
            if (run_tmax >= 0) cfg.t_max = run_tmax;
            if (run_seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(run_seed);
            if (run_workers >= 0) cfg.workers = run_workers;
            if (!run_out.empty()) cfg.outputs = run_out;
            if (!run_tasks.empty()) {
                cfg.tasks.clear();
                std::stringstream ss(run_tasks);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) cfg.tasks.push_back(item);
            }
            auto res = nbspec::run_experiment(cfg);
            std::cerr << "completed " << res.n_completed << "/" << res.n_requested << " trials";
            if (res.n_dropped > 0) std::cerr << " (" << res.n_dropped << " dropped)";
            std::cerr << " in " << nbspec::format_cell(res.wall_seconds) << " s\n";
            for (std::size_t i = 0; i < res.warnings.size() && i < 5; ++i)
                std::cerr << "warning: " << res.warnings[i] << "\n";
            for (const auto& [name, path] : res.files) std::cerr << "wrote " << path << "\n";
            return 0;
        }
        if (*plot) {
            if (plot_kind == "collapse") {
                if (plot_ds.size() != plot_csvs.size())
                    throw nbspec::ConfigError("collapse: pass one --d per --csv");
                std::vector<nbspec::CsvTable> tables;
                for (const auto& p : plot_csvs) tables.push_back(load_csv_file(p));
                nbspec::write_file(plot_out, nbspec::emit_collapse_plot(tables, plot_ds));
            } else {
                if (plot_csvs.size() != 1)
                    throw nbspec::ConfigError("kind '" + plot_kind + "' takes exactly one --csv");
                nbspec::write_file(plot_out,
                                   nbspec::emit_plot(load_csv_file(plot_csvs[0]), plot_kind));
            }
            return 0;
        }
    } catch (const nbspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nbspec::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nbspec::BudgetError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
