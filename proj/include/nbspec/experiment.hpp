#pragma once

// Seeded ensemble experiments end-to-end: JSON configuration, a trial-parallel
// worker pool over a fixed 64-shard layout (so results are independent of the
// worker count), and CSV/SVG/manifest emission.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nbspec/csv.hpp"
#include "nbspec/graph.hpp"
#include "nbspec/hashimoto.hpp"
#include "nbspec/rmt.hpp"
#include "nbspec/spectral.hpp"
#include "nbspec/statistics.hpp"
#include "nbspec/svg.hpp"
#include "nbspec/version.hpp"

namespace nbspec {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int V = 1000;
    int d = 3;
    long long n_trials = 100;
    int t_max = 0;  // 0 resolves to 2V
    std::vector<int> t_grid;  // empty resolves to 3..t_max
    std::uint64_t base_seed = 1;
    int workers = 0;  // 0 = hardware concurrency
    std::string outputs = "out";
    std::vector<std::string> tasks = {"spacing", "formfactor", "vtm"};
    double hist_ds = 0.1;
    double hist_s_max = 4.0;
    std::vector<int> poisson_ts = {3, 4, 5};
    double quad_tol = 1e-10;
    double tau_min = 1e-4;
    double tau_max = 10.0;
    int tau_points = 200;
};

inline const std::set<std::string>& known_tasks() {
    static const std::set<std::string> k = {"spacing", "formfactor", "vtm", "poisson",
                                            "predictions"};
    return k;
}

// Fill derived defaults and check every invariant; throws ConfigError.
inline void resolve_config(ExperimentConfig& c) {
    if (c.d < 3) throw ConfigError("d must be >= 3");
    if (c.V <= c.d) throw ConfigError("V must exceed d");
    if ((static_cast<long long>(c.V) * c.d) % 2 != 0) throw ConfigError("V*d must be even");
    if (c.n_trials < 1) throw ConfigError("n_trials must be >= 1");
    if (c.workers < 0) throw ConfigError("workers must be >= 0");
    if (c.t_max == 0) c.t_max = 2 * c.V;
    if (c.t_max < 3) throw ConfigError("t_max must be >= 3");
    if (c.hist_ds <= 0 || c.hist_s_max < c.hist_ds)
        throw ConfigError("histogram parameters must satisfy 0 < ds <= s_max");
    if (c.quad_tol < 1e-12) throw ConfigError("quad_tol must be >= 1e-12");
    if (c.tau_points < 1 || c.tau_min <= 0 || c.tau_max < c.tau_min)
        throw ConfigError("tau grid must satisfy 0 < tau_min <= tau_max, points >= 1");
    for (const auto& t : c.tasks)
        if (!known_tasks().count(t)) throw ConfigError("unknown task '" + t + "'");
    if (c.tasks.empty()) throw ConfigError("tasks must not be empty");
    if (c.t_grid.empty())
        for (int t = 3; t <= c.t_max; ++t) c.t_grid.push_back(t);
    for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
        if (c.t_grid[i] < 3 || c.t_grid[i] > c.t_max)
            throw ConfigError("t_grid entries must lie in [3, t_max]");
        if (i > 0 && c.t_grid[i] <= c.t_grid[i - 1])
            throw ConfigError("t_grid must be strictly ascending");
    }
    for (std::size_t i = 0; i < c.poisson_ts.size(); ++i) {
        if (c.poisson_ts[i] < 1) throw ConfigError("poisson_ts entries must be >= 1");
        if (i > 0 && c.poisson_ts[i] <= c.poisson_ts[i - 1])
            throw ConfigError("poisson_ts must be strictly ascending");
    }
    if (std::count(c.tasks.begin(), c.tasks.end(), "poisson") && c.poisson_ts.empty())
        throw ConfigError("poisson task requires a nonempty poisson_ts");
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    return nlohmann::json{{"V", c.V},
                          {"d", c.d},
                          {"n_trials", c.n_trials},
                          {"t_max", c.t_max},
                          {"t_grid", c.t_grid},
                          {"base_seed", c.base_seed},
                          {"workers", c.workers},
                          {"outputs", c.outputs},
                          {"tasks", c.tasks},
                          {"hist_ds", c.hist_ds},
                          {"hist_s_max", c.hist_s_max},
                          {"poisson_ts", c.poisson_ts},
                          {"quad_tol", c.quad_tol},
                          {"tau_min", c.tau_min},
                          {"tau_max", c.tau_max},
                          {"tau_points", c.tau_points}};
}

// Overlay `j` onto defaults (or a partially CLI-filled config); unknown keys
// are config errors so typos never pass silently.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            if (k == "V") c.V = it->get<int>();
            else if (k == "d") c.d = it->get<int>();
            else if (k == "n_trials") c.n_trials = it->get<long long>();
            else if (k == "t_max") c.t_max = it->get<int>();
            else if (k == "t_grid") c.t_grid = it->get<std::vector<int>>();
            else if (k == "base_seed") c.base_seed = it->get<std::uint64_t>();
            else if (k == "workers") c.workers = it->get<int>();
            else if (k == "outputs") c.outputs = it->get<std::string>();
            else if (k == "tasks") c.tasks = it->get<std::vector<std::string>>();
            else if (k == "hist_ds") c.hist_ds = it->get<double>();
            else if (k == "hist_s_max") c.hist_s_max = it->get<double>();
            else if (k == "poisson_ts") c.poisson_ts = it->get<std::vector<int>>();
            else if (k == "quad_tol") c.quad_tol = it->get<double>();
            else if (k == "tau_min") c.tau_min = it->get<double>();
            else if (k == "tau_max") c.tau_max = it->get<double>();
            else if (k == "tau_points") c.tau_points = it->get<int>();
            else throw ConfigError("unknown config key '" + k + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    apply_json(c, j);
    return c;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct ExperimentResult {
    EnsembleAccumulator acc;
    long long n_requested = 0;
    long long n_completed = 0;
    long long n_dropped = 0;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> files;  // name -> path
    double wall_seconds = 0.0;
};

namespace detail {

inline bool has_task(const ExperimentConfig& c, const std::string& t) {
    return std::count(c.tasks.begin(), c.tasks.end(), t) > 0;
}

inline bool needs_spectra(const ExperimentConfig& c) {
    return has_task(c, "spacing") || has_task(c, "formfactor") || has_task(c, "vtm");
}

// Trials are mapped round-robin onto a fixed number of shards and each shard
// is merged in ascending id order, so the float totals do not depend on how
// many workers ran.
inline constexpr int n_shards = 64;

struct ShardOutcome {
    EnsembleAccumulator acc;
    std::vector<std::string> warnings;
    long long dropped = 0;
};

inline void run_shard(const ExperimentConfig& cfg, const AccumulatorMeta& meta, int shard,
                      ShardOutcome& out) {
    out.acc = EnsembleAccumulator(meta);
    const bool spectra = needs_spectra(cfg);
    const bool poisson = has_task(cfg, "poisson");
    for (long long i = shard; i < cfg.n_trials; i += n_shards) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
        try {
            RegularGraph g = generate_regular(cfg.V, cfg.d, seed);
            WalkCounts wc;
            if (poisson) wc = count_periodic_exact(build_hashimoto(g), cfg.poisson_ts.back());
            if (spectra) {
                SpectralData s = split_spectrum(g);
                FluctuationSeries ys = y_series(s, cfg.t_max, cfg.V);
                out.acc.add_trial(s, ys, poisson ? &wc : nullptr);
            } else {
                out.acc.add_counts_trial(wc);
            }
        } catch (const std::exception& e) {
            ++out.dropped;
            out.warnings.push_back("trial " + std::to_string(i) + " (seed " +
                                   std::to_string(seed) + ") dropped: " + e.what());
        }
    }
}

inline std::string blank_or(double x, bool defined) {
    return defined && std::isfinite(x) ? format_cell(x) : std::string();
}

}  // namespace detail

inline CsvTable form_factor_table(const EnsembleAccumulator& acc, const ExperimentConfig& cfg) {
    CsvTable t;
    t.header = {"t",   "tau",        "K_raw", "K_raw_stderr", "K_unfolded", "K_unfolded_stderr",
                "vtm", "vtm_stderr", "F_COE_pred", "K_COE_pred"};
    const bool multi = acc.n_trials() >= 2;
    for (int tt : acc.meta().t_grid) {
        auto raw = acc.raw_form_factor(tt);
        auto unf = acc.unfolded_form_factor(tt);
        std::vector<std::string> row;
        row.push_back(std::to_string(tt));
        row.push_back(format_cell(raw.tau));
        row.push_back(format_cell(raw.value));
        row.push_back(detail::blank_or(raw.stderr_, multi));
        row.push_back(format_cell(unf.value));
        row.push_back(detail::blank_or(unf.stderr_, multi));
        row.push_back(detail::blank_or(multi ? acc.variance_to_mean(tt) : 0.0, multi));
        row.push_back(detail::blank_or(multi ? acc.variance_to_mean_stderr(tt) : 0.0, multi));
        row.push_back(format_cell(f_coe(raw.tau, cfg.d, cfg.quad_tol).f_coe));
        row.push_back(format_cell(k_coe(raw.tau)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline CsvTable spacing_table(const EnsembleAccumulator& acc) {
    const SpacingHistogram h = acc.spacing_histogram();
    CsvTable t;
    t.header = {"s_lo", "s_hi", "density", "wigner_ref"};
    for (std::size_t i = 0; i + 1 < h.bin_edges.size(); ++i) {
        const double lo = h.bin_edges[i], hi = h.bin_edges[i + 1];
        // bin-averaged surmise: exact CDF difference over the bin width
        const double ref = (wigner_surmise_cdf(hi) - wigner_surmise_cdf(lo)) / (hi - lo);
        t.rows.push_back(
            {format_cell(lo), format_cell(hi), format_cell(h.densities[i]), format_cell(ref)});
    }
    return t;
}

inline CsvTable poisson_table(const EnsembleAccumulator& acc) {
    CsvTable t;
    t.header = {"t", "lambda", "mean", "variance", "z_mean", "z_var"};
    const bool multi = acc.n_trials() >= 2;
    for (int tt : acc.meta().poisson_ts) {
        auto r = acc.poisson_check(tt);
        t.rows.push_back({std::to_string(tt), format_cell(r.lambda), format_cell(r.mean),
                          detail::blank_or(r.variance, multi), format_cell(r.z_mean),
                          detail::blank_or(r.z_var, multi)});
    }
    return t;
}

inline CsvTable prediction_table(int d, double tau_min, double tau_max, int points,
                                 double quad_tol = 1e-10) {
    CsvTable t;
    t.header = {"tau", "k_coe", "f_coe", "f_small_tau"};
    for (int i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        const double tau = tau_min * std::pow(tau_max / tau_min, frac);
        t.rows.push_back({format_cell(tau), format_cell(k_coe(tau)),
                          format_cell(f_coe(tau, d, quad_tol).f_coe),
                          format_cell(f_coe_small_tau(tau, d))});
    }
    return t;
}

// --- plots ---------------------------------------------------------------

inline std::string emit_collapse_plot(const std::vector<CsvTable>& tables,
                                      const std::vector<int>& ds);

inline std::string emit_plot(const CsvTable& table, const std::string& kind, int d = 0) {
    if (table.rows.empty()) throw std::invalid_argument("emit_plot: empty table");
    if (kind == "spacing") {
        SvgPlot p("Nearest-spacing distribution", "s", "density");
        p.add_bars(table.numbers("s_lo"), table.numbers("s_hi"), table.numbers("density"),
                   "#4878b0", "ensemble");
        const double smax = table.numbers("s_hi").back();
        std::vector<double> xs, ys;
        for (int i = 0; i <= 400; ++i) {
            const double s = smax * i / 400.0;
            xs.push_back(s);
            ys.push_back(wigner_surmise(s));
        }
        p.add_line(xs, ys, "#c44e52", "Wigner surmise");
        return p.render();
    }
    if (kind == "formfactor") {
        SvgPlot p("Unfolded form factor", "tau", "K(tau)");
        p.add_points(table.numbers("tau"), table.numbers("K_unfolded"), "#4878b0", "K_V");
        const auto taus = table.numbers("tau");
        std::vector<double> xs, ys;
        for (int i = 0; i <= 400; ++i) {
            const double tau = taus.front() + (taus.back() - taus.front()) * i / 400.0;
            if (tau <= 0) continue;
            xs.push_back(tau);
            ys.push_back(k_coe(tau));
        }
        p.add_line(xs, ys, "#c44e52", "K_COE");
        return p.render();
    }
    if (kind == "vtm") {
        SvgPlot p("Variance-to-mean ratio of P_t", "tau", "r(tau)");
        const std::size_t cv = table.column("vtm"), ct = table.column("tau");
        const std::size_t cf = table.column("F_COE_pred");
        std::vector<double> xs, ys, fs;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (table.rows[r][cv].empty()) continue;
            xs.push_back(table.number(r, ct));
            ys.push_back(table.number(r, cv));
            fs.push_back(table.number(r, cf));
        }
        if (xs.empty()) throw std::invalid_argument("emit_plot: vtm column is blank");
        p.add_points(xs, ys, "#4878b0", "ensemble");
        p.add_line(xs, fs, "#c44e52", "F_COE", true);
        return p.render();
    }
    if (kind == "collapse") {
        if (d < 3) throw std::invalid_argument("emit_plot: collapse needs the ensemble degree d");
        return emit_collapse_plot({table}, {d});
    }
    throw std::invalid_argument("emit_plot: unknown kind '" + kind + "'");
}

// Fig.-4 style data collapse: (f_coe - 2 tau) / (2 C(d)) against tau^{3/2},
// one series per degree, log-log.
inline std::string emit_collapse_plot(const std::vector<CsvTable>& tables,
                                      const std::vector<int>& ds) {
    if (tables.empty() || tables.size() != ds.size())
        throw std::invalid_argument("collapse plot: need one table per degree");
    SvgPlot p("Small-tau collapse", "tau", "(F - 2 tau) / (2 C(d))", true, true);
    const char* colors[] = {"#4878b0", "#ee854a", "#6acc64", "#956cb4", "#d65f5f"};
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (tables[i].rows.empty()) throw std::invalid_argument("collapse plot: empty table");
        const double c = c_coefficient(ds[i]);
        if (c == 0.0) throw std::invalid_argument("collapse plot: C(d) vanishes");
        const auto tau = tables[i].numbers("tau");
        const auto f = tables[i].numbers("f_coe");
        std::vector<double> xs, ys;
        for (std::size_t r = 0; r < tau.size(); ++r) {
            const double y = (f[r] - 2.0 * tau[r]) / (2.0 * c);
            if (y > 0.0 && tau[r] > 0.0) {
                xs.push_back(tau[r]);
                ys.push_back(y);
                lo = std::min(lo, tau[r]);
                hi = std::max(hi, tau[r]);
            }
        }
        p.add_line(xs, ys, colors[i % 5], "d = " + std::to_string(ds[i]));
    }
    if (hi > 0.0) {
        std::vector<double> xs, ys;
        for (int i = 0; i <= 200; ++i) {
            const double tau = lo * std::pow(hi / lo, i / 200.0);
            xs.push_back(tau);
            ys.push_back(std::pow(tau, 1.5));
        }
        p.add_line(xs, ys, "#444444", "tau^(3/2)", true);
    }
    return p.render();
}

// --- the run operation ---------------------------------------------------

inline ExperimentResult run_experiment(ExperimentConfig cfg) {
    resolve_config(cfg);
    const auto start = std::chrono::steady_clock::now();

    AccumulatorMeta meta;
    meta.V = cfg.V;
    meta.d = cfg.d;
    meta.t_max = cfg.t_max;
    meta.ds = cfg.hist_ds;
    meta.s_max = cfg.hist_s_max;
    if (detail::needs_spectra(cfg)) meta.t_grid = cfg.t_grid;
    if (detail::has_task(cfg, "poisson")) meta.poisson_ts = cfg.poisson_ts;

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int workers =
        std::max(1, std::min<int>(cfg.workers == 0 ? std::max(1, hw) : cfg.workers,
                                  detail::n_shards));

    std::vector<detail::ShardOutcome> shards(detail::n_shards);
    const bool needs_trials = detail::needs_spectra(cfg) || detail::has_task(cfg, "poisson");
    if (needs_trials) {
        std::atomic<int> next{0};
        auto work = [&] {
            for (int k = next.fetch_add(1); k < detail::n_shards; k = next.fetch_add(1))
                detail::run_shard(cfg, meta, k, shards[k]);
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
    }

    ExperimentResult res;
    res.acc = EnsembleAccumulator(meta);
    res.n_requested = needs_trials ? cfg.n_trials : 0;
    for (int k = 0; k < detail::n_shards; ++k) {  // ascending shard id: fixed merge order
        if (needs_trials) res.acc.merge_in(shards[k].acc);
        res.n_dropped += shards[k].dropped;
        for (auto& w : shards[k].warnings) res.warnings.push_back(std::move(w));
    }
    res.n_completed = res.acc.n_trials();
    if (needs_trials && res.n_completed == 0)
        throw std::runtime_error("all " + std::to_string(cfg.n_trials) + " trials failed; first: " +
                                 (res.warnings.empty() ? "?" : res.warnings.front()));

    namespace fs = std::filesystem;
    fs::create_directories(cfg.outputs);
    nlohmann::json file_listing = nlohmann::json::object();
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(cfg.outputs) / name).string();
        write_file(path, content);
        char hash[24];
        std::snprintf(hash, sizeof hash, "0x%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        file_listing[name] = {{"path", path}, {"bytes", content.size()}, {"fnv1a64", hash}};
        res.files.emplace_back(name, path);
    };

    if (detail::has_task(cfg, "formfactor") || detail::has_task(cfg, "vtm")) {
        const CsvTable t = form_factor_table(res.acc, cfg);
        emit("form_factor.csv", to_csv(t));
        if (detail::has_task(cfg, "formfactor")) emit("form_factor.svg", emit_plot(t, "formfactor"));
        if (detail::has_task(cfg, "vtm") && res.n_completed >= 2)
            emit("vtm.svg", emit_plot(t, "vtm"));
    }
    if (detail::has_task(cfg, "spacing")) {
        const CsvTable t = spacing_table(res.acc);
        emit("spacing.csv", to_csv(t));
        emit("spacing.svg", emit_plot(t, "spacing"));
    }
    if (detail::has_task(cfg, "poisson")) emit("poisson.csv", to_csv(poisson_table(res.acc)));
    if (detail::has_task(cfg, "predictions"))
        emit("predictions.csv",
             to_csv(prediction_table(cfg.d, cfg.tau_min, cfg.tau_max, cfg.tau_points,
                                     cfg.quad_tol)));

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["trial_seed_rule"] = "trial i uses seed base_seed + i";
    manifest["version"] = version;
    manifest["n_requested"] = res.n_requested;
    manifest["n_completed"] = res.n_completed;
    manifest["n_dropped"] = res.n_dropped;
    nlohmann::json warn = nlohmann::json::array();
    for (std::size_t i = 0; i < res.warnings.size() && i < 20; ++i) warn.push_back(res.warnings[i]);
    manifest["warnings"] = warn;
    manifest["wall_seconds"] = res.wall_seconds;
    manifest["files"] = file_listing;
    {
        const std::string path = (fs::path(cfg.outputs) / "manifest.json").string();
        write_file(path, manifest.dump(2) + "\n");
        res.files.emplace_back("manifest.json", path);
    }
    return res;
}

}  // namespace nbspec
