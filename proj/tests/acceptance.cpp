// Acceptance gate: ten ensemble-level criteria, printed one line each.
// Exit code 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nbspec/experiment.hpp"
#include "nbspec/graph.hpp"
#include "nbspec/hashimoto.hpp"
#include "nbspec/quadrature.hpp"
#include "nbspec/rmt.hpp"
#include "nbspec/spectral.hpp"
#include "nbspec/statistics.hpp"

using namespace nbspec;
namespace fs = std::filesystem;

namespace {

int n_pass = 0, n_fail = 0;

void report(int num, bool pass, const std::string& name, const std::string& detail,
            double seconds) {
    std::printf("[%2d] %s  %-34s %s (%.1f s)\n", num, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    (pass ? n_pass : n_fail)++;
}

void criterion(int num, const std::string& name, std::function<std::pair<bool, std::string>()> fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = fn();
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    report(num, pass, name, detail,
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

RegularGraph petersen() {
    return load_graph(std::string("10 3\n0 1\n0 4\n0 5\n1 2\n1 6\n2 3\n2 7\n3 4\n3 8\n4 9\n"
                                  "5 7\n5 8\n6 8\n6 9\n7 9\n"));
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 1. Exact-count oracle suite on K4 and Petersen.
std::pair<bool, std::string> c1() {
    auto k4 = generate_regular(4, 3, 1);
    auto pet = petersen();
    double worst_rel = 0.0;
    bool ok = true;
    for (const auto* g : {&k4, &pet}) {
        auto wc = count_periodic_exact(build_hashimoto(*g), 8);
        auto s = split_spectrum(*g);
        for (int t = 1; t <= 8; ++t) {
            ok = ok && wc.P[t] == BigUInt(brute_force_count(*g, t));
            const double tr = trace_power_spectral(s, t, g->V, g->V * g->d / 2, g->d);
            const double p = wc.P[t].to_double();
            worst_rel = std::max(worst_rel, std::abs(tr - p) / std::max(p, 1.0));
        }
        ok = ok && wc.P[3] == BigUInt(g->V == 4 ? 24u : 0u) &&
             wc.P[4] == BigUInt(g->V == 4 ? 24u : 0u);
        if (g->V == 10) ok = ok && wc.P[5] == BigUInt(120u);
    }
    ok = ok && worst_rel < 1e-8;
    return {ok, fmt("fixed counts exact; spectral trace rel err %.1e (< 1e-8)", worst_rel)};
}

// 2. Bass identity residual on 20 random graphs.
std::pair<bool, std::string> c2() {
    const int Vs[] = {12, 16, 20, 24, 30, 14, 18, 22, 26, 28, 12, 18, 24, 30, 16, 12, 16, 20, 24, 30};
    const int ds[] = {3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4, 5, 5, 5, 5, 5};
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        auto g = generate_regular(Vs[i], ds[i], 200 + i);
        worst = std::max(worst, verify_bass_identity(g, {0.05, 0.1, 0.2}));
    }
    return {worst < 1e-9, fmt("max relative residual %.2e (< 1e-9) over 20 graphs", worst)};
}

// 3. Poisson regime of short-cycle counts.
std::pair<bool, std::string> c3() {
    const int V = 1000, d = 3, n = 500;
    std::vector<double> c3s, c4s, c5s;
    for (int i = 0; i < n; ++i) {
        auto wc = count_periodic_exact(build_hashimoto(generate_regular(V, d, 30000 + i)), 5);
        c3s.push_back(wc.C[3]);
        c4s.push_back(wc.C[4]);
        c5s.push_back(wc.C[5]);
    }
    bool ok = true;
    std::string detail;
    const std::vector<double>* samples[] = {&c3s, &c4s, &c5s};
    for (int k = 0; k < 3; ++k) {
        const int t = 3 + k;
        const double lam = std::pow(d - 1.0, t) / (2.0 * t);
        double sum = 0, sum2 = 0;
        for (double c : *samples[k]) sum += c, sum2 += c * c;
        const double mean = sum / n;
        const double var = (sum2 - n * mean * mean) / (n - 1);
        const double z = (mean - lam) / std::sqrt(var / n);
        const double vm = var / mean;
        ok = ok && std::abs(z) < 4.0 && vm >= 0.8 && vm <= 1.2;
        if (t == 4) detail = fmt("t=4: mean %.3f vs %.3f (z=%+.2f), var/mean %.3f", mean, lam, z, vm);
    }
    return {ok, detail + " ; all t in {3,4,5} within bands"};
}

// 4. Kesten-McKay convergence of the pooled eigenvalue histogram.
std::pair<bool, std::string> c4() {
    const int V = 1000, d = 3, trials = 100, nbins = 50;
    const double band = 2.0 * std::sqrt(d - 1.0);
    std::vector<long long> count(nbins, 0);
    long long inband = 0;
    for (int i = 0; i < trials; ++i) {
        auto g = generate_regular(V, d, 40000 + i);
        for (double mu : adjacency_eigenvalues(g)) {
            if (std::abs(mu) >= band) continue;
            ++inband;
            int b = static_cast<int>((mu + band) / (2 * band) * nbins);
            ++count[std::min(b, nbins - 1)];
        }
    }
    const double w = 2 * band / nbins;
    const double peak = 3.0 / (4.0 * std::numbers::pi);  // max of the (bimodal) d=3 density
    double sup = 0.0;
    for (int b = 0; b < nbins; ++b) {
        const double lo = -band + b * w;
        const double ref =
            integrate([&](double m) { return kesten_mckay_mu(m, d); }, lo, lo + w, 1e-12, 1e-10)
                .value /
            w;
        sup = std::max(sup, std::abs(count[b] / (double(inband) * w) - ref));
    }
    return {sup < 0.02 * peak,
            fmt("sup-norm %.5f vs 0.02*peak = %.5f (bin-averaged reference)", sup, 0.02 * peak)};
}

struct SharedEnsemble {
    EnsembleAccumulator acc;
    double mean_veff = 0.0;
};

// d=3, V=500, 300 trials, t up to 1000 -- shared by criteria 5 and 6.
SharedEnsemble& ensemble56() {
    static SharedEnsemble e = [] {
        const int V = 500, d = 3, n = 300, t_max = 1000;
        EnsembleAccumulator acc(make_meta(V, d, t_max));
        for (int i = 0; i < n; ++i) {
            auto g = generate_regular(V, d, 50000 + i);
            auto s = split_spectrum(g);
            acc.add_trial(s, y_series(s, t_max, V));
        }
        return SharedEnsemble{std::move(acc), 0.0};
    }();
    e.mean_veff = e.acc.mean_veff();
    return e;
}

// 5. Unfolded form factor tracks K_COE.
std::pair<bool, std::string> c5() {
    auto& e = ensemble56();
    double mad = 0.0;
    int cnt = 0;
    for (int t : e.acc.meta().t_grid) {
        const double tau = t / e.mean_veff;
        if (tau < 0.2 || tau > 2.0) continue;
        mad += std::abs(e.acc.unfolded_form_factor(t).value - k_coe(tau));
        ++cnt;
    }
    mad /= cnt;
    return {mad < 0.05, fmt("MAD %.4f (< 0.05) over %d points, tau in [0.2,2]", mad, cnt)};
}

// 6. Spacing distribution vs the Wigner surmise.
std::pair<bool, std::string> c6() {
    auto& e = ensemble56();
    auto h = e.acc.spacing_histogram();
    double sup = 0.0;
    for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b) {
        const double lo = h.bin_edges[b], hi = h.bin_edges[b + 1];
        const double ref = (wigner_surmise_cdf(hi) - wigner_surmise_cdf(lo)) / (hi - lo);
        sup = std::max(sup, std::abs(h.densities[b] - ref));
    }
    return {sup < 0.03, fmt("sup-norm %.4f (< 0.03) over %zu bins, %lld spacings", sup,
                            h.densities.size(), h.n_samples)};
}

// 7. Headline statistic: variance-to-mean ratio follows F_COE.
std::pair<bool, std::string> c7() {
    const int V = 500, d = 10, n = 100, t_max = 4000;
    EnsembleAccumulator acc(make_meta(V, d, t_max));
    for (int i = 0; i < n; ++i) {
        auto g = generate_regular(V, d, 70000 + i);
        auto s = split_spectrum(g);
        acc.add_trial(s, y_series(s, t_max, V));
    }
    const double veff = acc.mean_veff();
    std::vector<double> vtm;
    vtm.reserve(acc.meta().t_grid.size());
    for (int t : acc.meta().t_grid) vtm.push_back(acc.variance_to_mean(t));
    const auto smooth = moving_average(vtm, 51);

    double mad = 0.0, mad_raw = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < smooth.size(); ++i) {
        const int t = acc.meta().t_grid[i];
        const double tau = t / veff;
        if (tau < 0.1 || tau > 3.0) continue;
        const double pred = f_coe(tau, d).f_coe;
        mad += std::abs(smooth[i] - pred);
        mad_raw += std::abs(vtm[i] - pred);
        ++cnt;
    }
    mad /= cnt;
    mad_raw /= cnt;

    double sat = 0.0;
    int sat_cnt = 0;
    for (std::size_t i = 0; i < vtm.size(); ++i)
        if (acc.meta().t_grid[i] / veff > 5.0) {
            sat += vtm[i];
            ++sat_cnt;
        }
    sat /= sat_cnt;

    const bool ok = mad < 0.1 && sat >= 1.8 && sat <= 2.2;
    return {ok, fmt("MAD %.4f (< 0.1, window 51; raw %.3f), saturation %.3f in [1.8,2.2]", mad,
                    mad_raw, sat)};
}

// 8. Small-tau expansion and data collapse, predictions only.
std::pair<bool, std::string> c8() {
    bool ok = true;
    std::string detail = "ratio@1e-4:";
    for (int d : {3, 5, 10}) {
        const double tau = 1e-4;
        const double r = (f_coe(tau, d, 1e-11).f_coe - 2.0 * tau) /
                         (2.0 * c_coefficient(d) * std::pow(tau, 1.5));
        ok = ok && r >= 0.98 && r <= 1.02;
        detail += fmt(" d=%d %.4f", d, r);

        const double g1 = std::abs(f_coe(1e-5, d, 1e-12).f_coe - 2e-5);
        const double g2 = std::abs(f_coe(1e-3, d, 1e-11).f_coe - 2e-3);
        const double slope = std::log(g2 / g1) / std::log(100.0);
        ok = ok && std::abs(slope - 1.5) <= 0.015;
    }
    return {ok, detail + "; log-log slopes within 1.5 +- 0.015"};
}

// 9. Internal identity K-tilde = (V/2) E(y_t^2) per graph.
std::pair<bool, std::string> c9() {
    const int Vs[] = {60, 80, 100, 120, 140, 160, 180, 200};
    const int ds[] = {3, 4, 5, 10};
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        auto g = generate_regular(Vs[i % 8], ds[i % 4], 90000 + i);
        auto s = split_spectrum(g);
        auto ys = y_series(s, 50, g.V);
        for (int t = 3; t <= 50; ++t) {
            const double a = 0.5 * g.V * ys.y[t] * ys.y[t];
            worst = std::max(worst, k_tilde_route_gap(s, ys, t) / std::max(1.0, a));
        }
    }
    return {worst < 1e-8, fmt("max per-graph residual %.2e (< 1e-8) over 20 graphs, t <= 50", worst)};
}

// 10. Reproducibility of the run operation.
std::pair<bool, std::string> c10() {
    const fs::path base = fs::temp_directory_path() / "nbspec-acceptance-c10";
    fs::remove_all(base);
    auto cfg = [&](const char* sub, int workers) {
        ExperimentConfig c;
        c.V = 80;
        c.d = 3;
        c.n_trials = 12;
        c.t_max = 40;
        c.base_seed = 10000;
        c.workers = workers;
        c.outputs = (base / sub).string();
        c.tasks = {"spacing", "formfactor", "vtm", "poisson"};
        c.poisson_ts = {3, 4};
        return c;
    };
    run_experiment(cfg("a", 0));
    run_experiment(cfg("b", 0));
    run_experiment(cfg("w1", 1));
    run_experiment(cfg("w8", 8));
    bool ok = true;
    for (const char* f : {"form_factor.csv", "spacing.csv", "poisson.csv"}) {
        ok = ok && slurp((base / "a" / f).string()) == slurp((base / "b" / f).string());
        ok = ok && slurp((base / "w1" / f).string()) == slurp((base / "w8" / f).string());
    }
    fs::remove_all(base);
    return {ok, ok ? "rerun and workers=1 vs 8 byte-identical (within 1e-12 trivially)"
                   : "outputs differ"};
}

}  // namespace

int main() {
    std::printf("acceptance gate: ensemble statistics of non-backtracking walks\n");
    criterion(1, "exact-count oracle suite", c1);
    criterion(2, "Bass identity residuals", c2);
    criterion(3, "Poisson regime of C_t", c3);
    criterion(4, "Kesten-McKay convergence", c4);
    criterion(5, "form factor vs K_COE", c5);
    criterion(6, "spacing vs Wigner surmise", c6);
    criterion(7, "variance-to-mean vs F_COE", c7);
    criterion(8, "small-tau expansion / collapse", c8);
    criterion(9, "K-tilde internal identity", c9);
    criterion(10, "run reproducibility", c10);
    std::printf("%d/10 criteria passed\n", n_pass);
    return n_fail == 0 ? 0 : 1;
}
