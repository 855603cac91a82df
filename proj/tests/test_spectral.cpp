#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

#include "nbspec/graph.hpp"
#include "nbspec/quadrature.hpp"
#include "nbspec/spectral.hpp"

using namespace nbspec;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

RegularGraph k4() {
    RegularGraph g;
    g.V = 4;
    g.d = 3;
    g.edges = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    return g;
}

RegularGraph petersen() {
    return load_graph("10 3\n0 1\n0 4\n0 5\n1 2\n1 6\n2 3\n2 7\n3 4\n3 8\n4 9\n"
                      "5 7\n5 8\n6 8\n6 9\n7 9\n");
}

RegularGraph k33() {
    return load_graph("6 3\n0 3\n0 4\n0 5\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n");
}

}  // namespace

TEST_CASE("adjacency eigenvalues of the reference graphs") {
    auto mu = adjacency_eigenvalues(k4());
    REQUIRE(mu.size() == 4);
    for (int k = 0; k < 3; ++k) CHECK(mu[k] == Approx(-1.0).margin(1e-9));
    CHECK(mu[3] == Approx(3.0).margin(1e-9));

    mu = adjacency_eigenvalues(petersen());
    REQUIRE(mu.size() == 10);
    for (int k = 0; k < 4; ++k) CHECK(mu[k] == Approx(-2.0).margin(1e-9));
    for (int k = 4; k < 9; ++k) CHECK(mu[k] == Approx(1.0).margin(1e-9));
    CHECK(mu[9] == Approx(3.0).margin(1e-9));

    mu = adjacency_eigenvalues(k33());
    CHECK(mu.front() == Approx(-3.0).margin(1e-9));
    CHECK(mu.back() == Approx(3.0).margin(1e-9));
    for (int k = 1; k < 5; ++k) CHECK(mu[k] == Approx(0.0).margin(1e-9));
}

TEST_CASE("trace identities hold on random graphs") {
    for (auto [V, d, seed] : {std::tuple{100, 3, 1ull}, {60, 4, 2ull}, {50, 10, 3ull}}) {
        auto g = generate_regular(V, d, seed);
        auto mu = adjacency_eigenvalues(g);
        const double sum = std::accumulate(mu.begin(), mu.end(), 0.0);
        double sum_sq = 0.0;
        for (double m : mu) sum_sq += m * m;
        CHECK(std::abs(sum) < 1e-8);
        CHECK(std::abs(sum_sq - V * d) < 1e-8);
        CHECK(mu.back() == Approx(double(d)).margin(1e-9));
    }
}

TEST_CASE("spectrum splitting") {
    auto s = split_spectrum(petersen());
    CHECK(s.r_c == 0);  // Ramanujan: 1 and -2 inside [-2sqrt2, 2sqrt2]
    CHECK(s.R_phases.size() == 9);
    CHECK(int(s.R_phases.size()) + s.r_c == s.V() - 1);

    s = split_spectrum(k4());
    REQUIRE(s.R_phases.size() == 3);
    for (double phi : s.R_phases) CHECK(phi == Approx(1.9321634507016044).epsilon(1e-12));

    s = split_spectrum(k33());
    CHECK(s.r_c == 1);
    REQUIRE(s.Rc_psi.size() == 1);
    CHECK(s.Rc_psi[0] == Approx(std::acosh(3.0 / (2.0 * std::sqrt(2.0)))).epsilon(1e-12));
    CHECK(s.Rc_sign[0] == -1);
    REQUIRE(s.R_phases.size() == 4);
    for (double phi : s.R_phases) CHECK(phi == Approx(pi / 2).margin(1e-9));  // mu = 0
}

TEST_CASE("splitting requires exactly one trivial eigenvalue") {
    // two disjoint K4s: eigenvalue 3 appears twice
    CHECK_THROWS_AS(split_spectrum(std::vector<double>{-1, -1, -1, -1, -1, -1, 3, 3}, 3),
                    NoTrivialEigenvalue);
    // no eigenvalue near d at all
    CHECK_THROWS_AS(split_spectrum(std::vector<double>{-1, 0, 1, 2}, 3), NoTrivialEigenvalue);
}

TEST_CASE("Kesten-McKay density in mu") {
    CHECK(kesten_mckay_mu(0.0, 3) == Approx(0.15005271935951768).epsilon(1e-14));
    CHECK(kesten_mckay_mu(2.0 * std::sqrt(2.0), 3) == Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(kesten_mckay_mu(2.9, 3), std::domain_error);
    for (int d : {3, 4, 10}) {
        const double band = 2.0 * std::sqrt(d - 1.0);
        auto q = integrate([d](double m) { return kesten_mckay_mu(m, d); }, -band, band, 1e-11,
                           1e-11);
        CHECK(q.value == Approx(1.0).margin(1e-8));
    }
}

TEST_CASE("Kesten-McKay density in phi") {
    CHECK(kesten_mckay_phi(pi / 2, 3) == Approx(0.42441318157838756).epsilon(1e-14));
    CHECK(kesten_mckay_phi(0.0, 3) == 0.0);
    CHECK(kesten_mckay_phi(pi, 3) == Approx(0.0).margin(1e-30));
    for (int d : {3, 5, 10}) {
        auto q = integrate([d](double p) { return kesten_mckay_phi(p, d); }, 0.0, pi, 1e-12,
                           1e-12);
        CHECK(q.value == Approx(1.0).margin(1e-10));
        // symmetry about pi/2
        for (double p : {0.3, 0.9, 1.4})
            CHECK(kesten_mckay_phi(p, d) == Approx(kesten_mckay_phi(pi - p, d)).epsilon(1e-13));
    }
}

TEST_CASE("phi density is the pushforward of the mu density") {
    for (int d : {3, 4, 10}) {
        const double band = 2.0 * std::sqrt(d - 1.0);
        for (double phi : {0.2, 0.7, pi / 2, 2.0, 2.9}) {
            const double mu = band * std::cos(phi);
            const double jac = band * std::sin(phi);  // |dmu/dphi|
            CHECK(kesten_mckay_phi(phi, d) ==
                  Approx(kesten_mckay_mu(mu, d) * jac).margin(1e-10));
        }
    }
}

TEST_CASE("counting function: endpoints, monotonicity, derivative") {
    for (int d : {3, 4, 10}) {
        const double V = 10.0;
        CHECK(std::abs(counting_function(0.0, d, V)) < 1e-12);
        CHECK(counting_function(pi / 2, d, V) == Approx(V / 2).epsilon(1e-13));
        CHECK(counting_function(pi, d, V) == Approx(V).epsilon(1e-13));
        double prev = -1.0;
        for (int i = 0; i <= 400; ++i) {
            const double phi = pi * i / 400.0;
            const double n = counting_function(phi, d, V);
            CHECK(n >= prev);
            prev = n;
        }
        for (double phi : {0.3, 1.0, 2.5}) {
            const double h = 1e-6;
            const double fd =
                (counting_function(phi + h, d, V) - counting_function(phi - h, d, V)) / (2 * h);
            CHECK(fd == Approx(V * kesten_mckay_phi(phi, d)).margin(1e-6));
        }
    }
}

TEST_CASE("unfolding") {
    auto s = split_spectrum(petersen());
    const int V_eff = s.V() - 1 - s.r_c;
    REQUIRE(V_eff == 9);
    auto theta = unfold(s, V_eff);
    REQUIRE(theta.size() == 9);
    CHECK(std::is_sorted(theta.begin(), theta.end()));
    // regression: phase of the mu = 1 quintet
    int hits = 0;
    for (double th : theta)
        if (std::abs(th - 2.1828191130377352) < 1e-12) ++hits;
    CHECK(hits == 5);

    // phi = pi/2 maps to theta = pi (K33's zero eigenvalues)
    auto s33 = split_spectrum(k33());
    auto th33 = unfold(s33, s33.V() - 1 - s33.r_c);
    REQUIRE(th33.size() == 4);
    for (double th : th33) CHECK(th == Approx(pi).epsilon(1e-13));

    // cyclic spacings cover 2pi exactly; count matches V_eff
    auto g = generate_regular(200, 3, 17);
    auto sg = split_spectrum(g);
    const int ve = sg.V() - 1 - sg.r_c;
    auto tg = unfold(sg, ve);
    REQUIRE(int(tg.size()) == ve);
    double span = 2 * pi - tg.back() + tg.front();
    for (std::size_t j = 1; j < tg.size(); ++j) span += tg[j] - tg[j - 1];
    CHECK(span == Approx(2 * pi).epsilon(1e-12));
    for (double th : tg) {
        CHECK(th >= 0.0);
        CHECK(th <= 2 * pi);
    }
}

TEST_CASE("Chebyshev polynomials") {
    CHECK(chebyshev_T(0, 0.77) == 1.0);
    CHECK(chebyshev_T(1, 0.3) == Approx(0.3).epsilon(1e-15));
    CHECK(chebyshev_T(3, -1.0 / (2.0 * std::sqrt(2.0))) ==
          Approx(0.88388347648318441).epsilon(1e-14));
    for (int t : {2, 5, 17, 50}) CHECK(chebyshev_T(t, 1.0) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(chebyshev_T(3, 1.1), std::domain_error);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const double x = 2.0 * (rng() / double(~0ull)) - 1.0;
        for (int t : {2, 7, 23}) {
            CHECK(chebyshev_T(t, x) == Approx(std::cos(t * std::acos(x))).margin(1e-11));
            CHECK(std::abs(chebyshev_T(t, x)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("fluctuation series y_t") {
    auto s = split_spectrum(k4());
    auto f = y_series(s, 10, 4);
    CHECK(f.y[3] == Approx(std::numbers::sqrt2).epsilon(1e-12));
    CHECK(f.y[4] == Approx(0.5).epsilon(1e-12));

    auto sp = split_spectrum(petersen());
    auto fp = y_series(sp, 10, 10);
    CHECK(fp.y[5] == Approx(1.5556349186104046).epsilon(1e-12));
    // odd-t parity term vanishes: y_3 is the bare sum plus the 1/V term
    double direct = std::pow(2.0, -1.5) / 10.0;
    for (double phi : sp.R_phases) direct += 0.2 * std::cos(3.0 * phi);
    CHECK(fp.y[3] == Approx(direct).margin(1e-13));

    // triangle-inequality bound on random graphs
    auto g = generate_regular(120, 4, 9);
    auto sg = split_spectrum(g);
    auto fg = y_series(sg, 40, 120);
    for (int t = 3; t <= 40; ++t) {
        const double cap = std::pow(3.0, -t / 2.0) * (1.0 / 120.0 + 2.0) + 2.0;
        CHECK(std::abs(fg.y[t]) <= cap);
    }
    CHECK_THROWS_AS(y_series(sg, 2, 120), std::invalid_argument);
}

TEST_CASE("density reconstruction") {
    const double band = 2.0 * std::sqrt(2.0);
    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) grid.push_back(-band + 0.01 + (2 * band - 0.02) * i / 200.0);

    FluctuationSeries zero;
    zero.t_max = 10;
    zero.V = 4;
    zero.d = 3;
    zero.y.assign(11, 0.0);
    auto flat = reconstruct_density(zero, 10, 0.15, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(flat[i] == Approx(kesten_mckay_mu(grid[i], 3)).margin(1e-14));

    auto s = split_spectrum(k4());
    auto ys = y_series(s, 40, 4);
    auto km_only = reconstruct_density(ys, 0, 0.15, grid);  // t_cut = 0
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(km_only[i] == Approx(kesten_mckay_mu(grid[i], 3)).margin(1e-14));

    CHECK_THROWS_AS(reconstruct_density(ys, 41, 0.15, grid), std::invalid_argument);
    CHECK_THROWS_AS(reconstruct_density(ys, 10, 0.15, std::vector<double>{band}),
                    std::domain_error);

    // K4: a broadened spike at mu = -1 on top of smooth edge tails.  A grid
    // uniform in phi = arccos(mu/band) keeps the 1/sqrt(band^2-mu^2) factors
    // smooth, so the trapezoid mass comes out right (analytically it is
    // exactly 1: every Chebyshev mode integrates to zero against its weight).
    std::vector<double> fine;
    const int n = 4000;
    for (int i = n; i >= 0; --i) {
        const double phi = 0.005 + (pi - 0.01) * i / double(n);
        fine.push_back(band * std::cos(phi));
    }
    auto rho = reconstruct_density(ys, 40, 0.15, fine);
    double mass = 0.0;
    for (int i = 0; i < n; ++i)
        mass += 0.5 * (rho[i] + rho[i + 1]) * (fine[i + 1] - fine[i]);
    CHECK(mass == Approx(1.0).margin(0.02));
    // interior maximum (edge tails excluded) sits at the eigenvalue -1
    double best_mu = 0.0, best_rho = -1.0, at_minus1 = 0.0, at_plus1 = 0.0;
    for (int i = 0; i <= n; ++i) {
        if (std::abs(fine[i]) <= 2.3 && rho[i] > best_rho) {
            best_rho = rho[i];
            best_mu = fine[i];
        }
        if (std::abs(fine[i] + 1.0) < 2e-3) at_minus1 = rho[i];
        if (std::abs(fine[i] - 1.0) < 2e-3) at_plus1 = rho[i];
    }
    CHECK(best_mu == Approx(-1.0).margin(0.2));
    CHECK(at_minus1 > 3.0 * kesten_mckay_mu(-1.0, 3));
    CHECK(at_minus1 > at_plus1 + 0.3);
}
