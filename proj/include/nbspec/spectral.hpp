#pragma once

// Adjacency spectra of d-regular graphs: Ramanujan / non-Ramanujan split,
// Kesten-McKay density in mu and phi, the integrated counting function with
// its arctan branch continuation, phase unfolding, Chebyshev fluctuation
// coefficients y_t, and a smoothed density reconstruction.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbspec/graph.hpp"

namespace nbspec {

struct SpectralData {
    std::vector<double> mu;        // all V eigenvalues, ascending
    int d = 0;
    std::vector<double> R_phases;  // phi_k = arccos(mu_k / 2sqrt(d-1)), mu ascending order
    std::vector<double> Rc_psi;    // psi_k = arccosh(|mu_k| / 2sqrt(d-1))
    std::vector<int> Rc_sign;      // sign of mu_k for each psi_k
    int r_c = 0;

    int V() const { return static_cast<int>(mu.size()); }
};

struct FluctuationSeries {
    std::vector<double> y;  // index t = 0..t_max; entries below t = 3 are zero
    int t_max = 0;
    int V = 0;
    int d = 0;
};

class NoTrivialEigenvalue : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<double> adjacency_eigenvalues(const RegularGraph& g) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.V, g.V);
    for (auto [i, j] : g.edges) {
        A(i, j) = 1.0;
        A(j, i) = 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed to converge (status " +
                                 std::to_string(static_cast<int>(solver.info())) + ")");
    std::vector<double> mu(solver.eigenvalues().data(), solver.eigenvalues().data() + g.V);
    std::sort(mu.begin(), mu.end());
    return mu;
}

inline constexpr double trivial_eigenvalue_tol = 1e-6;
inline constexpr double band_edge_tol = 1e-10;

// Classify the non-trivial spectrum into the Ramanujan band R (|mu| <=
// 2sqrt(d-1), closed interval) and its complement R^c.
inline SpectralData split_spectrum(std::vector<double> mu, int d) {
    std::sort(mu.begin(), mu.end());
    const int V = static_cast<int>(mu.size());
    int n_trivial = 0;
    for (double m : mu)
        if (std::abs(m - d) <= trivial_eigenvalue_tol) ++n_trivial;
    if (n_trivial != 1)
        throw NoTrivialEigenvalue("expected exactly one eigenvalue at d=" + std::to_string(d) +
                                  ", found " + std::to_string(n_trivial) +
                                  " (disconnected graph or solver failure)");

    SpectralData s;
    s.mu = mu;
    s.d = d;
    const double band = 2.0 * std::sqrt(d - 1.0);
    for (int k = 0; k < V - 1; ++k) {  // largest (trivial) eigenvalue excluded
        const double m = mu[k];
        if (std::abs(m) <= band + band_edge_tol) {
            const double x = std::clamp(m / band, -1.0, 1.0);
            s.R_phases.push_back(std::acos(x));
        } else {
            s.Rc_psi.push_back(std::acosh(std::abs(m) / band));
            s.Rc_sign.push_back(m > 0 ? 1 : -1);
        }
    }
    s.r_c = static_cast<int>(s.Rc_psi.size());
    return s;
}

inline SpectralData split_spectrum(const RegularGraph& g) {
    return split_spectrum(adjacency_eigenvalues(g), g.d);
}

inline double kesten_mckay_mu(double mu, int d) {
    const double band2 = 4.0 * (d - 1.0);
    if (mu * mu > band2 * (1.0 + 1e-12) + 1e-12)
        throw std::domain_error("kesten_mckay_mu: |mu| exceeds the spectral band");
    const double arg = std::max(0.0, band2 - mu * mu);
    return (d / (2.0 * std::numbers::pi)) * std::sqrt(arg) / (d * d - mu * mu);
}

inline double kesten_mckay_phi(double phi, int d) {
    const double s = std::sin(phi), c = std::cos(phi);
    const double q = 4.0 * (d - 1.0) / (d * d);
    return (2.0 * (d - 1.0) / (std::numbers::pi * d)) * s * s / (1.0 - q * c * c);
}

namespace detail {

// arctan((d/(d-2))·tan φ) continued continuously across φ = π/2.
inline double atan_branch(double phi, int d) {
    const double half_pi = std::numbers::pi / 2.0;
    if (phi == half_pi) return half_pi;
    const double a = std::atan((d / (d - 2.0)) * std::tan(phi));
    return phi < half_pi ? a : a + std::numbers::pi;
}

}  // namespace detail

// Integrated Kesten-McKay measure on the circle: N_KM(0) = 0, N_KM(pi) = V,
// derivative V * kesten_mckay_phi.
inline double counting_function(double phi, int d, double V) {
    return V * (d / (2.0 * std::numbers::pi)) *
           (phi - ((d - 2.0) / d) * detail::atan_branch(phi, d));
}

// theta_j = (2π/V_eff) N_KM(φ_j; V_eff), ascending.  V_eff cancels:
// theta = d·φ − (d−2)·atan_branch(φ).
inline std::vector<double> unfold(const SpectralData& s, int V_eff) {
    std::vector<double> theta;
    theta.reserve(s.R_phases.size());
    for (double phi : s.R_phases)
        theta.push_back((2.0 * std::numbers::pi / V_eff) *
                        counting_function(phi, s.d, static_cast<double>(V_eff)));
    std::sort(theta.begin(), theta.end());
    return theta;
}

inline double chebyshev_T(int t, double x) {
    if (std::abs(x) > 1.0 + 1e-12)
        throw std::domain_error("chebyshev_T: |x| > 1");
    x = std::clamp(x, -1.0, 1.0);
    if (t == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int k = 2; k <= t; ++k) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// y_t = (1/V)(d−1)^{−t/2} + ((d−2)/2)(d−1)^{−t/2}(1+(−1)^t)
//       + (2/V) Σ_{μ∈R} T_t(μ/(2√(d−1))),   t = 3..t_max.
// All Chebyshev values advance through one shared three-term recurrence.
inline FluctuationSeries y_series(const SpectralData& s, int t_max, int V) {
    if (t_max < 3) throw std::invalid_argument("y_series: t_max must be >= 3");
    FluctuationSeries f;
    f.t_max = t_max;
    f.V = V;
    f.d = s.d;
    f.y.assign(t_max + 1, 0.0);

    const std::size_t n = s.R_phases.size();
    std::vector<double> x(n), prev(n, 1.0), cur(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = std::cos(s.R_phases[k]);
        cur[k] = x[k];
    }
    const double damp = 1.0 / std::sqrt(s.d - 1.0);
    double scale = damp;  // (d-1)^{-t/2}
    for (int t = 2; t <= t_max; ++t) {
        scale *= damp;
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double next = 2.0 * x[k] * cur[k] - prev[k];
            prev[k] = cur[k];
            cur[k] = next;
            sum += next;
        }
        if (t < 3) continue;
        const double parity = (t % 2 == 0) ? 2.0 : 0.0;
        f.y[t] = scale / V + ((s.d - 2.0) / 2.0) * scale * parity + 2.0 * sum / V;
    }
    return f;
}

// Smoothed density from the truncated trace formula; validation feature.
inline std::vector<double> reconstruct_density(const FluctuationSeries& ys, int t_cut,
                                               double sigma, const std::vector<double>& grid) {
    if (t_cut > ys.t_max)
        throw std::invalid_argument("reconstruct_density: t_cut exceeds available t_max");
    const int d = ys.d;
    const double band = 2.0 * std::sqrt(d - 1.0);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double mu : grid) {
        if (std::abs(mu) >= band)
            throw std::domain_error("reconstruct_density: grid point outside the open band");
        double rho = kesten_mckay_mu(mu, d);
        const double phi = std::acos(mu / band);
        const double root = std::sqrt(band * band - mu * mu);
        for (int t = 3; t <= t_cut; ++t) {
            const double w = std::exp(-0.5 * t * t * sigma * sigma);
            rho += (1.0 / std::numbers::pi) * ys.y[t] * w * std::cos(t * phi) / root;
        }
        out.push_back(rho);
    }
    return out;
}

}  // namespace nbspec
