#pragma once

// Random-matrix reference curves: the COE form factor K_COE, its Kesten-McKay
// average F_COE (the variance-to-mean prediction), the small-tau coefficient
// C(d), and the Wigner-surmise spacing reference.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nbspec/quadrature.hpp"
#include "nbspec/spectral.hpp"

namespace nbspec {

struct CoePrediction {
    double tau = 0.0;
    double k_coe = 0.0;
    double f_coe = 0.0;
    double quadrature_error = 0.0;
};

// K_COE(τ) = 2τ − τ ln(2τ+1)            for τ < 1
//          = 2 − τ ln((2τ+1)/(2τ−1))    for τ > 1
// both branches → 2 − ln 3 at τ = 1.
inline double k_coe(double tau) {
    if (tau <= 0.0) throw std::domain_error("k_coe: tau must be positive");
    if (tau < 1.0) return 2.0 * tau - tau * std::log1p(2.0 * tau);
    if (tau > 1.0) return 2.0 - tau * std::log1p(2.0 / (2.0 * tau - 1.0));
    return 2.0 - std::log(3.0);
}

inline CoePrediction f_coe(double tau, int d, double tol = 1e-10) {
    if (d < 3) throw std::invalid_argument("f_coe: d must be >= 3");
    if (tau <= 0.0) throw std::domain_error("f_coe: tau must be positive");
    if (tol < 1e-12) throw std::invalid_argument("f_coe: tol must be >= 1e-12");
    const auto integrand = [tau, d](double phi) {
        if (phi <= 0.0) return 0.0;  // ρ→0 while K_COE→1: limit of the product is 0
        const double rho = kesten_mckay_phi(phi, d);
        if (rho <= 0.0) return 0.0;
        return 4.0 * rho * k_coe(tau / (2.0 * std::numbers::pi * rho));
    };
    const auto q = integrate(integrand, 0.0, std::numbers::pi / 2.0, 0.25 * tol, 0.0);
    if (q.error > tol)
        throw std::runtime_error("f_coe: quadrature failed to reach the requested tolerance");
    CoePrediction p;
    p.tau = tau;
    p.k_coe = k_coe(tau);
    p.f_coe = q.value;
    p.quadrature_error = q.error;
    return p;
}

// C(d) = ((d−2)/√(2d(d−1))) ((2/π) arccoth√2 − 2√2/(3π) − 1),
// arccoth√2 = ½ ln((√2+1)/(√2−1)).
inline double c_coefficient(int d) {
    if (d < 2) throw std::invalid_argument("c_coefficient: d must be >= 2");
    const double r2 = std::numbers::sqrt2;
    const double arccoth_r2 = 0.5 * std::log((r2 + 1.0) / (r2 - 1.0));
    const double bracket =
        (2.0 / std::numbers::pi) * arccoth_r2 - 2.0 * r2 / (3.0 * std::numbers::pi) - 1.0;
    return ((d - 2.0) / std::sqrt(2.0 * d * (d - 1.0))) * bracket;
}

// Leading small-τ law F_COE = 2τ(1 + C(d)√τ + ...).
inline double f_coe_small_tau(double tau, int d) {
    if (d < 3) throw std::invalid_argument("f_coe_small_tau: d must be >= 3");
    if (tau < 0.0) throw std::domain_error("f_coe_small_tau: tau must be nonnegative");
    return 2.0 * tau * (1.0 + c_coefficient(d) * std::sqrt(tau));
}

// Prediction for the unfolded form factor: K̃(τ) = F_COE(τ)/2.
inline double predicted_k_tilde(double tau, int d, double tol = 1e-10) {
    return f_coe(tau, d, tol).f_coe / 2.0;
}

inline double wigner_surmise(double s) {
    return (std::numbers::pi / 2.0) * s * std::exp(-std::numbers::pi * s * s / 4.0);
}

inline double wigner_surmise_cdf(double s) {
    return -std::expm1(-std::numbers::pi * s * s / 4.0);
}

}  // namespace nbspec
