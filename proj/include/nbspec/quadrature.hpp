#pragma once

// Adaptive Gauss-Kronrod (G7,K15) integration on finite intervals.

#include <cmath>
#include <cstdlib>

namespace nbspec {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // accumulated |K15 - G7| estimate
    int evaluations = 0;
};

namespace detail {

// QUADPACK dqk15 abscissae/weights on [-1, 1].
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = gk_wk[7] * fc;
    double gauss = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_x[i];
        const double fsum = f(c - dx) + f(c + dx);
        kron += gk_wk[i] * fsum;
        if (i % 2 == 1) gauss += gk_wg[i / 2] * fsum;
    }
    value = kron * h;
    err = std::abs((kron - gauss) * h);
}

template <typename F>
void adapt(const F& f, double a, double b, double abs_tol, double rel_tol, int depth,
           QuadResult& out) {
    double v, e;
    gk15(f, a, b, v, e);
    out.evaluations += 15;
    if (depth <= 0 || e <= abs_tol || e <= rel_tol * std::abs(v)) {
        out.value += v;
        out.error += e;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * abs_tol, rel_tol, depth - 1, out);
    adapt(f, c, b, 0.5 * abs_tol, rel_tol, depth - 1, out);
}

}  // namespace detail

template <typename F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                     double rel_tol = 1e-12, int max_depth = 48) {
    QuadResult out;
    detail::adapt(f, a, b, abs_tol, rel_tol, max_depth, out);
    return out;
}

}  // namespace nbspec
