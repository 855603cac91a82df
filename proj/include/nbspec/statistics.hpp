#pragma once

// Ensemble estimators: raw (phi) and unfolded (theta) spectral form factors,
// nearest-spacing histogram, variance-to-mean ratio of the walk-count
// fluctuations, and Poisson checks on C_t — all carried by a mergeable
// accumulator so trials can be processed in parallel shards.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbspec/hashimoto.hpp"
#include "nbspec/spectral.hpp"

namespace nbspec {

struct AccumulatorMeta {
    int V = 0;
    int d = 0;
    int t_max = 0;
    std::vector<int> t_grid;      // ascending, entries >= 3
    double ds = 0.1;              // spacing-histogram bin width
    double s_max = 4.0;           // spacing-histogram range
    std::vector<int> poisson_ts;  // t values tracked with exact counts

    friend bool operator==(const AccumulatorMeta&, const AccumulatorMeta&) = default;
};

inline AccumulatorMeta make_meta(int V, int d, int t_max) {
    AccumulatorMeta m;
    m.V = V;
    m.d = d;
    m.t_max = t_max;
    for (int t = 3; t <= t_max; ++t) m.t_grid.push_back(t);
    return m;
}

struct FormFactorEstimate {
    int t = 0;
    double tau = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;
};

struct SpacingHistogram {
    std::vector<double> bin_edges;  // nbins + 1 edges
    std::vector<double> densities;  // normalized over the binned range
    long long n_samples = 0;        // includes overflow beyond s_max
    long long n_overflow = 0;
    double sample_mean = 0.0;
};

struct PoissonReport {
    int t = 0;
    double lambda = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double z_mean = 0.0;
    double z_var = 0.0;
    bool in_regime = true;  // t < log_{d-1} V
};

// Non-phase terms of y_t: a_t = (1/V)(d-1)^{-t/2}, b_t = parity term.
inline double y_offset_terms(int t, int V, int d) {
    const double scale = std::pow(d - 1.0, -t / 2.0);
    const double parity = (t % 2 == 0) ? 2.0 : 0.0;
    return scale / V + ((d - 2.0) / 2.0) * scale * parity;
}

// Per-graph route agreement for the identity K-tilde = (V/2) E(y_t^2): the
// Chebyshev-recurrence y_t against the direct cosine-sum evaluation.
inline double k_tilde_route_gap(const SpectralData& s, const FluctuationSeries& ys, int t) {
    if (t < 3 || t > ys.t_max) throw std::invalid_argument("k_tilde_route_gap: t out of range");
    double sc = 0.0;
    for (double phi : s.R_phases) sc += std::cos(t * phi);
    const double y_trig = y_offset_terms(t, ys.V, s.d) + 2.0 * sc / ys.V;
    const double a = 0.5 * ys.V * ys.y[t] * ys.y[t];
    const double b = 0.5 * ys.V * y_trig * y_trig;
    return std::abs(a - b);
}

class EnsembleAccumulator {
public:
    EnsembleAccumulator() = default;
    explicit EnsembleAccumulator(AccumulatorMeta meta) : meta_(std::move(meta)) {
        const std::size_t n = meta_.t_grid.size();
        sum_y_.assign(n, 0.0);
        sum_y2_.assign(n, 0.0);
        sum_kraw_.assign(n, 0.0);
        sum_kraw2_.assign(n, 0.0);
        sum_kunf_.assign(n, 0.0);
        sum_kunf2_.assign(n, 0.0);
        const int nbins = static_cast<int>(std::lround(meta_.s_max / meta_.ds));
        bins_.assign(nbins, 0);
        sum_c_.assign(meta_.poisson_ts.size(), 0.0);
        sum_c2_.assign(meta_.poisson_ts.size(), 0.0);
        for (std::size_t i = 1; i < meta_.t_grid.size(); ++i)
            if (meta_.t_grid[i] <= meta_.t_grid[i - 1])
                throw std::invalid_argument("t_grid must be strictly ascending");
        if (!meta_.t_grid.empty() &&
            (meta_.t_grid.front() < 3 || meta_.t_grid.back() > meta_.t_max))
            throw std::invalid_argument("t_grid entries must lie in [3, t_max]");
    }

    const AccumulatorMeta& meta() const { return meta_; }
    long long n_trials() const { return n_trials_; }

    // Fold in one successfully processed graph.  `wc` supplies exact counts
    // for the Poisson checks and may be null when meta.poisson_ts is empty.
    void add_trial(const SpectralData& s, const FluctuationSeries& ys,
                   const WalkCounts* wc = nullptr) {
        if (s.d != meta_.d || s.V() != meta_.V)
            throw std::invalid_argument("add_trial: graph does not match accumulator metadata");
        if (ys.t_max < meta_.t_max)
            throw std::invalid_argument("add_trial: fluctuation series shorter than t_max");
        const int V_eff = s.V() - 1 - s.r_c;
        if (V_eff < 2) throw std::invalid_argument("add_trial: fewer than 2 band phases");

        accumulate_form_factors(s.R_phases, sum_kraw_, sum_kraw2_, V_eff);
        const auto theta = unfold(s, V_eff);
        accumulate_form_factors(theta, sum_kunf_, sum_kunf2_, V_eff);

        for (std::size_t i = 0; i < meta_.t_grid.size(); ++i) {
            const double y = ys.y[meta_.t_grid[i]];
            sum_y_[i] += y;
            sum_y2_[i] += y * y;
        }

        // nearest spacings in units of the mean, cyclic wrap
        const double scale = V_eff / (2.0 * std::numbers::pi);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double gap = (j == 0)
                                   ? theta.front() + 2.0 * std::numbers::pi - theta.back()
                                   : theta[j] - theta[j - 1];
            record_spacing(scale * gap);
        }

        if (!meta_.poisson_ts.empty()) {
            if (wc == nullptr || wc->t_max < meta_.poisson_ts.back())
                throw std::invalid_argument("add_trial: exact counts required for poisson_ts");
            for (std::size_t i = 0; i < meta_.poisson_ts.size(); ++i) {
                const double c = wc->C[meta_.poisson_ts[i]];
                sum_c_[i] += c;
                sum_c2_[i] += c * c;
            }
        }

        sum_veff_ += V_eff;
        sum_veff2_ += double(V_eff) * V_eff;
        ++n_trials_;
    }

    // Counts-only ingestion for runs that need no spectral work; legal only
    // when the accumulator tracks nothing but Poisson statistics.
    void add_counts_trial(const WalkCounts& wc) {
        if (!meta_.t_grid.empty())
            throw std::logic_error("add_counts_trial: accumulator tracks spectral statistics");
        if (meta_.poisson_ts.empty() || wc.t_max < meta_.poisson_ts.back())
            throw std::invalid_argument("add_counts_trial: counts do not cover poisson_ts");
        for (std::size_t i = 0; i < meta_.poisson_ts.size(); ++i) {
            const double c = wc.C[meta_.poisson_ts[i]];
            sum_c_[i] += c;
            sum_c2_[i] += c * c;
        }
        ++n_trials_;
    }

    void merge_in(const EnsembleAccumulator& other) {
        if (!(other.meta_ == meta_))
            throw std::invalid_argument("merge: accumulator metadata mismatch");
        n_trials_ += other.n_trials_;
        for (std::size_t i = 0; i < sum_y_.size(); ++i) {
            sum_y_[i] += other.sum_y_[i];
            sum_y2_[i] += other.sum_y2_[i];
            sum_kraw_[i] += other.sum_kraw_[i];
            sum_kraw2_[i] += other.sum_kraw2_[i];
            sum_kunf_[i] += other.sum_kunf_[i];
            sum_kunf2_[i] += other.sum_kunf2_[i];
        }
        for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i] += other.bins_[i];
        overflow_ += other.overflow_;
        n_spacings_ += other.n_spacings_;
        sum_s_ += other.sum_s_;
        for (std::size_t i = 0; i < sum_c_.size(); ++i) {
            sum_c_[i] += other.sum_c_[i];
            sum_c2_[i] += other.sum_c2_[i];
        }
        sum_veff_ += other.sum_veff_;
        sum_veff2_ += other.sum_veff2_;
    }

    friend EnsembleAccumulator merge(EnsembleAccumulator a, const EnsembleAccumulator& b) {
        a.merge_in(b);
        return a;
    }

    double mean_veff() const {
        require_trials(1);
        return sum_veff_ / n_trials_;
    }

    // K-tilde_V(t): phases of the original spectrum.
    FormFactorEstimate raw_form_factor(int t) const {
        return estimate(t, sum_kraw_, sum_kraw2_);
    }

    // K_V(t): unfolded phases.  t = 0 is the coherent limit V_eff.
    FormFactorEstimate unfolded_form_factor(int t) const {
        if (t == 0) {
            require_trials(1);
            FormFactorEstimate f;
            f.t = 0;
            f.tau = 0.0;
            f.value = mean_veff();
            f.stderr_ = std::sqrt(sample_variance(sum_veff_, sum_veff2_) /
                                  std::max<long long>(n_trials_, 1));
            return f;
        }
        return estimate(t, sum_kunf_, sum_kunf2_);
    }

    SpacingHistogram spacing_histogram() const {
        require_trials(1);
        SpacingHistogram h;
        const std::size_t nbins = bins_.size();
        h.bin_edges.resize(nbins + 1);
        for (std::size_t i = 0; i <= nbins; ++i) h.bin_edges[i] = i * meta_.ds;
        h.densities.resize(nbins, 0.0);
        const long long binned = n_spacings_ - overflow_;
        if (binned > 0)
            for (std::size_t i = 0; i < nbins; ++i)
                h.densities[i] = double(bins_[i]) / (double(binned) * meta_.ds);
        h.n_samples = n_spacings_;
        h.n_overflow = overflow_;
        h.sample_mean = n_spacings_ > 0 ? sum_s_ / double(n_spacings_) : 0.0;
        return h;
    }

    // r(t) = V * sample variance of y_t (n/(n-1) convention); equals
    // (1/V) var(P_t)/E(P_t) with E(P_t) -> (d-1)^t.
    double variance_to_mean(int t) const {
        require_trials(2);
        const std::size_t i = grid_index(t);
        return meta_.V * sample_variance(sum_y_[i], sum_y2_[i]);
    }

    // Gaussian-theory standard error of the variance estimator.
    double variance_to_mean_stderr(int t) const {
        return variance_to_mean(t) * std::sqrt(2.0 / (n_trials_ - 1));
    }

    PoissonReport poisson_check(int t) const {
        std::size_t idx = sum_c_.size();
        for (std::size_t i = 0; i < meta_.poisson_ts.size(); ++i)
            if (meta_.poisson_ts[i] == t) idx = i;
        if (idx == sum_c_.size())
            throw std::invalid_argument("poisson_check: t was not tracked in poisson_ts");
        require_trials(1);
        PoissonReport r;
        r.t = t;
        r.lambda = std::pow(meta_.d - 1.0, t) / (2.0 * t);
        r.mean = sum_c_[idx] / n_trials_;
        r.z_mean = (r.mean - r.lambda) / std::sqrt(r.lambda / n_trials_);
        if (n_trials_ >= 2) {
            r.variance = sample_variance(sum_c_[idx], sum_c2_[idx]);
            // var(S^2) for Poisson samples: (lambda + 2 lambda^2)/n
            r.z_var = (r.variance - r.lambda) /
                      std::sqrt((r.lambda + 2.0 * r.lambda * r.lambda) / n_trials_);
        } else {
            r.variance = std::numeric_limits<double>::quiet_NaN();
            r.z_var = std::numeric_limits<double>::quiet_NaN();
        }
        r.in_regime = t < std::log(double(meta_.V)) / std::log(meta_.d - 1.0);
        return r;
    }

private:
    std::size_t grid_index(int t) const {
        for (std::size_t i = 0; i < meta_.t_grid.size(); ++i)
            if (meta_.t_grid[i] == t) return i;
        throw std::invalid_argument("t = " + std::to_string(t) + " is not on the t-grid");
    }

    void require_trials(long long need) const {
        if (n_trials_ < need)
            throw std::runtime_error("accumulator holds " + std::to_string(n_trials_) +
                                     " trials, need " + std::to_string(need));
    }

    double sample_variance(double sum, double sum_sq) const {
        const double mean = sum / n_trials_;
        const double v = (sum_sq - n_trials_ * mean * mean) / (n_trials_ - 1);
        return v > 0.0 ? v : 0.0;
    }

    FormFactorEstimate estimate(int t, const std::vector<double>& sums,
                                const std::vector<double>& sums_sq) const {
        require_trials(1);
        const std::size_t i = grid_index(t);
        FormFactorEstimate f;
        f.t = t;
        f.tau = t / mean_veff();
        f.value = sums[i] / n_trials_;
        f.stderr_ = n_trials_ > 1
                        ? std::sqrt(sample_variance(sums[i], sums_sq[i]) / n_trials_)
                        : 0.0;
        return f;
    }

    // |sum_j e^{i t phi_j}|^2 / V_eff for every t on the grid, by stepping
    // one complex rotation per phase through consecutive powers.
    void accumulate_form_factors(const std::vector<double>& phases, std::vector<double>& sums,
                                 std::vector<double>& sums_sq, int V_eff) {
        if (meta_.t_grid.empty()) return;
        scratch_re_.assign(meta_.t_grid.size(), 0.0);
        scratch_im_.assign(meta_.t_grid.size(), 0.0);
        const int t_lo = meta_.t_grid.front();
        for (double phi : phases) {
            const std::complex<double> z(std::cos(phi), std::sin(phi));
            std::complex<double> w(std::cos(t_lo * phi), std::sin(t_lo * phi));
            std::size_t slot = 0;
            for (int t = t_lo; t <= meta_.t_grid.back(); ++t) {
                if (meta_.t_grid[slot] == t) {
                    scratch_re_[slot] += w.real();
                    scratch_im_[slot] += w.imag();
                    ++slot;
                }
                w *= z;
            }
        }
        for (std::size_t i = 0; i < meta_.t_grid.size(); ++i) {
            const double a =
                (scratch_re_[i] * scratch_re_[i] + scratch_im_[i] * scratch_im_[i]) / V_eff;
            sums[i] += a;
            sums_sq[i] += a * a;
        }
    }

    void record_spacing(double s) {
        ++n_spacings_;
        sum_s_ += s;
        const auto idx = static_cast<long long>(s / meta_.ds);
        if (s >= meta_.s_max || idx >= static_cast<long long>(bins_.size()))
            ++overflow_;
        else
            ++bins_[idx < 0 ? 0 : idx];
    }

    AccumulatorMeta meta_;
    long long n_trials_ = 0;
    std::vector<double> sum_y_, sum_y2_;
    std::vector<double> sum_kraw_, sum_kraw2_;
    std::vector<double> sum_kunf_, sum_kunf2_;
    std::vector<std::uint64_t> bins_;
    std::uint64_t overflow_ = 0;
    long long n_spacings_ = 0;
    double sum_s_ = 0.0;
    std::vector<double> sum_c_, sum_c2_;
    double sum_veff_ = 0.0, sum_veff2_ = 0.0;
    std::vector<double> scratch_re_, scratch_im_;
};

// Centered moving average over a window of w integer t values; w must be odd.
// Entries within w/2 of either end average over the available window.
inline std::vector<double> moving_average(const std::vector<double>& v, int w) {
    if (w < 1 || w % 2 == 0) throw std::invalid_argument("moving_average: w must be odd");
    if (w == 1) return v;
    const int n = static_cast<int>(v.size());
    const int half = w / 2;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
        double s = 0.0;
        for (int j = lo; j <= hi; ++j) s += v[j];
        out[i] = s / (hi - lo + 1);
    }
    return out;
}

}  // namespace nbspec
