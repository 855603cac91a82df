#pragma once

// Hashimoto (non-backtracking) directed-edge operator Y, exact t-periodic
// walk counts P_t = tr Y^t, a brute-force enumeration oracle, the spectral
// trace formula, and the Bass determinant identity.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nbspec/bigint.hpp"
#include "nbspec/graph.hpp"
#include "nbspec/spectral.hpp"

namespace nbspec {

struct HashimotoOperator {
    int V = 0;
    int E = 0;
    int d = 0;
    // Directed edge 2k is edge k traversed i->j (i < j), edge 2k+1 is j->i.
    std::vector<int> origin;
    std::vector<int> terminus;
    std::vector<int> reversal;
    std::vector<std::vector<int>> successors;  // d-1 entries each

    int n_directed() const { return 2 * E; }
};

struct WalkCounts {
    int t_max = 0;
    std::vector<BigUInt> P;  // index t = 0..t_max; P[0] unused
    std::vector<double> C;   // C[t] = P_t / (2t)
};

class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline HashimotoOperator build_hashimoto(const RegularGraph& g) {
    HashimotoOperator h;
    h.V = g.V;
    h.E = g.E();
    h.d = g.d;
    const int m = 2 * h.E;
    h.origin.resize(m);
    h.terminus.resize(m);
    h.reversal.resize(m);
    std::vector<std::vector<int>> out_edges(g.V);
    for (int k = 0; k < h.E; ++k) {
        auto [i, j] = g.edges[k];
        h.origin[2 * k] = i;
        h.terminus[2 * k] = j;
        h.origin[2 * k + 1] = j;
        h.terminus[2 * k + 1] = i;
        h.reversal[2 * k] = 2 * k + 1;
        h.reversal[2 * k + 1] = 2 * k;
        out_edges[i].push_back(2 * k);
        out_edges[j].push_back(2 * k + 1);
    }
    h.successors.resize(m);
    for (int e = 0; e < m; ++e) {
        h.successors[e].reserve(g.d - 1);
        for (int e2 : out_edges[h.terminus[e]])
            if (e2 != h.reversal[e]) h.successors[e].push_back(e2);
    }
    return h;
}

namespace detail {

inline void add_twice(BigUInt& acc, std::uint64_t cell) { acc += 2 * cell; }
inline void add_twice(BigUInt& acc, const BigUInt& cell) {
    BigUInt two = cell;
    two *= 2;
    acc += two;
}

// Accumulate tr Y^t for t = 1..t_max into P.  Walks are propagated from one
// start edge of each reversal pair only; (Y^t)_{e,e} = (Y^t)_{ê,ê} because
// reversing a closed nb walk is a bijection, so each diagonal entry counts
// twice.  Frontier lists keep the per-step cost proportional to the number of
// reachable edges.
template <typename Cell>
void accumulate_traces(const HashimotoOperator& h, int t_max, std::vector<BigUInt>& P) {
    const int m = h.n_directed();
    std::vector<Cell> cur(m), next(m);
    std::vector<int> cur_frontier, next_frontier;
    std::vector<std::int64_t> stamp(m, -1);
    std::int64_t tag = 0;

    for (int e0 = 0; e0 < m; e0 += 2) {
        for (int e : cur_frontier) cur[e] = Cell(0);
        cur_frontier.assign(1, e0);
        cur[e0] = Cell(1);
        for (int t = 1; t <= t_max; ++t) {
            ++tag;
            next_frontier.clear();
            for (int e : cur_frontier) {
                for (int e2 : h.successors[e]) {
                    if (stamp[e2] != tag) {
                        stamp[e2] = tag;
                        next[e2] = Cell(0);
                        next_frontier.push_back(e2);
                    }
                    next[e2] += cur[e];
                }
            }
            if (stamp[e0] == tag) add_twice(P[t], next[e0]);
            for (int e : cur_frontier) cur[e] = Cell(0);
            std::swap(cur, next);
            std::swap(cur_frontier, next_frontier);
        }
    }
}

}  // namespace detail

inline WalkCounts count_periodic_exact(const HashimotoOperator& h, int t_max) {
    if (t_max < 1) throw std::invalid_argument("count_periodic_exact: t_max must be >= 1");
    WalkCounts wc;
    wc.t_max = t_max;
    wc.P.assign(t_max + 1, BigUInt());
    // Cells stay below (d-1)^t_max (total walk mass from one start edge), so
    // 64-bit cells are safe while (d-1)^t_max < 2^62.
    const double bits = t_max * std::log2(h.d - 1.0);
    if (bits < 62.0)
        detail::accumulate_traces<std::uint64_t>(h, t_max, wc.P);
    else
        detail::accumulate_traces<BigUInt>(h, t_max, wc.P);
    wc.C.assign(t_max + 1, 0.0);
    for (int t = 1; t <= t_max; ++t) wc.C[t] = wc.P[t].to_double() / (2.0 * t);
    return wc;
}

// Depth-first enumeration oracle: counts closed nb walks of length t from
// every starting directed edge.
inline std::uint64_t brute_force_count(const RegularGraph& g, int t) {
    if (t < 1) throw std::invalid_argument("brute_force_count: t must be >= 1");
    const double work = std::pow(g.d - 1.0, t) * g.V * g.d;
    if (t > 14 || work > 1e9)
        throw BudgetError("brute_force_count: enumeration budget exceeded (t=" +
                          std::to_string(t) + ", V=" + std::to_string(g.V) + ", d=" +
                          std::to_string(g.d) + ")");
    const auto h = build_hashimoto(g);
    std::uint64_t total = 0;
    const int m = h.n_directed();
    std::vector<int> walk(t + 1);
    for (int s = 0; s < m; ++s) {
        // iterative DFS over successor chains of fixed depth t
        int depth = 0;
        std::vector<int> choice(t + 1, 0);
        walk[0] = s;
        while (depth >= 0) {
            if (depth == t) {
                if (walk[depth] == s) ++total;
                --depth;
                continue;
            }
            if (choice[depth] < static_cast<int>(h.successors[walk[depth]].size())) {
                walk[depth + 1] = h.successors[walk[depth]][choice[depth]];
                ++choice[depth];
                ++depth;
                choice[depth] = 0;
            } else {
                --depth;
            }
        }
    }
    return total;
}

// tr Y^t from the adjacency spectrum:
//   (d−1)^t + 2(d−1)^{t/2}[ Σ_{R^c} sign(μ_k)^t cosh(tψ_k) + Σ_R cos(tφ_k) ]
//   + 1 + (E−V)(1+(−1)^t)
inline double trace_power_spectral(const SpectralData& s, int t, int V, int E, int d) {
    const double half_power = std::pow(d - 1.0, t / 2.0);
    double osc = 0.0;
    for (std::size_t k = 0; k < s.Rc_psi.size(); ++k) {
        const double sign_t = (s.Rc_sign[k] < 0 && t % 2 != 0) ? -1.0 : 1.0;
        osc += sign_t * std::cosh(t * s.Rc_psi[k]);
    }
    for (double phi : s.R_phases) osc += std::cos(t * phi);
    const double parity = (t % 2 == 0) ? 2.0 : 0.0;
    return std::pow(d - 1.0, t) + 2.0 * half_power * osc + 1.0 + (E - V) * parity;
}

// Max relative residual of det(I − sY) = (1−s²)^{E−V} det((1+(d−1)s²)I − sA)
// over the given s values; dense LU determinants, small graphs only.
inline double verify_bass_identity(const RegularGraph& g, const std::vector<double>& s_values) {
    if (g.V > 50)
        throw std::invalid_argument("verify_bass_identity: V exceeds the dimension budget of 50");
    const auto h = build_hashimoto(g);
    const int m = h.n_directed();
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(m, m);
    for (int e = 0; e < m; ++e)
        for (int e2 : h.successors[e]) Y(e, e2) = 1.0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.V, g.V);
    for (auto [i, j] : g.edges) {
        A(i, j) = 1.0;
        A(j, i) = 1.0;
    }
    const Eigen::MatrixXd Im = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd Iv = Eigen::MatrixXd::Identity(g.V, g.V);
    double worst = 0.0;
    for (double s : s_values) {
        if (std::abs(s) >= 1.0 / (g.d - 1.0))
            throw std::domain_error("verify_bass_identity: |s| must be < 1/(d-1)");
        const double lhs = (Im - s * Y).determinant();
        const double rhs = std::pow(1.0 - s * s, h.E - g.V) *
                           ((1.0 + (g.d - 1.0) * s * s) * Iv - s * A).determinant();
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

}  // namespace nbspec
