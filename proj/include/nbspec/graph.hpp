#pragma once

// Random d-regular simple connected graphs: pairing-model sampler,
// invariant checks, canonical edge-list text format.
//
// All randomness flows from a single 64-bit trial seed through
// std::mt19937_64, so identical (V, d, seed) always yields the same graph.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nbspec {

struct RegularGraph {
    int V = 0;
    int d = 0;
    std::vector<std::pair<int, int>> edges;  // sorted, i < j

    int E() const { return static_cast<int>(edges.size()); }

    std::vector<std::vector<int>> adjacency_lists() const {
        std::vector<std::vector<int>> adj(V);
        for (auto [i, j] : edges) {
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
        return adj;
    }
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

inline bool is_connected(int V, const std::vector<std::vector<int>>& adj) {
    if (V == 0) return false;
    std::vector<char> seen(V, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : adj[u]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == V;
}

}  // namespace detail

inline void validate_regular_parameters(int V, int d) {
    if (d < 3) throw std::invalid_argument("degree must be at least 3");
    if (V <= d) throw std::invalid_argument("vertex count must exceed the degree");
    if ((static_cast<long long>(V) * d) % 2 != 0)
        throw std::invalid_argument("V*d must be even");
}

inline bool check_regular_simple_connected(const RegularGraph& g) {
    if (g.d < 3 || g.V <= g.d) return false;
    if (static_cast<long long>(g.V) * g.d != 2ll * g.E()) return false;
    std::vector<int> degree(g.V, 0);
    std::vector<std::vector<int>> adj(g.V);
    for (auto [i, j] : g.edges) {
        if (i < 0 || j < 0 || i >= g.V || j >= g.V) return false;
        if (i == j) return false;
        ++degree[i];
        ++degree[j];
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (int v = 0; v < g.V; ++v) {
        if (degree[v] != g.d) return false;
        auto& nb = adj[v];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) return false;  // parallel edge
    }
    return detail::is_connected(g.V, adj);
}

namespace detail {

// Unbiased draw from [0, n) with rejection; avoids the library-dependent
// std::uniform_int_distribution so streams are identical everywhere.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

}  // namespace detail

// Pairing (configuration) model, per-pair rejection: d stubs per vertex,
// repeatedly match two uniformly chosen free stubs, redrawing the pair when it
// would create a loop or parallel edge; restart the matching when no valid
// pair remains, and reject disconnected samples.  Asymptotically uniform over
// simple connected d-regular graphs, and practical for all d used here (full
// whole-matching rejection would succeed with probability ~exp(-(d^2-1)/4) and
// is hopeless beyond d ~ 6).
inline RegularGraph generate_regular(int V, int d, std::uint64_t seed,
                                     int max_attempts = 10000) {
    validate_regular_parameters(V, d);
    std::mt19937_64 rng(seed);

    RegularGraph g;
    g.V = V;
    g.d = d;
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(V) * d);
    std::vector<std::vector<int>> adj(V);
    auto adjacent = [&adj](int u, int w) {
        const auto& nb = adj[u];
        return std::find(nb.begin(), nb.end(), w) != nb.end();
    };

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        stubs.clear();
        for (int v = 0; v < V; ++v) stubs.insert(stubs.end(), d, v);
        g.edges.clear();
        for (auto& a : adj) a.clear();
        bool stuck = false;
        int consecutive_rejects = 0;
        while (!stubs.empty()) {
            std::size_t n = stubs.size();
            const std::size_t p1 = detail::bounded(rng, n);
            std::swap(stubs[p1], stubs[n - 1]);
            const std::size_t p2 = detail::bounded(rng, n - 1);
            std::swap(stubs[p2], stubs[n - 2]);
            const int u = stubs[n - 1], w = stubs[n - 2];
            if (u == w || adjacent(u, w)) {
                if (++consecutive_rejects > 64) {
                    // Possibly no valid pair left: check exhaustively.
                    bool any = false;
                    for (std::size_t a = 0; a < n && !any; ++a)
                        for (std::size_t b = a + 1; b < n && !any; ++b)
                            any = stubs[a] != stubs[b] && !adjacent(stubs[a], stubs[b]);
                    if (!any) {
                        stuck = true;
                        break;
                    }
                    consecutive_rejects = 0;
                }
                continue;
            }
            consecutive_rejects = 0;
            stubs.resize(n - 2);
            adj[u].push_back(w);
            adj[w].push_back(u);
            g.edges.emplace_back(std::min(u, w), std::max(u, w));
        }
        if (stuck) continue;
        if (!detail::is_connected(V, adj)) continue;
        std::sort(g.edges.begin(), g.edges.end());
        return g;
    }
    throw GenerationError("no simple connected matching after " +
                          std::to_string(max_attempts) + " attempts (V=" +
                          std::to_string(V) + ", d=" + std::to_string(d) + ")");
}

// Text format: header "V d", then V*d/2 lines "i j" with i < j.
// Lines starting with '#' are ignored.
inline void serialize_graph(const RegularGraph& g, std::ostream& os) {
    os << g.V << ' ' << g.d << '\n';
    auto edges = g.edges;
    std::sort(edges.begin(), edges.end());
    for (auto [i, j] : edges) os << i << ' ' << j << '\n';
}

inline std::string serialize_graph(const RegularGraph& g) {
    std::ostringstream os;
    serialize_graph(g, os);
    return os.str();
}

inline RegularGraph load_graph(std::istream& is) {
    RegularGraph g;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    long long expected_edges = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> g.V >> g.d)) throw ParseError(line_no, "expected header 'V d'");
            if (g.V <= 0 || g.d <= 0) throw ParseError(line_no, "V and d must be positive");
            if ((static_cast<long long>(g.V) * g.d) % 2 != 0)
                throw ParseError(line_no, "V*d is odd");
            expected_edges = static_cast<long long>(g.V) * g.d / 2;
            have_header = true;
            continue;
        }
        int i = 0, j = 0;
        if (!(ls >> i >> j)) throw ParseError(line_no, "expected edge 'i j'");
        if (i < 0 || j < 0 || i >= g.V || j >= g.V)
            throw ParseError(line_no, "vertex label out of range");
        if (i >= j) throw ParseError(line_no, "edges must satisfy i < j");
        g.edges.emplace_back(i, j);
        if (static_cast<long long>(g.edges.size()) > expected_edges)
            throw ParseError(line_no, "more than V*d/2 edges");
    }
    if (!have_header) throw ParseError(line_no, "missing header");
    if (static_cast<long long>(g.edges.size()) != expected_edges)
        throw ParseError(line_no, "edge count " + std::to_string(g.edges.size()) +
                                      " does not equal V*d/2 = " + std::to_string(expected_edges));
    std::sort(g.edges.begin(), g.edges.end());
    if (!check_regular_simple_connected(g))
        throw std::invalid_argument("graph violates the d-regular simple connected invariants");
    return g;
}

inline RegularGraph load_graph(const std::string& text) {
    std::istringstream is(text);
    return load_graph(is);
}

}  // namespace nbspec
