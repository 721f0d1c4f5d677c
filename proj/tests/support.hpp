#pragma once
// Shared fixtures and brute-force oracles. Oracles work on a plain adjacency
// matrix and never call into the library's query code.

#include <algorithm>
#include <bit>
#include <limits>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "commform/graph.hpp"
#include "commform/utility.hpp"

namespace testing {

using commform::AgentId;
using commform::AgentProfile;
using commform::AttributeType;
using commform::Edge;
using commform::NetworkState;

using Matrix = std::vector<std::vector<bool>>;

inline NetworkState graph_of(std::size_t n, std::initializer_list<std::pair<AgentId, AgentId>> pairs) {
    std::vector<Edge> edges;
    for (auto [a, b] : pairs) {
        edges.push_back(commform::make_edge(a, b));
    }
    return NetworkState::from_edges(n, edges);
}

inline NetworkState random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<Edge> edges;
    for (AgentId a = 0; a < n; ++a) {
        for (AgentId b = a + 1; b < n; ++b) {
            if (coin(rng)) {
                edges.push_back({a, b});
            }
        }
    }
    return NetworkState::from_edges(n, edges);
}

inline Matrix matrix_of(const NetworkState& g) {
    Matrix m(g.size(), std::vector<bool>(g.size(), false));
    for (const Edge& e : g.edges()) {
        m[e.u][e.v] = m[e.v][e.u] = true;
    }
    return m;
}

inline std::vector<AgentId> nbrs(const Matrix& m, AgentId v) {
    std::vector<AgentId> out;
    for (AgentId u = 0; u < m.size(); ++u) {
        if (m[v][u]) {
            out.push_back(u);
        }
    }
    return out;
}

inline std::size_t bf_triangles_at(const Matrix& m, AgentId v) {
    const auto nv = nbrs(m, v);
    std::size_t count = 0;
    for (std::size_t i = 0; i < nv.size(); ++i) {
        for (std::size_t j = i + 1; j < nv.size(); ++j) {
            count += m[nv[i]][nv[j]] ? 1 : 0;
        }
    }
    return count;
}

// Size-1 components of the induced neighborhood, found by flood fill.
inline std::size_t bf_isolated(const Matrix& m, AgentId v) {
    const auto nv = nbrs(m, v);
    std::vector<int> comp(nv.size(), -1);
    std::vector<std::size_t> sizes;
    for (std::size_t s = 0; s < nv.size(); ++s) {
        if (comp[s] >= 0) {
            continue;
        }
        const int id = static_cast<int>(sizes.size());
        sizes.push_back(0);
        std::vector<std::size_t> stack{s};
        comp[s] = id;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++sizes[id];
            for (std::size_t j = 0; j < nv.size(); ++j) {
                if (comp[j] < 0 && m[nv[i]][nv[j]]) {
                    comp[j] = id;
                    stack.push_back(j);
                }
            }
        }
    }
    return static_cast<std::size_t>(std::count(sizes.begin(), sizes.end(), std::size_t{1}));
}

inline std::size_t bf_triangle_count(const Matrix& m) {
    std::size_t count = 0;
    const std::size_t n = m.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            for (std::size_t c = b + 1; c < n; ++c) {
                count += (m[a][b] && m[b][c] && m[a][c]) ? 1 : 0;
            }
        }
    }
    return count;
}

/// Exact rational with a positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t n, std::int64_t d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        return {n / (g ? g : 1), d / (g ? g : 1)};
    }
    friend Rational operator+(Rational a, Rational b) {
        return make(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a, Rational b) {
        return make(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend bool operator==(const Rational&, const Rational&) = default;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Table of the four strategy utilities, recomputed from the adjacency matrix.
inline Rational bf_utility(const Matrix& m, const std::vector<AgentProfile>& profiles, AgentId v,
                           std::int64_t kappa, commform::Ablation ablation) {
    using commform::AttributeStrategy;
    using commform::StructureStrategy;
    const auto nv = nbrs(m, v);
    const auto& p = profiles[v];
    Rational attr;
    if (ablation != commform::Ablation::IgnoreAttribute) {
        std::int64_t same = 0;
        for (AgentId u : nv) {
            same += profiles[u].type == p.type ? 1 : 0;
        }
        const std::int64_t hits = p.strategy.attribute == AttributeStrategy::Homophily
                                      ? same
                                      : static_cast<std::int64_t>(nv.size()) - same;
        attr = Rational::make(hits, kappa);
    }
    Rational structural;
    if (ablation != commform::Ablation::IgnoreStructure) {
        if (p.strategy.structure == StructureStrategy::Embedded) {
            structural = Rational::make(static_cast<std::int64_t>(bf_triangles_at(m, v)),
                                        kappa * (kappa - 1) / 2);
        } else {
            structural = Rational::make(static_cast<std::int64_t>(bf_isolated(m, v)), kappa);
        }
    }
    return attr + structural;
}

inline std::vector<AgentProfile> random_profiles(std::size_t n, std::mt19937_64& rng) {
    std::vector<AgentProfile> out(n);
    for (AgentId v = 0; v < n; ++v) {
        out[v].id = v;
        out[v].type = static_cast<AttributeType>(rng() & 1u);
        out[v].strategy.attribute = static_cast<commform::AttributeStrategy>((rng() >> 1) & 1u);
        out[v].strategy.structure = static_cast<commform::StructureStrategy>((rng() >> 2) & 1u);
    }
    return out;
}

inline std::vector<AgentProfile> uniform_profiles(std::vector<AttributeType> types,
                                                  commform::Strategy s) {
    std::vector<AgentProfile> out(types.size());
    for (AgentId v = 0; v < types.size(); ++v) {
        out[v] = {v, types[v], s};
    }
    return out;
}

// Minimum over the basic feasible solutions of the transportation polytope.
// Each basis is a spanning tree of the complete bipartite graph; its flows
// follow by peeling leaves.
inline double enumerate_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                           const std::vector<double>& cost) {
    const std::size_t m = supply.size(), k = demand.size(), nodes = m + k;
    const std::size_t arcs = m * k;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << arcs); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != nodes - 1) {
            continue;
        }
        std::vector<std::size_t> parent(nodes);
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto find = [&](std::size_t x) {
            while (parent[x] != x) {
                x = parent[x] = parent[parent[x]];
            }
            return x;
        };
        bool tree = true;
        for (std::size_t a = 0; a < arcs && tree; ++a) {
            if (mask >> a & 1u) {
                const auto r1 = find(a / k), r2 = find(m + a % k);
                tree = r1 != r2;
                parent[r1] = r2;
            }
        }
        if (!tree) {
            continue;
        }
        std::vector<double> left(nodes);
        for (std::size_t i = 0; i < m; ++i) left[i] = supply[i];
        for (std::size_t j = 0; j < k; ++j) left[m + j] = demand[j];
        std::uint32_t open = mask;
        std::vector<double> flow(arcs, 0.0);
        while (open != 0) {
            bool peeled = false;
            for (std::size_t node = 0; node < nodes && !peeled; ++node) {
                std::size_t incident = 0, arc = 0;
                for (std::size_t a = 0; a < arcs; ++a) {
                    if ((open >> a & 1u) && (a / k == node || m + a % k == node)) {
                        ++incident;
                        arc = a;
                    }
                }
                if (incident != 1) {
                    continue;
                }
                flow[arc] = left[node];
                left[arc / k] -= flow[arc];
                left[m + arc % k] -= flow[arc];
                open &= ~(1u << arc);
                peeled = true;
            }
        }
        double total = 0.0;
        bool feasible = true;
        for (std::size_t a = 0; a < arcs; ++a) {
            feasible = feasible && flow[a] >= -1e-12;
            total += flow[a] * cost[a];
        }
        if (feasible) {
            best = std::min(best, total);
        }
    }
    return best;
}

} // namespace testing
