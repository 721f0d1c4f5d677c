// Louvain modularity maximization (resolution 1) for unweighted graphs.
#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "commform/errors.hpp"
#include "commform/metrics.hpp"
#include "commform/rng.hpp"

namespace commform {

namespace {

// A_ij weights; self[i] holds A_ii (twice the internal edge weight).
struct LevelGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
    std::vector<double> self;
    std::vector<double> strength;
    double total = 0.0;  // sum of strengths (2m)

    std::size_t size() const { return adj.size(); }
};

LevelGraph from_network(const NetworkState& g) {
    LevelGraph lg;
    lg.adj.resize(g.size());
    lg.self.assign(g.size(), 0.0);
    lg.strength.assign(g.size(), 0.0);
    for (AgentId u = 0; u < g.size(); ++u) {
        g.for_each_neighbor(u, [&](AgentId v) { lg.adj[u].emplace_back(v, 1.0); });
        lg.strength[u] = static_cast<double>(g.degree_unchecked(u));
        lg.total += lg.strength[u];
    }
    return lg;
}

// One round of local moving. Returns true if any node changed community.
bool local_moving(const LevelGraph& lg, std::vector<std::uint32_t>& comm, std::uint64_t seed) {
    const std::size_t n = lg.size();
    std::vector<double> tot(lg.strength);
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    SplitMix64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }

    std::vector<double> weight_to(n, 0.0);
    std::vector<std::uint32_t> touched;
    bool any_move = false;
    constexpr double kMinGain = 1e-12;
    for (int pass = 0; pass < 1000; ++pass) {
        bool moved = false;
        for (std::uint32_t i : order) {
            const std::uint32_t own = comm[i];
            const double k_i = lg.strength[i];
            touched.clear();
            for (const auto& [j, w] : lg.adj[i]) {
                const std::uint32_t c = comm[j];
                if (weight_to[c] == 0.0) {
                    touched.push_back(c);
                }
                weight_to[c] += w;
            }
            tot[own] -= k_i;
            std::uint32_t best = own;
            double best_gain = weight_to[own] - tot[own] * k_i / lg.total;
            for (std::uint32_t c : touched) {
                const double gain = weight_to[c] - tot[c] * k_i / lg.total;
                if (gain > best_gain + kMinGain) {
                    best_gain = gain;
                    best = c;
                }
            }
            tot[best] += k_i;
            for (std::uint32_t c : touched) {
                weight_to[c] = 0.0;
            }
            if (best != own) {
                comm[i] = best;
                moved = true;
            }
        }
        if (!moved) {
            break;
        }
        any_move = true;
    }
    return any_move;
}

// Relabels comm densely in order of first appearance; returns the count.
std::uint32_t renumber(std::vector<std::uint32_t>& comm) {
    std::unordered_map<std::uint32_t, std::uint32_t> ids;
    for (auto& c : comm) {
        auto [it, inserted] = ids.try_emplace(c, static_cast<std::uint32_t>(ids.size()));
        c = it->second;
    }
    return static_cast<std::uint32_t>(ids.size());
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<std::uint32_t>& comm,
                     std::uint32_t count) {
    LevelGraph out;
    out.adj.resize(count);
    out.self.assign(count, 0.0);
    out.strength.assign(count, 0.0);
    out.total = lg.total;
    std::vector<std::unordered_map<std::uint32_t, double>> links(count);
    for (std::uint32_t i = 0; i < lg.size(); ++i) {
        const std::uint32_t ci = comm[i];
        out.strength[ci] += lg.strength[i];
        out.self[ci] += lg.self[i];
        for (const auto& [j, w] : lg.adj[i]) {
            const std::uint32_t cj = comm[j];
            if (ci == cj) {
                out.self[ci] += w;
            } else {
                links[ci][cj] += w;
            }
        }
    }
    for (std::uint32_t c = 0; c < count; ++c) {
        out.adj[c].assign(links[c].begin(), links[c].end());
        std::sort(out.adj[c].begin(), out.adj[c].end());
    }
    return out;
}

} // namespace

std::vector<std::uint32_t> louvain_partition(const NetworkState& g, std::uint64_t seed) {
    const std::size_t n = g.size();
    std::vector<std::uint32_t> labels(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        labels[i] = i;
    }
    if (g.edge_count() == 0) {
        return labels;
    }
    LevelGraph lg = from_network(g);
    for (std::uint64_t level = 0; level < 64; ++level) {
        std::vector<std::uint32_t> comm(lg.size());
        for (std::uint32_t i = 0; i < lg.size(); ++i) {
            comm[i] = i;
        }
        const bool moved = local_moving(lg, comm, hash_combine(seed, level));
        const std::uint32_t count = renumber(comm);
        for (auto& l : labels) {
            l = comm[l];
        }
        if (!moved || count == lg.size()) {
            break;
        }
        lg = aggregate(lg, comm, count);
    }
    renumber(labels);
    return labels;
}

double modularity(const NetworkState& g, std::span<const std::uint32_t> labels) {
    if (labels.size() != g.size()) {
        throw ContractError("label vector does not match the vertex count");
    }
    if (g.edge_count() == 0) {
        return 0.0;
    }
    const double m2 = 2.0 * static_cast<double>(g.edge_count());
    std::unordered_map<std::uint32_t, double> inside;
    std::unordered_map<std::uint32_t, double> tot;
    for (AgentId u = 0; u < g.size(); ++u) {
        tot[labels[u]] += static_cast<double>(g.degree_unchecked(u));
        g.for_each_neighbor(u, [&](AgentId v) {
            if (labels[u] == labels[v]) {
                inside[labels[u]] += 1.0;
            }
        });
    }
    double q = 0.0;
    for (const auto& [c, t] : tot) {
        const double in = inside.count(c) ? inside.at(c) : 0.0;
        q += in / m2 - (t / m2) * (t / m2);
    }
    return q;
}

} // namespace commform
