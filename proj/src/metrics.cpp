#include "commform/metrics.hpp"

#include <set>

#include "commform/engine.hpp"
#include "commform/errors.hpp"

namespace commform {

namespace {

void check_types(const NetworkState& g, std::span<const AttributeType> types) {
    if (types.size() != g.size()) {
        throw ContractError("type vector does not match the vertex count");
    }
}

} // namespace

double vertex_assortativity(const NetworkState& g, std::span<const AttributeType> types, AgentId v) {
    g.check_id(v);
    check_types(g, types);
    const std::size_t deg = g.degree_unchecked(v);
    if (deg == 0) {
        return 0.5;
    }
    std::size_t same = 0;
    g.for_each_neighbor(v, [&](AgentId u) { same += types[u] == types[v] ? 1 : 0; });
    return static_cast<double>(same) / static_cast<double>(deg);
}

double vertex_clustering(const NetworkState& g, AgentId v) {
    const std::size_t deg = degree(g, v);
    if (deg < 2) {
        return 0.0;
    }
    return static_cast<double>(triangles_at(g, v)) / static_cast<double>(deg * (deg - 1));
}

double global_assortativity(const NetworkState& g, std::span<const AttributeType> types) {
    check_types(g, types);
    if (g.edge_count() == 0) {
        return 0.0;
    }
    // Symmetric mixing counts: each edge adds to e[tu][tv] and e[tv][tu].
    double e[2][2] = {{0, 0}, {0, 0}};
    for (AgentId u = 0; u < g.size(); ++u) {
        g.for_each_neighbor(u, [&](AgentId v) { e[to_int(types[u])][to_int(types[v])] += 1.0; });
    }
    const double total = 2.0 * static_cast<double>(g.edge_count());
    const double trace = (e[0][0] + e[1][1]) / total;
    const double a0 = (e[0][0] + e[0][1]) / total;
    const double a1 = (e[1][0] + e[1][1]) / total;
    const double sum_ab = a0 * a0 + a1 * a1;
    if (1.0 - sum_ab == 0.0) {
        return 1.0;
    }
    return (trace - sum_ab) / (1.0 - sum_ab);
}

std::size_t triangle_count(const NetworkState& g) {
    std::size_t sum = 0;
    for (AgentId v = 0; v < g.size(); ++v) {
        sum += triangles_at(g, v);
    }
    return sum / 3;
}

std::size_t community_count(const NetworkState& g, std::uint64_t seed) {
    const auto labels = louvain_partition(g, seed);
    return std::set<std::uint32_t>(labels.begin(), labels.end()).size();
}

double average_utility(const NetworkState& g, const UtilityModel& model) {
    if (g.size() == 0) {
        return 0.0;
    }
    double sum = 0.0;
    for (AgentId v = 0; v < g.size(); ++v) {
        sum += model.breakdown(g, v).total;
    }
    return sum / static_cast<double>(g.size());
}

double average_utility(const NetworkState& g, std::span<const AgentProfile> profiles,
                       std::size_t kappa, Ablation ablation) {
    return average_utility(g, UtilityModel(profiles, kappa, ablation));
}

std::vector<AttributeType> types_of(std::span<const AgentProfile> profiles) {
    std::vector<AttributeType> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles) {
        out.push_back(p.type);
    }
    return out;
}

MetricsRecord compute_metrics(const NetworkState& g, const UtilityModel& model,
                              std::uint64_t community_seed) {
    std::vector<AgentProfile> profiles;
    profiles.reserve(g.size());
    for (AgentId v = 0; v < g.size(); ++v) {
        profiles.push_back(model.profile(v));
    }
    const auto types = types_of(profiles);

    MetricsRecord r;
    r.iteration = g.iteration();
    r.triangle_count = triangle_count(g);
    r.global_assortativity = global_assortativity(g, types);
    r.stable_triads = count_stable_triads(g, profiles);
    r.avg_utility = average_utility(g, model);
    r.community_count = community_count(g, community_seed);
    r.edge_count = g.edge_count();
    return r;
}

} // namespace commform
