#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "commform/graph.hpp"
#include "commform/utility.hpp"

namespace commform {

/// Network statistics recorded per iteration and reported per run.
struct MetricsRecord {
    std::uint64_t iteration = 0;
    std::size_t triangle_count = 0;
    double global_assortativity = 0.0;
    std::size_t stable_triads = 0;
    double avg_utility = 0.0;
    std::size_t community_count = 0;
    std::size_t edge_count = 0;

    friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Share of same-type neighbors, N^τ(v)/δ(v). Isolated vertices score 0.5.
double vertex_assortativity(const NetworkState& g, std::span<const AttributeType> types, AgentId v);

/// Δ_v / (δ(v)(δ(v) - 1)) with Δ_v counted over unordered pairs, so the
/// maximum is 0.5. Zero when δ(v) < 2.
double vertex_clustering(const NetworkState& g, AgentId v);

/// Newman's categorical assortativity over the edge type-mixing matrix.
/// Returns 0 for an edgeless graph and 1 when every edge endpoint shares a
/// single type (the coefficient's 0/0 case, where all edges are within-type).
double global_assortativity(const NetworkState& g, std::span<const AttributeType> types);

std::size_t triangle_count(const NetworkState& g);

/// Louvain (resolution 1) community labels, dense from 0. Visitation order is
/// a seeded shuffle; an edgeless graph yields n singletons.
std::vector<std::uint32_t> louvain_partition(const NetworkState& g, std::uint64_t seed);

/// Newman modularity of a labeling at resolution 1.
double modularity(const NetworkState& g, std::span<const std::uint32_t> labels);

std::size_t community_count(const NetworkState& g, std::uint64_t seed);

double average_utility(const NetworkState& g, const UtilityModel& model);
double average_utility(const NetworkState& g, std::span<const AgentProfile> profiles,
                       std::size_t kappa, Ablation ablation);

std::vector<AttributeType> types_of(std::span<const AgentProfile> profiles);

/// Full record for one state; utilities use the model's normalizing kappa.
MetricsRecord compute_metrics(const NetworkState& g, const UtilityModel& model,
                              std::uint64_t community_seed);

} // namespace commform
