#pragma once
// Comparison of an observed and a simulated attributed network: local
// signature distributions under 1-Wasserstein, plus SMAPE on two global
// statistics.

#include <span>
#include <vector>

#include "commform/graph.hpp"
#include "commform/utility.hpp"

namespace commform {

struct SignaturePoint {
    double assortativity = 0.0;
    double clustering = 0.0;
    double weight = 0.0;

    friend bool operator==(const SignaturePoint&, const SignaturePoint&) = default;
};

/// Weighted (a, c) point set, sorted by coordinates, duplicates merged.
struct LocalSignature {
    std::vector<SignaturePoint> points;

    /// Weights positive and summing to 1 within 1e-9.
    bool normalized() const noexcept;
};

LocalSignature local_signature(const NetworkState& g, std::span<const AttributeType> types);

/// Exact optimal-transport cost under Euclidean ground distance. Throws
/// ContractError unless both inputs are normalized.
double wasserstein1(const LocalSignature& p, const LocalSignature& q);

/// |x - y| / (|x| + |y|), 0 when both are 0.
double smape(double x, double y) noexcept;

struct LossReport {
    double distributional = 0.0;
    double global = 0.0;
    double total = 0.0;
    double smape_triangles = 0.0;
    double smape_assortativity = 0.0;
};

/// Everything the loss needs from one network, computed once.
struct NetworkSummary {
    LocalSignature signature;
    double triangles = 0.0;
    double assortativity = 0.0;
};

NetworkSummary summarize(const NetworkState& g, std::span<const AttributeType> types);

double global_component(const NetworkSummary& a, const NetworkSummary& b) noexcept;
double global_component(const NetworkState& g_obs, const NetworkState& g_sim,
                        std::span<const AttributeType> types_obs,
                        std::span<const AttributeType> types_sim);

LossReport loss(const NetworkSummary& obs, const NetworkSummary& sim);
LossReport loss(const NetworkState& g_obs, const NetworkState& g_sim,
                std::span<const AttributeType> types_obs, std::span<const AttributeType> types_sim);

} // namespace commform
