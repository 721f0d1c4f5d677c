#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commform/graph.hpp"
#include "commform/utility.hpp"

namespace commform {

/// A graph with one attribute type per node and, for simulated networks,
/// the strategy each agent played.
struct AttributedNetwork {
    NetworkState graph{0};
    std::vector<AttributeType> types;
    std::optional<std::vector<Strategy>> strategies;
    std::string provenance;

    std::size_t size() const noexcept { return graph.size(); }

    /// Throws ContractError when the per-node vectors do not match the graph.
    void validate() const;

    friend bool operator==(const AttributedNetwork& a, const AttributedNetwork& b) {
        return a.graph == b.graph && a.types == b.types && a.strategies == b.strategies;
    }
};

/// Networks loaded from survey data.
using ObservedNetwork = AttributedNetwork;

AttributedNetwork to_network(const NetworkState& g, std::span<const AgentProfile> profiles,
                             std::string provenance = {});

} // namespace commform
