#include "commform/attributed.hpp"

#include "commform/errors.hpp"

namespace commform {

void AttributedNetwork::validate() const {
    if (types.size() != graph.size()) {
        throw ContractError("type vector does not match the vertex count");
    }
    if (strategies && strategies->size() != graph.size()) {
        throw ContractError("strategy vector does not match the vertex count");
    }
}

AttributedNetwork to_network(const NetworkState& g, std::span<const AgentProfile> profiles,
                             std::string provenance) {
    if (profiles.size() != g.size()) {
        throw ContractError("profile vector does not match the vertex count");
    }
    AttributedNetwork net;
    net.graph = g;
    net.types.reserve(profiles.size());
    std::vector<Strategy> strategies;
    strategies.reserve(profiles.size());
    for (const auto& p : profiles) {
        net.types.push_back(p.type);
        strategies.push_back(p.strategy);
    }
    net.strategies = std::move(strategies);
    net.provenance = std::move(provenance);
    return net;
}

} // namespace commform
