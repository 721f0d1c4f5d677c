#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace commform {

struct TransportPlan {
    double cost = 0.0;
    /// flow[i * sinks + j]
    std::vector<double> flow;
};

/// Exact min-cost transportation between `supply` and `demand` (equal
/// totals) over a dense row-major cost matrix with non-negative entries.
/// Successive shortest paths with Dijkstra on reduced costs.
/// Throws ContractError when totals differ by more than 1e-9 or inputs are
/// negative / mis-sized.
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost);

} // namespace commform
