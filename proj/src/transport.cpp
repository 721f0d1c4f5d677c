#include "commform/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "commform/errors.hpp"
#include "commform/kernels.hpp"

namespace commform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Residual masses below this are treated as exhausted.
constexpr double kMassTol = 1e-13;

} // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost) {
    const std::size_t m = supply.size();
    const std::size_t k = demand.size();
    if (cost.size() != m * k) {
        throw ContractError("cost matrix size does not match supply x demand");
    }
    auto negative = [](double x) { return !(x >= 0.0); };
    if (std::any_of(supply.begin(), supply.end(), negative) ||
        std::any_of(demand.begin(), demand.end(), negative) ||
        std::any_of(cost.begin(), cost.end(), negative)) {
        throw ContractError("transport inputs must be non-negative");
    }
    const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
    if (std::abs(total_supply - total_demand) > 1e-9) {
        throw ContractError("supply and demand totals differ");
    }

    TransportPlan plan;
    plan.flow.assign(m * k, 0.0);
    if (m == 0 || k == 0) {
        return plan;
    }

    std::vector<double> left_rem(supply.begin(), supply.end());
    std::vector<double> right_rem(demand.begin(), demand.end());
    std::vector<double> pot_left(m, 0.0);
    std::vector<double> pot_right(k, kInf);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            pot_right[j] = std::min(pot_right[j], cost[i * k + j]);
        }
    }

    std::vector<double> dist_left(m);
    std::vector<double> dist_right(k);
    std::vector<double> work_right(k);  // -inf once settled
    std::vector<char> settled_left(m);
    std::vector<char> settled_right(k);
    std::vector<std::int32_t> parent_left(m);   // right index feeding a left node
    std::vector<std::int32_t> parent_right(k);  // left index feeding a right node
    const auto& kern = kernels::active();

    double remaining = total_supply;
    while (remaining > kMassTol) {
        std::fill(settled_left.begin(), settled_left.end(), 0);
        std::fill(settled_right.begin(), settled_right.end(), 0);
        std::fill(work_right.begin(), work_right.end(), kInf);
        std::fill(parent_right.begin(), parent_right.end(), -1);
        std::fill(parent_left.begin(), parent_left.end(), -1);
        for (std::size_t i = 0; i < m; ++i) {
            dist_left[i] = left_rem[i] > kMassTol ? 0.0 : kInf;
        }

        std::int64_t target = -1;
        double target_dist = kInf;
        for (;;) {
            // Next unsettled node with the smallest tentative distance.
            double best = kInf;
            std::int64_t pick = -1;
            bool pick_right = false;
            for (std::size_t i = 0; i < m; ++i) {
                if (!settled_left[i] && dist_left[i] < best) {
                    best = dist_left[i];
                    pick = static_cast<std::int64_t>(i);
                    pick_right = false;
                }
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (!settled_right[j] && work_right[j] < best) {
                    best = work_right[j];
                    pick = static_cast<std::int64_t>(j);
                    pick_right = true;
                }
            }
            if (pick < 0) {
                break;
            }
            if (pick_right) {
                const auto j = static_cast<std::size_t>(pick);
                settled_right[j] = 1;
                dist_right[j] = best;
                work_right[j] = -kInf;
                if (right_rem[j] > kMassTol) {
                    target = pick;
                    target_dist = best;
                    break;
                }
                // Reverse residual arcs j -> i carry existing flow.
                for (std::size_t i = 0; i < m; ++i) {
                    if (settled_left[i] || plan.flow[i * k + j] <= 0.0) {
                        continue;
                    }
                    const double reduced = std::max(
                        0.0, pot_right[j] - cost[i * k + j] - pot_left[i]);
                    const double cand = best + reduced;
                    if (cand < dist_left[i]) {
                        dist_left[i] = cand;
                        parent_left[i] = static_cast<std::int32_t>(j);
                    }
                }
            } else {
                const auto i = static_cast<std::size_t>(pick);
                settled_left[i] = 1;
                kern.relax_row(cost.data() + i * k, pot_right.data(), best + pot_left[i],
                               work_right.data(), parent_right.data(), static_cast<std::int32_t>(i),
                               k);
            }
        }
        if (target < 0) {
            break;  // remaining mass is rounding residue
        }

        // Potentials: add min(dist, D) to every node.
        for (std::size_t i = 0; i < m; ++i) {
            pot_left[i] += settled_left[i] ? std::min(dist_left[i], target_dist) : target_dist;
        }
        for (std::size_t j = 0; j < k; ++j) {
            pot_right[j] += settled_right[j] ? std::min(dist_right[j], target_dist) : target_dist;
        }

        // Walk back to a source, recording the bottleneck.
        const auto t = static_cast<std::size_t>(target);
        double push = right_rem[t];
        std::size_t j = t;
        std::size_t source = 0;
        for (;;) {
            const auto i = static_cast<std::size_t>(parent_right[j]);
            if (parent_left[i] < 0) {
                source = i;
                break;
            }
            const auto prev_j = static_cast<std::size_t>(parent_left[i]);
            push = std::min(push, plan.flow[i * k + prev_j]);
            j = prev_j;
        }
        push = std::min(push, left_rem[source]);

        j = t;
        for (;;) {
            const auto i = static_cast<std::size_t>(parent_right[j]);
            plan.flow[i * k + j] += push;
            if (parent_left[i] < 0) {
                break;
            }
            const auto prev_j = static_cast<std::size_t>(parent_left[i]);
            plan.flow[i * k + prev_j] -= push;
            if (plan.flow[i * k + prev_j] < kMassTol) {
                plan.flow[i * k + prev_j] = 0.0;
            }
            j = prev_j;
        }
        left_rem[source] -= push;
        right_rem[t] -= push;
        remaining -= push;
    }

    double total = 0.0;
    for (std::size_t idx = 0; idx < m * k; ++idx) {
        total += plan.flow[idx] * cost[idx];
    }
    plan.cost = total;
    return plan;
}

} // namespace commform
