#pragma once
// Replicated simulations over an (alpha, beta) grid.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "commform/engine.hpp"

namespace commform {

struct SweepSpec {
    std::size_t n = 150;
    std::size_t kappa = 10;
    std::size_t divisions = 8;  ///< grid {0, 1/d, ..., 1} on both axes
    std::size_t replications = 10;
    std::uint64_t campaign_seed = 0;
    std::size_t workers = 1;
    Ablation ablation = Ablation::None;
    double epsilon = 1e-9;
    std::size_t max_iters = 1000;

    /// Throws ConfigError.
    void validate() const;
};

inline constexpr std::array<std::string_view, 6> kSweepMetrics{
    "triangles", "assortativity", "stable_triads", "avg_utility", "communities", "iterations"};

struct SweepCell {
    double alpha = 0.0;
    double beta = 0.0;
    /// Final-state values per replication, indexed like kSweepMetrics.
    std::vector<std::array<double, 6>> runs;
    std::size_t converged = 0;

    double mean(std::size_t metric) const;
};

/// Seed of replication r in a cell is cell_seed(campaign, kappa, alpha, beta) + r.
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

} // namespace commform
