#pragma once
// Grid-search calibration of (kappa, alpha, beta) against observed networks.
//
// Phase 1 crosses a coarse (alpha, beta) grid with every candidate kappa and
// keeps the kappa whose best cell is lowest. Phase 2 searches a fine grid at
// that kappa. Each cell simulates `runs_per_cell` networks and averages
// their losses against the observation.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "commform/attributed.hpp"
#include "commform/engine.hpp"
#include "commform/evaluation.hpp"

namespace commform {

/// {0, 1/d, 2/d, ..., 1}.
std::vector<double> uniform_grid(std::size_t divisions);

struct GridSpec {
    std::vector<std::size_t> kappa_values{5, 10, 15};
    std::vector<double> coarse_grid = uniform_grid(8);
    std::vector<double> alpha_grid = uniform_grid(16);
    std::vector<double> beta_grid = uniform_grid(16);
    std::size_t runs_per_cell = 5;
    std::uint64_t campaign_seed = 0;
    std::size_t workers = 1;
    double epsilon = 1e-9;
    std::size_t max_iters = 1000;
    bool exact_type_counts = false;

    /// Throws ConfigError.
    void validate() const;
};

struct CellEvaluation {
    double mean_loss = 0.0;
    std::vector<double> run_losses;
};

/// Runs seeds base_seed .. base_seed + runs - 1 at `params` and averages the
/// loss against `observed`. Throws ContractError if params.n differs from
/// the observed node count or the observation has fewer than 2 nodes.
CellEvaluation evaluate_cell(const ObservedNetwork& observed, const ModelParams& params,
                             std::size_t runs, std::uint64_t base_seed);
CellEvaluation evaluate_cell(const NetworkSummary& observed, std::size_t observed_n,
                             const ModelParams& params, std::size_t runs,
                             std::uint64_t base_seed);

/// Stable per-cell seed; independent of evaluation order.
std::uint64_t cell_seed(std::uint64_t campaign_seed, std::size_t kappa, double alpha,
                        double beta) noexcept;

/// Empirical type frequencies (type 0, type 1).
std::array<double, 2> empirical_omega(std::span<const AttributeType> types);

struct CellResult {
    std::size_t kappa = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t base_seed = 0;
    double mean_loss = 0.0;
    std::vector<double> run_losses;
};

struct FitResult {
    std::size_t best_kappa = 0;
    double best_alpha = 0.0;
    double best_beta = 0.0;
    double best_loss = 0.0;
    Ablation ablation = Ablation::None;
    std::string provenance;
    std::array<double, 2> omega{0.5, 0.5};
    GridSpec grid;
    /// Phase-1 cells, empty when a single kappa is given.
    std::vector<CellResult> coarse;
    /// Phase-2 cells at best_kappa; the best cell is the minimum of these.
    std::vector<CellResult> fine;
};

FitResult fit(const ObservedNetwork& observed, const GridSpec& grid,
              Ablation ablation = Ablation::None);

/// One kappa for all networks, chosen by the mean over networks of each
/// network's best phase-1 loss. Returns one result per network, in order.
std::vector<FitResult> fit_shared_kappa(std::span<const ObservedNetwork> observed,
                                        const GridSpec& grid, Ablation ablation = Ablation::None);

} // namespace commform
