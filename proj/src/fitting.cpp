#include "commform/fitting.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>
#include <tuple>

#include "commform/errors.hpp"
#include "commform/parallel.hpp"

namespace commform {

std::vector<double> uniform_grid(std::size_t divisions) {
    if (divisions == 0) {
        throw ConfigError("grid needs at least one division");
    }
    std::vector<double> out(divisions + 1);
    for (std::size_t i = 0; i <= divisions; ++i) {
        out[i] = static_cast<double>(i) / static_cast<double>(divisions);
    }
    return out;
}

void GridSpec::validate() const {
    auto check_axis = [](const std::vector<double>& axis, const char* name) {
        if (axis.empty()) {
            throw ConfigError(std::string(name) + " grid is empty");
        }
        for (double x : axis) {
            if (!(x >= 0.0 && x <= 1.0)) {
                throw ConfigError(std::string(name) + " grid values must lie in [0, 1]");
            }
        }
    };
    if (kappa_values.empty()) {
        throw ConfigError("kappa grid is empty");
    }
    for (std::size_t k : kappa_values) {
        if (k < 1) {
            throw ConfigError("kappa values must be at least 1");
        }
    }
    check_axis(coarse_grid, "coarse");
    check_axis(alpha_grid, "alpha");
    check_axis(beta_grid, "beta");
    if (runs_per_cell == 0) {
        throw ConfigError("runs per cell must be at least 1");
    }
    if (!(epsilon > 0.0)) {
        throw ConfigError("epsilon must be positive");
    }
    if (max_iters == 0) {
        throw ConfigError("max iterations must be at least 1");
    }
}

std::uint64_t cell_seed(std::uint64_t campaign_seed, std::size_t kappa, double alpha,
                        double beta) noexcept {
    std::uint64_t h = hash_combine(mix64(campaign_seed), kappa);
    h = hash_combine(h, std::bit_cast<std::uint64_t>(alpha));
    return hash_combine(h, std::bit_cast<std::uint64_t>(beta));
}

std::array<double, 2> empirical_omega(std::span<const AttributeType> types) {
    if (types.empty()) {
        return {0.5, 0.5};
    }
    std::size_t zeros = 0;
    for (auto t : types) {
        zeros += t == AttributeType::Zero ? 1 : 0;
    }
    const double p0 = static_cast<double>(zeros) / static_cast<double>(types.size());
    return {p0, 1.0 - p0};
}

CellEvaluation evaluate_cell(const NetworkSummary& observed, std::size_t observed_n,
                             const ModelParams& params, std::size_t runs,
                             std::uint64_t base_seed) {
    if (observed_n < 2) {
        throw ContractError("observed network needs at least 2 nodes");
    }
    if (params.n != observed_n) {
        throw ContractError("model size does not match the observed network");
    }
    if (runs == 0) {
        throw ContractError("a cell needs at least one run");
    }
    CellEvaluation out;
    out.run_losses.reserve(runs);
    SimulationOptions options;
    options.record_trace = false;
    double sum = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
        ModelParams p = params;
        p.seed = base_seed + r;
        const SimulationResult sim = simulate(p, options);
        const auto types = types_of(sim.profiles);
        const double l = loss(observed, summarize(sim.final_state, types)).total;
        out.run_losses.push_back(l);
        sum += l;
    }
    out.mean_loss = sum / static_cast<double>(runs);
    return out;
}

CellEvaluation evaluate_cell(const ObservedNetwork& observed, const ModelParams& params,
                             std::size_t runs, std::uint64_t base_seed) {
    observed.validate();
    return evaluate_cell(summarize(observed.graph, observed.types), observed.size(), params, runs,
                         base_seed);
}

namespace {

struct Target {
    NetworkSummary summary;
    std::size_t n = 0;
    std::array<double, 2> omega{};
};

struct Task {
    std::size_t target = 0;
    std::size_t kappa = 0;
    double alpha = 0.0;
    double beta = 0.0;
};

Target make_target(const ObservedNetwork& obs) {
    obs.validate();
    if (obs.size() < 2) {
        throw ContractError("observed network needs at least 2 nodes");
    }
    return {summarize(obs.graph, obs.types), obs.size(), empirical_omega(obs.types)};
}

// Evaluates every task; result i belongs to task i whatever the completion order.
std::vector<CellResult> run_tasks(const std::vector<Target>& targets, const std::vector<Task>& tasks,
                                  const GridSpec& grid, Ablation ablation) {
    std::vector<CellResult> out(tasks.size());
    const std::size_t workers = grid.workers == 0 ? default_workers() : grid.workers;
    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        const Task& task = tasks[i];
        const Target& t = targets[task.target];
        ModelParams p;
        p.n = t.n;
        p.kappa = task.kappa;
        p.alpha = task.alpha;
        p.beta = task.beta;
        p.omega = t.omega;
        p.exact_type_counts = grid.exact_type_counts;
        p.epsilon = grid.epsilon;
        p.max_iters = grid.max_iters;
        p.ablation = ablation;
        CellResult& cell = out[i];
        cell.kappa = task.kappa;
        cell.alpha = task.alpha;
        cell.beta = task.beta;
        cell.base_seed = cell_seed(grid.campaign_seed, task.kappa, task.alpha, task.beta);
        CellEvaluation ev = evaluate_cell(t.summary, t.n, p, grid.runs_per_cell, cell.base_seed);
        cell.mean_loss = ev.mean_loss;
        cell.run_losses = std::move(ev.run_losses);
    });
    return out;
}

bool better(const CellResult& a, const CellResult& b) {
    return std::tie(a.mean_loss, a.alpha, a.beta) < std::tie(b.mean_loss, b.alpha, b.beta);
}

const CellResult& best_of(std::span<const CellResult> cells) {
    const CellResult* best = &cells.front();
    for (const auto& c : cells) {
        if (better(c, *best)) {
            best = &c;
        }
    }
    return *best;
}

std::vector<Task> square(std::size_t target, std::size_t kappa, const std::vector<double>& a_axis,
                         const std::vector<double>& b_axis) {
    std::vector<Task> tasks;
    tasks.reserve(a_axis.size() * b_axis.size());
    for (double a : a_axis) {
        for (double b : b_axis) {
            tasks.push_back({target, kappa, a, b});
        }
    }
    return tasks;
}

using CellKey = std::tuple<std::size_t, std::size_t, double, double>;

// Phase 1 for all targets. Returns per-target cells and the selected kappa.
std::pair<std::vector<std::vector<CellResult>>, std::size_t>
coarse_phase(const std::vector<Target>& targets, const GridSpec& grid, Ablation ablation) {
    std::vector<std::vector<CellResult>> per_target(targets.size());
    if (grid.kappa_values.size() == 1) {
        return {per_target, grid.kappa_values.front()};
    }
    std::vector<Task> tasks;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        for (std::size_t k : grid.kappa_values) {
            auto sq = square(t, k, grid.coarse_grid, grid.coarse_grid);
            tasks.insert(tasks.end(), sq.begin(), sq.end());
        }
    }
    auto cells = run_tasks(targets, tasks, grid, ablation);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        per_target[tasks[i].target].push_back(std::move(cells[i]));
    }

    std::size_t chosen = 0;
    double chosen_score = std::numeric_limits<double>::infinity();
    for (std::size_t k : grid.kappa_values) {
        double score = 0.0;
        for (const auto& cells_t : per_target) {
            std::vector<CellResult> at_k;
            for (const auto& c : cells_t) {
                if (c.kappa == k) {
                    at_k.push_back(c);
                }
            }
            score += best_of(at_k).mean_loss;
        }
        score /= static_cast<double>(targets.size());
        if (score < chosen_score || (score == chosen_score && k < chosen)) {
            chosen_score = score;
            chosen = k;
        }
    }
    return {per_target, chosen};
}

FitResult fine_phase(const Target& target, std::size_t target_index,
                     const std::vector<Target>& targets, std::vector<CellResult> coarse,
                     std::size_t kappa, const GridSpec& grid, Ablation ablation,
                     const std::string& provenance) {
    // Cells already evaluated in phase 1 carry identical seeds, so reuse them.
    std::map<CellKey, const CellResult*> cache;
    for (const auto& c : coarse) {
        cache[{target_index, c.kappa, c.alpha, c.beta}] = &c;
    }
    std::vector<Task> todo;
    std::vector<CellResult> fine(grid.alpha_grid.size() * grid.beta_grid.size());
    std::vector<std::size_t> slot;
    std::size_t idx = 0;
    for (double a : grid.alpha_grid) {
        for (double b : grid.beta_grid) {
            auto it = cache.find({target_index, kappa, a, b});
            if (it != cache.end()) {
                fine[idx] = *it->second;
            } else {
                todo.push_back({target_index, kappa, a, b});
                slot.push_back(idx);
            }
            ++idx;
        }
    }
    auto computed = run_tasks(targets, todo, grid, ablation);
    for (std::size_t i = 0; i < todo.size(); ++i) {
        fine[slot[i]] = std::move(computed[i]);
    }

    FitResult r;
    const CellResult& best = best_of(fine);
    r.best_kappa = best.kappa;
    r.best_alpha = best.alpha;
    r.best_beta = best.beta;
    r.best_loss = best.mean_loss;
    r.ablation = ablation;
    r.provenance = provenance;
    r.omega = target.omega;
    r.grid = grid;
    r.coarse = std::move(coarse);
    r.fine = std::move(fine);
    return r;
}

} // namespace

FitResult fit(const ObservedNetwork& observed, const GridSpec& grid, Ablation ablation) {
    return fit_shared_kappa(std::span<const ObservedNetwork>(&observed, 1), grid, ablation).front();
}

std::vector<FitResult> fit_shared_kappa(std::span<const ObservedNetwork> observed,
                                        const GridSpec& grid, Ablation ablation) {
    grid.validate();
    if (observed.empty()) {
        throw ContractError("no observed networks to fit");
    }
    std::vector<Target> targets;
    targets.reserve(observed.size());
    for (const auto& obs : observed) {
        targets.push_back(make_target(obs));
    }
    auto [coarse, kappa] = coarse_phase(targets, grid, ablation);
    std::vector<FitResult> out;
    out.reserve(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        out.push_back(fine_phase(targets[t], t, targets, std::move(coarse[t]), kappa, grid,
                                 ablation, observed[t].provenance));
    }
    return out;
}

} // namespace commform
