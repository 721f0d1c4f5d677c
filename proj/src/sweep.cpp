#include "commform/sweep.hpp"

#include "commform/errors.hpp"
#include "commform/fitting.hpp"
#include "commform/parallel.hpp"

namespace commform {

void SweepSpec::validate() const {
    if (divisions == 0) {
        throw ConfigError("sweep needs at least one division");
    }
    if (replications == 0) {
        throw ConfigError("sweep needs at least one replication");
    }
    ModelParams p;
    p.n = n;
    p.kappa = kappa;
    p.epsilon = epsilon;
    p.max_iters = max_iters;
    p.ablation = ablation;
    p.validate();
}

double SweepCell::mean(std::size_t metric) const {
    if (runs.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& r : runs) {
        sum += r[metric];
    }
    return sum / static_cast<double>(runs.size());
}

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto axis = uniform_grid(spec.divisions);
    std::vector<SweepCell> cells;
    for (double a : axis) {
        for (double b : axis) {
            SweepCell c;
            c.alpha = a;
            c.beta = b;
            c.runs.resize(spec.replications);
            cells.push_back(std::move(c));
        }
    }
    std::vector<char> converged(cells.size() * spec.replications, 0);
    SimulationOptions options;
    options.record_trace = false;
    const std::size_t workers = spec.workers == 0 ? default_workers() : spec.workers;
    parallel_for(converged.size(), workers, [&](std::size_t job) {
        SweepCell& cell = cells[job / spec.replications];
        const std::size_t r = job % spec.replications;
        ModelParams p;
        p.n = spec.n;
        p.kappa = spec.kappa;
        p.alpha = cell.alpha;
        p.beta = cell.beta;
        p.epsilon = spec.epsilon;
        p.max_iters = spec.max_iters;
        p.ablation = spec.ablation;
        p.seed = cell_seed(spec.campaign_seed, spec.kappa, cell.alpha, cell.beta) + r;
        const SimulationResult res = simulate(p, options);
        const MetricsRecord& m = res.final_metrics;
        cell.runs[r] = {static_cast<double>(m.triangle_count), m.global_assortativity,
                        static_cast<double>(m.stable_triads), m.avg_utility,
                        static_cast<double>(m.community_count),
                        static_cast<double>(res.iterations)};
        converged[job] = res.converged ? 1 : 0;
    });
    for (std::size_t job = 0; job < converged.size(); ++job) {
        cells[job / spec.replications].converged += converged[job];
    }
    return cells;
}

} // namespace commform
