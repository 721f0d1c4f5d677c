// commform: batch front end for simulation, sweeps, fitting, ablations and
// pairwise evaluation.
//
// Exit status: 0 success, 1 runtime or I/O failure, 2 usage error.

#include <cctype>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "commform/engine.hpp"
#include "commform/errors.hpp"
#include "commform/evaluation.hpp"
#include "commform/fitting.hpp"
#include "commform/io.hpp"
#include "commform/parallel.hpp"
#include "commform/sweep.hpp"

namespace fs = std::filesystem;
using namespace commform;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct SimulateArgs {
    ModelParams params;
    double type_share = 0.5;
    std::string ablation = "none";
    fs::path out;
};

struct SweepArgs {
    SweepSpec spec;
    std::string ablation = "none";
    fs::path out;
};

struct FitArgs {
    std::vector<fs::path> configs;
    std::vector<fs::path> networks;
    bool shared_kappa = false;
    std::vector<std::size_t> kappas{5, 10, 15};
    std::size_t coarse_divisions = 8;
    std::size_t fine_divisions = 16;
    std::size_t runs = 5;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    double epsilon = 1e-9;
    std::size_t max_iters = 1000;
    std::string ablation = "none";
    fs::path out;
};

struct EvalArgs {
    fs::path first;
    fs::path second;
};

std::string json_line(const nlohmann::json& j) { return j.dump(); }

Metadata base_metadata(std::string_view command, const nlohmann::json& config) {
    return {{"tool", std::string(kToolVersion)},
            {"command", std::string(command)},
            {"config", json_line(config)}};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------

void run_simulate(SimulateArgs& a) {
    a.params.ablation = parse_ablation(a.ablation);
    a.params.omega = {a.type_share, 1.0 - a.type_share};
    a.params.validate();
    ensure_dir(a.out);

    const SimulationResult res = simulate(a.params);
    const AttributedNetwork net =
        to_network(res.final_state, res.profiles, "simulate seed " + std::to_string(a.params.seed));
    save_network(net, a.out / "network.json", NetworkFormat::Json);
    save_network(net, a.out / "network.graphml", NetworkFormat::GraphML);

    std::ostringstream trace;
    Metadata meta = base_metadata("simulate", to_json(a.params));
    meta.emplace_back("seed", std::to_string(a.params.seed));
    write_trace_csv(res.trace, meta, trace);
    write_file(a.out / "trace.csv", trace.str());
    write_file(a.out / "summary.json", summary_json(res, a.params).dump(2) + "\n");

    std::cerr << "converged=" << (res.converged ? "true" : "false")
              << " iterations=" << res.iterations << " edges=" << res.final_state.edge_count()
              << " stable_triads=" << res.triad_history.back() << '\n';
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const SweepSpec& s) {
    return {{"n", s.n},
            {"kappa", s.kappa},
            {"divisions", s.divisions},
            {"replications", s.replications},
            {"campaign_seed", s.campaign_seed},
            {"ablation", std::string(to_string(s.ablation))},
            {"epsilon", s.epsilon},
            {"max_iters", s.max_iters}};
}

void run_sweep_cmd(SweepArgs& a) {
    a.spec.ablation = parse_ablation(a.ablation);
    a.spec.validate();
    ensure_dir(a.out);
    if (a.spec.workers == 0) {
        a.spec.workers = default_workers();
    }
    const auto cells = run_sweep(a.spec);
    const Metadata meta = base_metadata("sweep", to_json(a.spec));
    auto header = [&](std::ostream& out) {
        for (const auto& [k, v] : meta) {
            out << "# " << k << ": " << v << '\n';
        }
    };

    for (std::size_t m = 0; m < kSweepMetrics.size(); ++m) {
        std::ostringstream out;
        header(out);
        out << "# metric: " << kSweepMetrics[m] << " (mean over replications)\n";
        out << "alpha,beta,value\n";
        for (const auto& c : cells) {
            out << format_double(c.alpha) << ',' << format_double(c.beta) << ','
                << format_double(c.mean(m)) << '\n';
        }
        write_file(a.out / ("sweep_" + std::string(kSweepMetrics[m]) + ".csv"), out.str());
    }

    std::ostringstream long_out;
    header(long_out);
    long_out << "alpha,beta,metric,value\n";
    for (const auto& c : cells) {
        for (std::size_t m = 0; m < kSweepMetrics.size(); ++m) {
            long_out << format_double(c.alpha) << ',' << format_double(c.beta) << ','
                     << kSweepMetrics[m] << ',' << format_double(c.mean(m)) << '\n';
        }
    }
    write_file(a.out / "sweep_long.csv", long_out.str());

    std::ostringstream runs_out;
    header(runs_out);
    runs_out << "alpha,beta,replication,seed";
    for (auto name : kSweepMetrics) {
        runs_out << ',' << name;
    }
    runs_out << '\n';
    std::size_t unconverged = 0;
    for (const auto& c : cells) {
        const std::uint64_t base = cell_seed(a.spec.campaign_seed, a.spec.kappa, c.alpha, c.beta);
        for (std::size_t r = 0; r < c.runs.size(); ++r) {
            runs_out << format_double(c.alpha) << ',' << format_double(c.beta) << ',' << r << ','
                     << base + r;
            for (double v : c.runs[r]) {
                runs_out << ',' << format_double(v);
            }
            runs_out << '\n';
        }
        unconverged += c.runs.size() - c.converged;
    }
    write_file(a.out / "sweep_runs.csv", runs_out.str());
    std::cerr << "cells=" << cells.size() << " runs=" << cells.size() * a.spec.replications
              << " unconverged=" << unconverged << '\n';
}

// ---------------------------------------------------------------------------

std::vector<ObservedNetwork> load_inputs(const FitArgs& a) {
    std::vector<ObservedNetwork> nets;
    for (const auto& c : a.configs) {
        nets.push_back(load_observed(read_ingest_config(c)));
    }
    for (const auto& p : a.networks) {
        ObservedNetwork net = load_network(p);
        net.provenance = p.stem().string();
        nets.push_back(std::move(net));
    }
    if (nets.empty()) {
        throw ConfigError("give at least one --config or --network");
    }
    return nets;
}

GridSpec make_grid(const FitArgs& a) {
    GridSpec g;
    g.kappa_values = a.kappas;
    g.coarse_grid = uniform_grid(a.coarse_divisions);
    g.alpha_grid = uniform_grid(a.fine_divisions);
    g.beta_grid = uniform_grid(a.fine_divisions);
    g.runs_per_cell = a.runs;
    g.campaign_seed = a.seed;
    g.workers = a.workers == 0 ? default_workers() : a.workers;
    g.epsilon = a.epsilon;
    g.max_iters = a.max_iters;
    g.validate();
    return g;
}

std::string safe_label(std::string s, std::size_t index) {
    for (char& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') {
            c = '_';
        }
    }
    return s.empty() ? "network" + std::to_string(index) : s;
}

std::vector<FitResult> fit_all(const std::vector<ObservedNetwork>& nets, const GridSpec& grid,
                               Ablation ablation, bool shared) {
    if (shared) {
        return fit_shared_kappa(nets, grid, ablation);
    }
    std::vector<FitResult> out;
    for (const auto& n : nets) {
        out.push_back(fit(n, grid, ablation));
    }
    return out;
}

void write_fit(const FitResult& r, const fs::path& dir, const std::string& stem, bool shared) {
    nlohmann::json j = to_json(r);
    j["shared_kappa"] = shared;
    write_file(dir / ("fit_" + stem + ".json"), j.dump(2) + "\n");
    std::ostringstream grid;
    Metadata meta = base_metadata("fit", to_json(r.grid));
    meta.emplace_back("network", r.provenance);
    meta.emplace_back("ablation", std::string(to_string(r.ablation)));
    write_grid_csv(r, meta, grid);
    write_file(dir / ("grid_" + stem + ".csv"), grid.str());
}

void run_fit(const FitArgs& a) {
    const Ablation ablation = parse_ablation(a.ablation);
    const GridSpec grid = make_grid(a);
    const auto nets = load_inputs(a);
    ensure_dir(a.out);
    const auto results = fit_all(nets, grid, ablation, a.shared_kappa);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        write_fit(r, a.out, safe_label(nets[i].provenance, i), a.shared_kappa);
        std::cout << r.provenance << ": kappa=" << r.best_kappa
                  << " alpha=" << format_double(r.best_alpha)
                  << " beta=" << format_double(r.best_beta)
                  << " loss=" << format_double(r.best_loss) << '\n';
    }
}

void run_ablate(const FitArgs& a) {
    const GridSpec grid = make_grid(a);
    const auto nets = load_inputs(a);
    ensure_dir(a.out);
    constexpr Ablation kModes[] = {Ablation::None, Ablation::NoBudget, Ablation::GlobalKnowledge,
                                   Ablation::IgnoreAttribute, Ablation::IgnoreStructure};
    std::vector<std::vector<FitResult>> by_mode;
    for (Ablation mode : kModes) {
        by_mode.push_back(fit_all(nets, grid, mode, a.shared_kappa));
    }
    for (std::size_t i = 0; i < nets.size(); ++i) {
        const std::string stem = safe_label(nets[i].provenance, i);
        std::ostringstream table;
        for (const auto& [k, v] : base_metadata("ablate", to_json(grid))) {
            table << "# " << k << ": " << v << '\n';
        }
        table << "# network: " << nets[i].provenance << '\n';
        table << "model,best_kappa,best_alpha,best_beta,loss\n";
        for (std::size_t m = 0; m < by_mode.size(); ++m) {
            const FitResult& r = by_mode[m][i];
            write_fit(r, a.out, stem + "_" + std::string(to_string(kModes[m])), a.shared_kappa);
            table << to_string(kModes[m]) << ',' << r.best_kappa << ','
                  << format_double(r.best_alpha) << ',' << format_double(r.best_beta) << ','
                  << format_double(r.best_loss) << '\n';
        }
        write_file(a.out / ("ablation_" + stem + ".csv"), table.str());
        std::cout << table.str();
    }
}

// ---------------------------------------------------------------------------

void run_eval(const EvalArgs& a) {
    const AttributedNetwork x = load_network(a.first);
    const AttributedNetwork y = load_network(a.second);
    if (x.size() == 0 || y.size() == 0) {
        throw DataError("cannot evaluate a network without nodes");
    }
    const LossReport r = loss(x.graph, y.graph, x.types, y.types);
    std::cout << to_json(r).dump(2) << '\n';
}

// ---------------------------------------------------------------------------

void add_fit_options(CLI::App* cmd, FitArgs& a) {
    cmd->add_option("--config", a.configs, "Ingest config JSON (repeatable)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--network", a.networks, "Network file: json, csv or graphml (repeatable)")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--shared-kappa", a.shared_kappa, "Select one kappa across all networks");
    cmd->add_option("--kappa", a.kappas, "Candidate kappa values")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--coarse-divisions", a.coarse_divisions, "Phase-1 grid step 1/d")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--fine-divisions", a.fine_divisions, "Phase-2 grid step 1/d")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--runs", a.runs, "Simulations per cell")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "Campaign seed")->capture_default_str();
    cmd->add_option("--workers", a.workers, "Worker threads (0: COMMFORM_WORKERS or all cores)")
        ->capture_default_str();
    cmd->add_option("--eps", a.epsilon, "Convergence tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", a.max_iters, "Iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.out, "Output directory")->required();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strategic community formation on attributed graphs"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run one simulation");
    simulate_cmd->add_option("--n", sim.params.n, "Number of agents")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    simulate_cmd->add_option("--kappa", sim.params.kappa, "Degree cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--alpha", sim.params.alpha, "Share of homophilic agents")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    simulate_cmd->add_option("--beta", sim.params.beta, "Share of social-capital agents")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    simulate_cmd->add_option("--type-share", sim.type_share, "Probability of type 0")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    simulate_cmd->add_flag("--exact-types", sim.params.exact_type_counts,
                           "Assign exactly round(n * type-share) type-0 agents");
    simulate_cmd->add_option("--seed", sim.params.seed, "Run seed")->capture_default_str();
    simulate_cmd->add_option("--eps", sim.params.epsilon, "Convergence tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--max-iters", sim.params.max_iters, "Iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--ablation", sim.ablation, "none|no-budget|global-knowledge|"
                                                         "ignore-attribute|ignore-structure")
        ->capture_default_str();
    simulate_cmd->add_option("--out", sim.out, "Output directory")->required();

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Replicated runs over an (alpha, beta) grid");
    sweep_cmd->add_option("--n", sw.spec.n, "Number of agents")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    sweep_cmd->add_option("--kappa", sw.spec.kappa, "Degree cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--divisions", sw.spec.divisions, "Grid step 1/d on both axes")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--reps", sw.spec.replications, "Replications per cell")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", sw.spec.campaign_seed, "Campaign seed")->capture_default_str();
    sweep_cmd->add_option("--workers", sw.spec.workers,
                          "Worker threads (0: COMMFORM_WORKERS or all cores)")
        ->capture_default_str();
    sweep_cmd->add_option("--eps", sw.spec.epsilon, "Convergence tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--max-iters", sw.spec.max_iters, "Iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--ablation", sw.ablation, "Ablation mode")->capture_default_str();
    sweep_cmd->add_option("--out", sw.out, "Output directory")->required();

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Grid-search (kappa, alpha, beta) to observed networks");
    add_fit_options(fit_cmd, fit_args);
    fit_cmd->add_option("--ablation", fit_args.ablation, "Ablation mode")->capture_default_str();

    FitArgs ablate_args;
    auto* ablate_cmd =
        app.add_subcommand("ablate", "Fit the standard model and all four ablations");
    add_fit_options(ablate_cmd, ablate_args);

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Loss between two network files");
    eval_cmd->add_option("first", ev.first, "Observed network")->required();
    eval_cmd->add_option("second", ev.second, "Simulated network")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*simulate_cmd) {
            run_simulate(sim);
        } else if (*sweep_cmd) {
            run_sweep_cmd(sw);
        } else if (*fit_cmd) {
            run_fit(fit_args);
        } else if (*ablate_cmd) {
            run_ablate(ablate_args);
        } else if (*eval_cmd) {
            run_eval(ev);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
