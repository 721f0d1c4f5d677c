#pragma once
// One run of the community-formation dynamics: initialization, the
// simultaneous proposal and action stages, stable-triad counting and the
// windowed stopping rule.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "commform/graph.hpp"
#include "commform/metrics.hpp"
#include "commform/rng.hpp"
#include "commform/utility.hpp"

namespace commform {

struct ModelParams {
    std::size_t n = 150;
    std::size_t kappa = 10;
    double alpha = 0.5;  ///< share of homophilic agents
    double beta = 0.5;   ///< share of social-capital agents
    /// Ω: probabilities of type 0 and type 1.
    std::array<double, 2> omega{0.5, 0.5};
    /// Assign exactly round(n * omega[0]) type-0 agents instead of i.i.d. draws.
    bool exact_type_counts = false;
    double epsilon = 1e-9;
    std::size_t max_iters = 1000;
    std::uint64_t seed = 0;
    Ablation ablation = Ablation::None;

    /// n - 1 under the no-budget ablation, kappa otherwise.
    std::size_t effective_kappa() const noexcept {
        return ablation == Ablation::NoBudget ? n - 1 : kappa;
    }

    /// Throws ConfigError.
    void validate() const;
};

struct Population {
    NetworkState state;
    std::vector<AgentProfile> profiles;
    RunRng rng{0};
};

/// Empty graph, types drawn from Ω, strategies from (alpha, beta).
Population initialize(const ModelParams& params);

/// Partial map proposer -> target.
class ProposalMap {
  public:
    ProposalMap() = default;
    explicit ProposalMap(std::size_t n) : target_(n, kNone) {}

    std::size_t capacity() const noexcept { return target_.size(); }
    std::optional<AgentId> target(AgentId v) const noexcept {
        return target_[v] == kNone ? std::nullopt : std::optional<AgentId>(target_[v]);
    }
    void set(AgentId from, AgentId to) noexcept { target_[from] = to; }
    std::size_t size() const noexcept;
    /// proposers_to()[v] = ascending ids that proposed to v.
    std::vector<std::vector<AgentId>> proposers_to() const;

    friend bool operator==(const ProposalMap&, const ProposalMap&) = default;

  private:
    static constexpr AgentId kNone = static_cast<AgentId>(-1);
    std::vector<AgentId> target_;
};

/// The action one agent picked in an action stage.
struct AgentAction {
    enum class Kind : std::uint8_t { Nothing, Accept, Delete };
    Kind kind = Kind::Nothing;
    AgentId other = 0;
    std::int64_t gain = 0;  ///< exact utility gain in UtilityModel units

    friend bool operator==(const AgentAction&, const AgentAction&) = default;
};

/// `order`, when given, is the sequence in which agents are evaluated. The
/// outcome does not depend on it; it exists so tests can check that.
ProposalMap proposal_stage(const NetworkState& g, const UtilityModel& model,
                           const ModelParams& params, const RunRng& rng,
                           std::span<const AgentId> order = {});

std::vector<AgentAction> select_actions(const NetworkState& g, const UtilityModel& model,
                                        const ProposalMap& proposals, const ModelParams& params,
                                        const RunRng& rng, std::span<const AgentId> order = {});

/// Applies every selection simultaneously. Throws ContractError if a degree
/// cap is exceeded afterwards.
NetworkState apply_actions(const NetworkState& g, std::span<const AgentAction> actions,
                           const ModelParams& params);

NetworkState action_stage(const NetworkState& g, const UtilityModel& model,
                          const ProposalMap& proposals, const ModelParams& params,
                          const RunRng& rng);

/// Triples in one of the three stable configurations: a same-type (Hm, Le)
/// triangle; a same-type (Hm, Lc) open wedge; an (Hr, Lc) open wedge whose
/// center differs in type from both endpoints.
std::size_t count_stable_triads(const NetworkState& g, std::span<const AgentProfile> profiles);

/// True iff the last `window` entries exist and their population standard
/// deviation is below epsilon.
bool has_converged(std::span<const std::size_t> history, std::size_t window, double epsilon);

struct SimulationOptions {
    /// Record a full MetricsRecord for every state (Louvain included).
    bool record_trace = true;
    /// Called after every iteration with (G_t, G_{t+1}).
    std::function<void(const NetworkState&, const NetworkState&, const UtilityModel&)> on_step;
};

struct SimulationResult {
    NetworkState final_state;
    std::vector<AgentProfile> profiles;
    bool converged = false;
    std::size_t iterations = 0;
    /// Stable-triad counts of G_0 .. G_t.
    std::vector<std::size_t> triad_history;
    /// One record per state when tracing is on, empty otherwise.
    std::vector<MetricsRecord> trace;
    MetricsRecord final_metrics;
};

/// Seed for the Louvain pass on the state at `iteration`.
std::uint64_t community_seed(std::uint64_t run_seed, std::uint64_t iteration) noexcept;

SimulationResult simulate(const ModelParams& params, const SimulationOptions& options = {});

} // namespace commform
