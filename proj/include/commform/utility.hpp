#pragma once
// Agent profiles and the four strategy utilities.
//
// Utilities are evaluated exactly as integers in units of 1/D with
// D = kappa * C(kappa, 2) (C(kappa, 2) replaced by 1 when kappa < 2):
//   homophily / heterophily : matching-neighbor count * C(kappa, 2)
//   social capital          : isolated-neighbor count * C(kappa, 2)
//   embeddedness            : neighbor-pair triangle count * kappa
// Decisions (sign tests, argmax, ties) compare these integers, so they are
// free of rounding. Real-valued results are a single division by D.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commform/graph.hpp"

namespace commform {

enum class AttributeType : std::uint8_t { Zero = 0, One = 1 };

constexpr int to_int(AttributeType t) noexcept { return static_cast<int>(t); }
/// Throws DataError for anything but 0 or 1.
AttributeType attribute_from_int(long long value);

enum class AttributeStrategy : std::uint8_t { Homophily, Heterophily };
enum class StructureStrategy : std::uint8_t { Embedded, SocialCapital };

struct Strategy {
    AttributeStrategy attribute = AttributeStrategy::Homophily;
    StructureStrategy structure = StructureStrategy::SocialCapital;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// "Hm" / "Hr" and "Le" / "Lc".
std::string_view to_string(AttributeStrategy s) noexcept;
std::string_view to_string(StructureStrategy s) noexcept;
AttributeStrategy parse_attribute_strategy(std::string_view s);
StructureStrategy parse_structure_strategy(std::string_view s);

struct AgentProfile {
    AgentId id = 0;
    AttributeType type = AttributeType::Zero;
    Strategy strategy;

    friend bool operator==(const AgentProfile&, const AgentProfile&) = default;
};

enum class Ablation : std::uint8_t { None, NoBudget, GlobalKnowledge, IgnoreAttribute, IgnoreStructure };

/// "none", "no-budget", "global-knowledge", "ignore-attribute", "ignore-structure".
std::string_view to_string(Ablation a) noexcept;
/// Throws ConfigError on unknown names.
Ablation parse_ablation(std::string_view s);

struct UtilityBreakdown {
    double attribute = 0.0;
    double structural = 0.0;
    double total = 0.0;
};

struct EdgeChange {
    enum class Kind : std::uint8_t { Add, Delete };
    Kind kind = Kind::Add;
    AgentId other = 0;

    static constexpr EdgeChange add(AgentId u) noexcept { return {Kind::Add, u}; }
    static constexpr EdgeChange remove(AgentId u) noexcept { return {Kind::Delete, u}; }
};

/// Utility evaluator bound to one population and one normalizing kappa.
class UtilityModel {
  public:
    /// Throws ConfigError when kappa < 1, or kappa < 2 while an embedded agent
    /// still scores structure.
    UtilityModel(std::span<const AgentProfile> profiles, std::size_t kappa, Ablation ablation);

    std::size_t kappa() const noexcept { return kappa_; }
    Ablation ablation() const noexcept { return ablation_; }
    std::int64_t denominator() const noexcept { return denom_; }
    const AgentProfile& profile(AgentId v) const noexcept { return profiles_[v]; }

    /// Neighbors that score attribute utility for v, as a set over all agents.
    const VertexSet& attribute_targets(AgentId v) const noexcept;

    struct Counts {
        std::int64_t attribute = 0;  ///< matching neighbors
        std::int64_t triangles = 0;  ///< adjacent neighbor pairs
        std::int64_t isolated = 0;   ///< isolated neighbors
    };

    /// Direct count over an arbitrary neighborhood `hood` of v; edges inside
    /// `hood` are taken from g.
    Counts count(const NetworkState& g, AgentId v, const VertexSet& hood) const;

    std::int64_t attribute_scaled(AgentId v, const Counts& c) const noexcept;
    std::int64_t structural_scaled(AgentId v, const Counts& c) const noexcept;
    std::int64_t scaled(AgentId v, const Counts& c) const noexcept {
        return attribute_scaled(v, c) + structural_scaled(v, c);
    }
    std::int64_t scaled(const NetworkState& g, AgentId v) const;

    UtilityBreakdown breakdown(AgentId v, const Counts& c) const noexcept;
    UtilityBreakdown breakdown(const NetworkState& g, AgentId v) const;

    double to_real(std::int64_t scaled_value) const noexcept {
        return static_cast<double>(scaled_value) / static_cast<double>(denom_);
    }

    /// Exact U_v(G'') - U_v(G') where G' = g + (v, assumed) and G'' = G' with
    /// `change` applied. Throws ContractError on violated preconditions.
    std::int64_t scaled_delta(const NetworkState& g, AgentId v, EdgeChange change,
                              std::optional<AgentId> assumed) const;

  private:
    std::vector<AgentProfile> profiles_;
    std::size_t kappa_;
    Ablation ablation_;
    std::int64_t pair_norm_;
    std::int64_t denom_;
    VertexSet by_type_[2];
};

/// Incremental evaluator for one agent's neighborhood. Reusable across agents
/// to avoid reallocating its per-vertex scratch.
class LocalView {
  public:
    explicit LocalView(const UtilityModel& model) : model_(&model) {}

    /// Binds the view to v with neighborhood `hood` (v ∉ hood).
    void reset(const NetworkState& g, AgentId v, const VertexSet& hood);

    AgentId agent() const noexcept { return v_; }
    const VertexSet& hood() const noexcept { return hood_; }
    std::int64_t scaled() const noexcept { return model_->scaled(v_, counts_); }

    /// Delta for adding (v, c), c ∉ hood, c != v.
    std::int64_t add_delta(AgentId c) const;
    /// Delta for removing x ∈ hood.
    std::int64_t delete_delta(AgentId x) const;

  private:
    const UtilityModel* model_;
    const NetworkState* g_ = nullptr;
    AgentId v_ = 0;
    VertexSet hood_;
    std::vector<std::uint32_t> inner_;  // |N(x) ∩ hood| for x ∈ hood
    UtilityModel::Counts counts_;
};

// Free-function forms; each builds a throwaway UtilityModel.

double attribute_utility(const NetworkState& g, std::span<const AgentProfile> profiles, AgentId v,
                         std::size_t kappa, Ablation ablation);
double structural_utility(const NetworkState& g, std::span<const AgentProfile> profiles, AgentId v,
                          std::size_t kappa, Ablation ablation);
UtilityBreakdown total_utility(const NetworkState& g, std::span<const AgentProfile> profiles,
                               AgentId v, std::size_t kappa, Ablation ablation);
double utility_delta(const NetworkState& g, std::span<const AgentProfile> profiles, AgentId v,
                     EdgeChange change, std::optional<AgentId> assumed_extra, std::size_t kappa,
                     Ablation ablation);

} // namespace commform
