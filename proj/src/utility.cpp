#include "commform/utility.hpp"

#include <string>

#include "commform/errors.hpp"
#include "commform/kernels.hpp"

namespace commform {

AttributeType attribute_from_int(long long value) {
    if (value == 0) {
        return AttributeType::Zero;
    }
    if (value == 1) {
        return AttributeType::One;
    }
    throw DataError("attribute type must be 0 or 1, got " + std::to_string(value));
}

std::string_view to_string(AttributeStrategy s) noexcept {
    return s == AttributeStrategy::Homophily ? "Hm" : "Hr";
}

std::string_view to_string(StructureStrategy s) noexcept {
    return s == StructureStrategy::Embedded ? "Le" : "Lc";
}

AttributeStrategy parse_attribute_strategy(std::string_view s) {
    if (s == "Hm") {
        return AttributeStrategy::Homophily;
    }
    if (s == "Hr") {
        return AttributeStrategy::Heterophily;
    }
    throw DataError("unknown attribute strategy '" + std::string(s) + "'");
}

StructureStrategy parse_structure_strategy(std::string_view s) {
    if (s == "Le") {
        return StructureStrategy::Embedded;
    }
    if (s == "Lc") {
        return StructureStrategy::SocialCapital;
    }
    throw DataError("unknown structure strategy '" + std::string(s) + "'");
}

std::string_view to_string(Ablation a) noexcept {
    switch (a) {
    case Ablation::None:
        return "none";
    case Ablation::NoBudget:
        return "no-budget";
    case Ablation::GlobalKnowledge:
        return "global-knowledge";
    case Ablation::IgnoreAttribute:
        return "ignore-attribute";
    case Ablation::IgnoreStructure:
        return "ignore-structure";
    }
    return "none";
}

Ablation parse_ablation(std::string_view s) {
    for (Ablation a : {Ablation::None, Ablation::NoBudget, Ablation::GlobalKnowledge,
                       Ablation::IgnoreAttribute, Ablation::IgnoreStructure}) {
        if (to_string(a) == s) {
            return a;
        }
    }
    throw ConfigError("unknown ablation '" + std::string(s) + "'");
}

UtilityModel::UtilityModel(std::span<const AgentProfile> profiles, std::size_t kappa,
                           Ablation ablation)
    : profiles_(profiles.begin(), profiles.end()), kappa_(kappa), ablation_(ablation) {
    if (kappa < 1) {
        throw ConfigError("kappa must be at least 1");
    }
    const auto k = static_cast<std::int64_t>(kappa);
    pair_norm_ = kappa >= 2 ? k * (k - 1) / 2 : 1;
    denom_ = k * pair_norm_;

    const std::size_t n = profiles_.size();
    by_type_[0] = VertexSet(n);
    by_type_[1] = VertexSet(n);
    for (std::size_t i = 0; i < n; ++i) {
        const AgentProfile& p = profiles_[i];
        if (p.id != i) {
            throw ContractError("profiles must be indexed by agent id");
        }
        by_type_[to_int(p.type)].insert(p.id);
        if (kappa < 2 && p.strategy.structure == StructureStrategy::Embedded &&
            ablation != Ablation::IgnoreStructure) {
            throw ConfigError("embedded agents need kappa >= 2 (triangle normalizer C(kappa,2))");
        }
    }
}

const VertexSet& UtilityModel::attribute_targets(AgentId v) const noexcept {
    const AgentProfile& p = profiles_[v];
    const int own = to_int(p.type);
    return p.strategy.attribute == AttributeStrategy::Homophily ? by_type_[own] : by_type_[1 - own];
}

UtilityModel::Counts UtilityModel::count(const NetworkState& g, AgentId v,
                                         const VertexSet& hood) const {
    Counts c;
    c.attribute = kernels::active().and_popcount(hood.words().data(),
                                                 attribute_targets(v).words().data(),
                                                 hood.words().size());
    hood.for_each([&](AgentId x) {
        const std::uint32_t k = g.neighbors_in(x, hood);
        c.triangles += k;
        c.isolated += k == 0 ? 1 : 0;
    });
    c.triangles /= 2;
    return c;
}

std::int64_t UtilityModel::attribute_scaled(AgentId, const Counts& c) const noexcept {
    if (ablation_ == Ablation::IgnoreAttribute) {
        return 0;
    }
    return c.attribute * pair_norm_;
}

std::int64_t UtilityModel::structural_scaled(AgentId v, const Counts& c) const noexcept {
    if (ablation_ == Ablation::IgnoreStructure) {
        return 0;
    }
    if (profiles_[v].strategy.structure == StructureStrategy::SocialCapital) {
        return c.isolated * pair_norm_;
    }
    return c.triangles * static_cast<std::int64_t>(kappa_);
}

std::int64_t UtilityModel::scaled(const NetworkState& g, AgentId v) const {
    return scaled(v, count(g, v, g.neighbor_set(v)));
}

UtilityBreakdown UtilityModel::breakdown(AgentId v, const Counts& c) const noexcept {
    UtilityBreakdown b;
    const auto k = static_cast<double>(kappa_);
    if (ablation_ != Ablation::IgnoreAttribute) {
        b.attribute = static_cast<double>(c.attribute) / k;
    }
    if (ablation_ != Ablation::IgnoreStructure) {
        if (profiles_[v].strategy.structure == StructureStrategy::SocialCapital) {
            b.structural = static_cast<double>(c.isolated) / k;
        } else {
            b.structural = static_cast<double>(c.triangles) / static_cast<double>(pair_norm_);
        }
    }
    b.total = b.attribute + b.structural;
    return b;
}

UtilityBreakdown UtilityModel::breakdown(const NetworkState& g, AgentId v) const {
    return breakdown(v, count(g, v, g.neighbor_set(v)));
}

std::int64_t UtilityModel::scaled_delta(const NetworkState& g, AgentId v, EdgeChange change,
                                        std::optional<AgentId> assumed) const {
    g.check_id(v);
    g.check_id(change.other);
    if (change.other == v) {
        throw ContractError("utility_delta: change targets the agent itself");
    }
    VertexSet before = g.neighbor_set(v);
    if (assumed) {
        g.check_id(*assumed);
        if (*assumed == v || g.has_edge(v, *assumed)) {
            throw ContractError("utility_delta: assumed proposal edge must be a non-edge");
        }
        before.insert(*assumed);
    }
    VertexSet after = before;
    if (change.kind == EdgeChange::Kind::Add) {
        if (before.contains(change.other)) {
            throw ContractError("utility_delta: added edge already present");
        }
        after.insert(change.other);
    } else {
        if (!g.has_edge(v, change.other)) {
            throw ContractError("utility_delta: deleted edge not present");
        }
        after.erase(change.other);
    }
    return scaled(v, count(g, v, after)) - scaled(v, count(g, v, before));
}

void LocalView::reset(const NetworkState& g, AgentId v, const VertexSet& hood) {
    g_ = &g;
    v_ = v;
    hood_ = hood;
    if (inner_.size() != g.size()) {
        inner_.assign(g.size(), 0);
    }
    counts_ = {};
    counts_.attribute = kernels::active().and_popcount(
        hood_.words().data(), model_->attribute_targets(v).words().data(), hood_.words().size());
    hood_.for_each([&](AgentId x) {
        const std::uint32_t k = g.neighbors_in(x, hood_);
        inner_[x] = k;
        counts_.triangles += k;
        counts_.isolated += k == 0 ? 1 : 0;
    });
    counts_.triangles /= 2;
}

namespace {

template <class F>
void for_each_common(const NetworkState& g, AgentId x, const VertexSet& hood, F&& f) {
    const auto row = g.row(x);
    const auto words = hood.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t bits = row[w] & words[w];
        while (bits != 0) {
            f(static_cast<AgentId>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
            bits &= bits - 1;
        }
    }
}

} // namespace

std::int64_t LocalView::add_delta(AgentId c) const {
    UtilityModel::Counts next = counts_;
    next.attribute += model_->attribute_targets(v_).contains(c) ? 1 : 0;
    std::int64_t common = 0;
    for_each_common(*g_, c, hood_, [&](AgentId y) {
        ++common;
        if (inner_[y] == 0) {
            --next.isolated;
        }
    });
    next.triangles += common;
    if (common == 0) {
        ++next.isolated;
    }
    return model_->scaled(v_, next) - model_->scaled(v_, counts_);
}

std::int64_t LocalView::delete_delta(AgentId x) const {
    UtilityModel::Counts next = counts_;
    next.attribute -= model_->attribute_targets(v_).contains(x) ? 1 : 0;
    next.triangles -= inner_[x];
    if (inner_[x] == 0) {
        --next.isolated;
    }
    for_each_common(*g_, x, hood_, [&](AgentId y) {
        if (inner_[y] == 1) {
            ++next.isolated;
        }
    });
    return model_->scaled(v_, next) - model_->scaled(v_, counts_);
}

double attribute_utility(const NetworkState& g, std::span<const AgentProfile> profiles, AgentId v,
                         std::size_t kappa, Ablation ablation) {
    return total_utility(g, profiles, v, kappa, ablation).attribute;
}

double structural_utility(const NetworkState& g, std::span<const AgentProfile> profiles, AgentId v,
                          std::size_t kappa, Ablation ablation) {
    return total_utility(g, profiles, v, kappa, ablation).structural;
}

UtilityBreakdown total_utility(const NetworkState& g, std::span<const AgentProfile> profiles,
                               AgentId v, std::size_t kappa, Ablation ablation) {
    g.check_id(v);
    const UtilityModel model(profiles, kappa, ablation);
    return model.breakdown(g, v);
}

double utility_delta(const NetworkState& g, std::span<const AgentProfile> profiles, AgentId v,
                     EdgeChange change, std::optional<AgentId> assumed_extra, std::size_t kappa,
                     Ablation ablation) {
    const UtilityModel model(profiles, kappa, ablation);
    return model.to_real(model.scaled_delta(g, v, change, assumed_extra));
}

} // namespace commform
