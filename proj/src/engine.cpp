#include "commform/engine.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "commform/errors.hpp"
#include "commform/kernels.hpp"

namespace commform {

void ModelParams::validate() const {
    if (n < 2) {
        throw ConfigError("n must be at least 2");
    }
    if (kappa < 1) {
        throw ConfigError("kappa must be at least 1");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("alpha must lie in [0, 1]");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw ConfigError("beta must lie in [0, 1]");
    }
    if (!(omega[0] >= 0.0 && omega[1] >= 0.0) || std::abs(omega[0] + omega[1] - 1.0) > 1e-9) {
        throw ConfigError("omega must be a probability distribution over {0, 1}");
    }
    if (!(epsilon > 0.0)) {
        throw ConfigError("epsilon must be positive");
    }
    if (max_iters < 1) {
        throw ConfigError("max_iters must be at least 1");
    }
}

Population initialize(const ModelParams& params) {
    params.validate();
    Population pop;
    pop.state = NetworkState(params.n);
    pop.rng = RunRng(params.seed);
    pop.profiles.resize(params.n);

    std::vector<AttributeType> types(params.n, AttributeType::Zero);
    if (params.exact_type_counts) {
        const auto zeros = static_cast<std::size_t>(
            std::llround(static_cast<double>(params.n) * params.omega[0]));
        for (std::size_t i = zeros; i < params.n; ++i) {
            types[i] = AttributeType::One;
        }
        SplitMix64 shuffle = pop.rng.stream(Stage::Init, 1, 0);
        for (std::size_t i = params.n - 1; i > 0; --i) {
            std::swap(types[i], types[shuffle.below(i + 1)]);
        }
    }
    for (AgentId v = 0; v < params.n; ++v) {
        SplitMix64 s = pop.rng.stream(Stage::Init, 0, v);
        const bool type_zero = s.unit() < params.omega[0];
        AgentProfile& p = pop.profiles[v];
        p.id = v;
        p.type = params.exact_type_counts ? types[v]
                                          : (type_zero ? AttributeType::Zero : AttributeType::One);
        p.strategy.attribute =
            s.bernoulli(params.alpha) ? AttributeStrategy::Homophily : AttributeStrategy::Heterophily;
        p.strategy.structure =
            s.bernoulli(params.beta) ? StructureStrategy::SocialCapital : StructureStrategy::Embedded;
    }
    return pop;
}

std::size_t ProposalMap::size() const noexcept {
    std::size_t count = 0;
    for (AgentId t : target_) {
        count += t != kNone ? 1 : 0;
    }
    return count;
}

std::vector<std::vector<AgentId>> ProposalMap::proposers_to() const {
    std::vector<std::vector<AgentId>> inverse(target_.size());
    for (AgentId v = 0; v < target_.size(); ++v) {
        if (target_[v] != kNone) {
            inverse[target_[v]].push_back(v);
        }
    }
    return inverse;
}

namespace {

std::vector<AgentId> default_order(std::size_t n, std::span<const AgentId> order) {
    if (!order.empty()) {
        if (order.size() != n) {
            throw ContractError("agent order must cover every agent exactly once");
        }
        return {order.begin(), order.end()};
    }
    std::vector<AgentId> out(n);
    std::iota(out.begin(), out.end(), AgentId{0});
    return out;
}

// Running argmax with uniform tie-breaking over candidates seen in ascending id order.
struct BestChoice {
    std::int64_t gain = 0;
    std::vector<AgentId> ties;

    void offer(AgentId c, std::int64_t g) {
        if (ties.empty() || g > gain) {
            gain = g;
            ties.assign(1, c);
        } else if (g == gain) {
            ties.push_back(c);
        }
    }
    bool empty() const noexcept { return ties.empty(); }
    AgentId pick(SplitMix64& s) const {
        return ties.size() == 1 ? ties.front() : ties[s.below(ties.size())];
    }
};

} // namespace

ProposalMap proposal_stage(const NetworkState& g, const UtilityModel& model,
                           const ModelParams& params, const RunRng& rng,
                           std::span<const AgentId> order) {
    const std::size_t n = g.size();
    const std::size_t cap = params.effective_kappa();
    const bool global = params.ablation == Ablation::GlobalKnowledge;
    ProposalMap proposals(n);
    LocalView view(model);
    BestChoice best;
    VertexSet strangers(n);
    VertexSet candidates(n);
    VertexSet hood(n);

    for (AgentId v : default_order(n, order)) {
        if (g.degree_unchecked(v) >= cap) {
            continue;
        }
        SplitMix64 stream = rng.stream(Stage::Proposal, g.iteration(), v);

        hood.assign(g.row(v));
        strangers.assign(g.row(v));
        strangers.insert(v);
        strangers.flip();
        if (global) {
            candidates.assign(strangers.words());
        } else {
            candidates.clear();
            g.for_each_neighbor(v, [&](AgentId x) { candidates |= g.row(x); });
            candidates.subtract(g.row(v));
            candidates.erase(v);
            if (const std::size_t pool = strangers.size(); pool > 0) {
                candidates.insert(strangers.nth(stream.below(pool)));
            }
        }
        if (candidates.empty()) {
            continue;
        }

        view.reset(g, v, hood);
        best.ties.clear();
        candidates.for_each([&](AgentId c) { best.offer(c, view.add_delta(c)); });
        if (!best.empty() && best.gain > 0) {
            proposals.set(v, best.pick(stream));
        }
    }
    return proposals;
}

std::vector<AgentAction> select_actions(const NetworkState& g, const UtilityModel& model,
                                        const ProposalMap& proposals, const ModelParams& params,
                                        const RunRng& rng, std::span<const AgentId> order) {
    const std::size_t n = g.size();
    const std::size_t cap = params.effective_kappa();
    const auto incoming = proposals.proposers_to();
    std::vector<AgentAction> actions(n);
    LocalView view(model);
    BestChoice best_delete;
    BestChoice best_accept;
    VertexSet hood(n);

    for (AgentId v : default_order(n, order)) {
        const std::optional<AgentId> own = proposals.target(v);
        SplitMix64 stream = rng.stream(Stage::Action, g.iteration(), v);

        // Evaluate against G plus v's own pending proposal.
        hood.assign(g.row(v));
        if (own) {
            hood.insert(*own);
        }
        view.reset(g, v, hood);

        best_delete.ties.clear();
        g.for_each_neighbor(v, [&](AgentId x) { best_delete.offer(x, view.delete_delta(x)); });

        // Accepting a third party's proposal is gated at δ(v) < κ - 1. Accepting
        // the agent v itself proposed to realizes the already-assumed edge and
        // only needs room for that one edge.
        best_accept.ties.clear();
        const bool room_for_two = g.degree_unchecked(v) + 1 < cap;
        for (AgentId q : incoming[v]) {
            if (own && q == *own) {
                best_accept.offer(q, model.scaled_delta(g, v, EdgeChange::add(q), std::nullopt));
            } else if (room_for_two) {
                best_accept.offer(q, view.add_delta(q));
            }
        }

        AgentAction& act = actions[v];
        const AgentId delete_pick = best_delete.empty() ? 0 : best_delete.pick(stream);
        const AgentId accept_pick = best_accept.empty() ? 0 : best_accept.pick(stream);
        if (!best_accept.empty() && best_accept.gain > 0 &&
            (best_delete.empty() || best_accept.gain > best_delete.gain)) {
            act = {AgentAction::Kind::Accept, accept_pick, best_accept.gain};
        } else if (!best_delete.empty() && best_delete.gain > 0) {
            act = {AgentAction::Kind::Delete, delete_pick, best_delete.gain};
        }
    }
    return actions;
}

NetworkState apply_actions(const NetworkState& g, std::span<const AgentAction> actions,
                           const ModelParams& params) {
    std::vector<Edge> deletions;
    std::vector<Edge> additions;
    for (AgentId v = 0; v < actions.size(); ++v) {
        const AgentAction& a = actions[v];
        if (a.kind == AgentAction::Kind::Delete) {
            deletions.push_back(make_edge(v, a.other));
        } else if (a.kind == AgentAction::Kind::Accept) {
            additions.push_back(make_edge(v, a.other));
        }
    }
    NetworkState next = g.apply_changes(deletions, additions);
    if (params.ablation != Ablation::NoBudget) {
        for (AgentId v = 0; v < next.size(); ++v) {
            if (next.degree_unchecked(v) > params.kappa) {
                throw ContractError("agent " + std::to_string(v) + " exceeds the degree cap");
            }
        }
    }
    return next;
}

NetworkState action_stage(const NetworkState& g, const UtilityModel& model,
                          const ProposalMap& proposals, const ModelParams& params,
                          const RunRng& rng) {
    return apply_actions(g, select_actions(g, model, proposals, params, rng), params);
}

std::size_t count_stable_triads(const NetworkState& g, std::span<const AgentProfile> profiles) {
    const std::size_t n = g.size();
    if (profiles.size() != n) {
        throw ContractError("profiles must cover every vertex");
    }
    // class index = type * 4 + attribute * 2 + structure
    auto class_of = [](const AgentProfile& p) {
        return to_int(p.type) * 4 + static_cast<int>(p.strategy.attribute) * 2 +
               static_cast<int>(p.strategy.structure);
    };
    std::array<VertexSet, 8> classes;
    for (auto& c : classes) {
        c = VertexSet(n);
    }
    for (const AgentProfile& p : profiles) {
        classes[class_of(p)].insert(p.id);
    }
    constexpr int kHm = static_cast<int>(AttributeStrategy::Homophily) * 2;
    constexpr int kHr = static_cast<int>(AttributeStrategy::Heterophily) * 2;
    constexpr int kLe = static_cast<int>(StructureStrategy::Embedded);
    constexpr int kLc = static_cast<int>(StructureStrategy::SocialCapital);

    const auto& k = kernels::active();
    std::size_t closed_twice = 0;  // each triangle seen 6 times
    std::size_t wedges = 0;
    VertexSet q(n);
    for (AgentId v = 0; v < n; ++v) {
        const int t = to_int(profiles[v].type);
        const int cls = class_of(profiles[v]);
        const VertexSet* partner = nullptr;
        if (cls == t * 4 + kHm + kLe) {
            partner = &classes[cls];
        } else if (cls == t * 4 + kHm + kLc) {
            partner = &classes[cls];
        } else if (cls == t * 4 + kHr + kLc) {
            partner = &classes[(1 - t) * 4 + kHr + kLc];
        } else {
            continue;
        }
        std::copy(g.row(v).begin(), g.row(v).end(), q.words().begin());
        q &= partner->words();
        std::size_t size = 0;
        std::size_t inner = 0;
        q.for_each([&](AgentId x) {
            ++size;
            inner += k.and_popcount(g.row(x).data(), q.words().data(), q.words().size());
        });
        if (cls == t * 4 + kHm + kLe) {
            closed_twice += inner;
        } else {
            wedges += size * (size - 1) / 2 - inner / 2;
        }
    }
    return closed_twice / 6 + wedges;
}

bool has_converged(std::span<const std::size_t> history, std::size_t window, double epsilon) {
    if (window == 0 || history.size() < window) {
        return false;
    }
    const auto tail = history.subspan(history.size() - window);
    double mean = 0.0;
    for (auto x : tail) {
        mean += static_cast<double>(x);
    }
    mean /= static_cast<double>(window);
    double var = 0.0;
    for (auto x : tail) {
        const double d = static_cast<double>(x) - mean;
        var += d * d;
    }
    var /= static_cast<double>(window);
    return std::sqrt(var) < epsilon;
}

std::uint64_t community_seed(std::uint64_t run_seed, std::uint64_t iteration) noexcept {
    return hash_combine(hash_combine(mix64(run_seed), 0x10u), iteration);
}

SimulationResult simulate(const ModelParams& params, const SimulationOptions& options) {
    Population pop = initialize(params);
    const std::size_t cap = params.effective_kappa();
    const UtilityModel model(pop.profiles, cap, params.ablation);

    SimulationResult result;
    NetworkState g = std::move(pop.state);
    result.triad_history.push_back(count_stable_triads(g, pop.profiles));
    if (options.record_trace) {
        result.trace.push_back(compute_metrics(g, model, community_seed(params.seed, 0)));
    }

    while (g.iteration() < params.max_iters) {
        const ProposalMap proposals = proposal_stage(g, model, params, pop.rng);
        NetworkState next = action_stage(g, model, proposals, params, pop.rng);
        if (options.on_step) {
            options.on_step(g, next, model);
        }
        g = std::move(next);
        result.triad_history.push_back(count_stable_triads(g, pop.profiles));
        if (options.record_trace) {
            result.trace.push_back(
                compute_metrics(g, model, community_seed(params.seed, g.iteration())));
        }
        if (has_converged(result.triad_history, cap, params.epsilon)) {
            result.converged = true;
            break;
        }
    }

    result.iterations = g.iteration();
    result.final_metrics = options.record_trace
                               ? result.trace.back()
                               : compute_metrics(g, model, community_seed(params.seed, g.iteration()));
    result.final_state = std::move(g);
    result.profiles = std::move(pop.profiles);
    return result;
}

} // namespace commform
