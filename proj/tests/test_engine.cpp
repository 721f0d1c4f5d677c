#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "commform/engine.hpp"
#include "commform/errors.hpp"
#include "support.hpp"

using namespace commform;
using testing::graph_of;

namespace {

using testing::Matrix;

constexpr Strategy kHmLc{AttributeStrategy::Homophily, StructureStrategy::SocialCapital};
constexpr Strategy kHmLe{AttributeStrategy::Homophily, StructureStrategy::Embedded};
constexpr Strategy kHrLc{AttributeStrategy::Heterophily, StructureStrategy::SocialCapital};
constexpr Strategy kHrLe{AttributeStrategy::Heterophily, StructureStrategy::Embedded};
constexpr auto Z = AttributeType::Zero;
constexpr auto O = AttributeType::One;

ModelParams small_params(std::size_t n, std::size_t kappa) {
    ModelParams p;
    p.n = n;
    p.kappa = kappa;
    return p;
}

bool is_stable(const Matrix& m, const std::vector<AgentProfile>& pr, AgentId a, AgentId b, AgentId c) {
    const bool ab = m[a][b], bc = m[b][c], ac = m[a][c];
    const int edges = ab + bc + ac;
    auto all = [&](Strategy s) {
        return pr[a].strategy == s && pr[b].strategy == s && pr[c].strategy == s;
    };
    const bool same_type = pr[a].type == pr[b].type && pr[b].type == pr[c].type;
    if (edges == 3) {
        return all(kHmLe) && same_type;
    }
    if (edges != 2) {
        return false;
    }
    const AgentId center = ab && bc ? b : ab && ac ? a : c;
    const AgentId e1 = center == a ? b : a;
    const AgentId e2 = center == c ? b : c;
    if (all(kHmLc) && same_type) {
        return true;
    }
    return all(kHrLc) && pr[e1].type == pr[e2].type && pr[center].type != pr[e1].type;
}

std::size_t bf_stable_triads(const NetworkState& g, const std::vector<AgentProfile>& pr) {
    const auto m = testing::matrix_of(g);
    std::size_t count = 0;
    for (AgentId a = 0; a < g.size(); ++a) {
        for (AgentId b = a + 1; b < g.size(); ++b) {
            for (AgentId c = b + 1; c < g.size(); ++c) {
                count += is_stable(m, pr, a, b, c) ? 1 : 0;
            }
        }
    }
    return count;
}

} // namespace

TEST_CASE("initialize") {
    ModelParams p;
    p.n = 40;
    p.alpha = 1.0;
    p.beta = 1.0;
    for (const auto& prof : initialize(p).profiles) {
        CHECK(prof.strategy == kHmLc);
    }
    p.alpha = 0.0;
    p.beta = 0.0;
    const auto pop = initialize(p);
    for (const auto& prof : pop.profiles) {
        CHECK(prof.strategy == kHrLe);
    }
    CHECK(pop.state.edge_count() == 0);
    p.alpha = 0.3;
    p.beta = 0.6;
    p.seed = 99;
    CHECK(initialize(p).profiles == initialize(p).profiles);

    p.exact_type_counts = true;
    p.omega = {0.25, 0.75};
    const auto exact = initialize(p);
    CHECK(std::count_if(exact.profiles.begin(), exact.profiles.end(),
                        [](const AgentProfile& a) { return a.type == Z; }) == 10);

    p.alpha = 1.5;
    CHECK_THROWS_AS(initialize(p), ConfigError);
    p.alpha = 0.5;
    p.n = 1;
    CHECK_THROWS_AS(initialize(p), ConfigError);
}

TEST_CASE("proposal stage") {
    const RunRng rng(1);
    SUBCASE("same-type social-capital homophiles propose to each other") {
        const auto profiles = testing::uniform_profiles({Z, Z}, kHmLc);
        const UtilityModel model(profiles, 10, Ablation::None);
        const auto map = proposal_stage(NetworkState(2), model, small_params(2, 10), rng);
        CHECK(map.target(0) == AgentId{1});
        CHECK(map.target(1) == AgentId{0});
    }
    SUBCASE("cross-type embedded homophiles gain nothing") {
        const auto profiles = testing::uniform_profiles({Z, O}, kHmLe);
        const UtilityModel model(profiles, 10, Ablation::None);
        CHECK(proposal_stage(NetworkState(2), model, small_params(2, 10), rng).size() == 0);
    }
    SUBCASE("an agent at the degree cap does not propose") {
        // 0 has two neighbors at kappa = 2; 3 would be an attractive stranger.
        const auto g = graph_of(4, {{0, 1}, {0, 2}});
        const auto profiles = testing::uniform_profiles({Z, Z, Z, Z}, kHmLc);
        const UtilityModel model(profiles, 2, Ablation::None);
        const auto map = proposal_stage(g, model, small_params(4, 2), rng);
        CHECK_FALSE(map.target(0).has_value());
        CHECK(map.target(3).has_value());
    }
    SUBCASE("proposals only target non-neighbors") {
        std::mt19937_64 gen(3);
        for (int trial = 0; trial < 50; ++trial) {
            const auto g = testing::random_graph(20, 0.2, gen);
            const auto profiles = testing::random_profiles(20, gen);
            const UtilityModel model(profiles, 10, Ablation::None);
            const auto map = proposal_stage(g, model, small_params(20, 10), RunRng(trial));
            for (AgentId v = 0; v < 20; ++v) {
                if (auto t = map.target(v)) {
                    CHECK(*t != v);
                    CHECK_FALSE(g.has_edge(v, *t));
                }
            }
        }
    }
}

TEST_CASE("action stage") {
    const RunRng rng(2);
    SUBCASE("mutual proposals create one edge") {
        const auto profiles = testing::uniform_profiles({Z, Z}, kHmLc);
        const UtilityModel model(profiles, 10, Ablation::None);
        const auto params = small_params(2, 10);
        const auto map = proposal_stage(NetworkState(2), model, params, rng);
        const auto next = action_stage(NetworkState(2), model, map, params, rng);
        CHECK(next.edges() == std::vector<Edge>{{0, 1}});
    }
    SUBCASE("heterophile drops the same-type neighbor") {
        const auto g = graph_of(3, {{0, 1}, {0, 2}, {1, 2}});
        const auto profiles = testing::uniform_profiles({Z, Z, O}, kHrLc);
        const UtilityModel model(profiles, 10, Ablation::None);
        const auto actions = select_actions(g, model, ProposalMap(3), small_params(3, 10), rng);
        CHECK(actions[0].kind == AgentAction::Kind::Delete);
        CHECK(actions[0].other == 1);
        CHECK(actions[0].gain * 10 == model.denominator());
    }
    SUBCASE("nothing to gain leaves the graph unchanged") {
        const auto g = graph_of(4, {{0, 1}, {1, 2}, {0, 2}});
        const auto profiles = testing::uniform_profiles({Z, Z, Z, Z}, kHmLe);
        const UtilityModel model(profiles, 10, Ablation::None);
        const auto params = small_params(4, 10);
        const auto next = action_stage(g, model, ProposalMap(4), params, rng);
        CHECK(next == g);
        CHECK(next.iteration() == 1);
    }
    SUBCASE("a proposer one below the cap may only accept its own target") {
        // kappa = 3: agent 0 has two neighbors and proposed to 3; agent 4 proposed to 0.
        const auto g = graph_of(5, {{0, 1}, {0, 2}});
        const auto profiles = testing::uniform_profiles({Z, O, O, Z, Z}, kHmLc);
        const UtilityModel model(profiles, 3, Ablation::None);
        ProposalMap map(5);
        map.set(0, 3);
        map.set(4, 0);
        const auto actions = select_actions(g, model, map, small_params(5, 3), rng);
        CHECK_FALSE((actions[0].kind == AgentAction::Kind::Accept && actions[0].other == 4));
    }
}

TEST_CASE("stable triads") {
    SUBCASE("same-type embedded homophile triangle") {
        const auto tri = graph_of(3, {{0, 1}, {1, 2}, {0, 2}});
        CHECK(count_stable_triads(tri, testing::uniform_profiles({Z, Z, Z}, kHmLe)) == 1);
        auto mixed = testing::uniform_profiles({Z, Z, Z}, kHmLe);
        mixed[2].strategy = kHmLc;
        CHECK(count_stable_triads(tri, mixed) == 0);
    }
    SUBCASE("heterophile wedge with an odd center") {
        const auto wedge = graph_of(3, {{0, 1}, {1, 2}});
        CHECK(count_stable_triads(wedge, testing::uniform_profiles({Z, O, Z}, kHrLc)) == 1);
        CHECK(count_stable_triads(wedge, testing::uniform_profiles({Z, Z, O}, kHrLc)) == 0);
    }
    SUBCASE("homophile social-capital wedge") {
        const auto wedge = graph_of(3, {{0, 1}, {1, 2}});
        CHECK(count_stable_triads(wedge, testing::uniform_profiles({O, O, O}, kHmLc)) == 1);
        const auto closed = graph_of(3, {{0, 1}, {1, 2}, {0, 2}});
        CHECK(count_stable_triads(closed, testing::uniform_profiles({O, O, O}, kHmLc)) == 0);
    }
    SUBCASE("brute force agreement") {
        std::mt19937_64 gen(4);
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t n = 3 + gen() % 18;
            const auto g = testing::random_graph(n, 0.1 + 0.05 * static_cast<double>(gen() % 10), gen);
            auto profiles = testing::random_profiles(n, gen);
            REQUIRE(count_stable_triads(g, profiles) == bf_stable_triads(g, profiles));
        }
    }
}

TEST_CASE("convergence window") {
    const std::vector<std::size_t> flat(10, 5);
    CHECK(has_converged(flat, 10, 1e-9));
    std::vector<std::size_t> ramp(10);
    std::iota(ramp.begin(), ramp.end(), std::size_t{0});
    CHECK_FALSE(has_converged(ramp, 10, 1e-9));
    CHECK_FALSE(has_converged(std::span(flat).first(9), 10, 1e-9));
    std::vector<std::size_t> settles{0, 1, 2, 3, 3, 3};
    CHECK(has_converged(settles, 3, 1e-9));
    CHECK_FALSE(has_converged(settles, 4, 1e-9));
}

TEST_CASE("tiny simulations") {
    SUBCASE("two same-type agents with one slot pair up") {
        ModelParams p = small_params(2, 1);
        p.alpha = 1.0;
        p.beta = 1.0;
        p.omega = {1.0, 0.0};
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            p.seed = seed;
            const auto r = simulate(p);
            CHECK(r.converged);
            CHECK(r.final_state.edges() == std::vector<Edge>{{0, 1}});
        }
    }
    SUBCASE("cross-type embedded homophiles never connect") {
        ModelParams p = small_params(2, 10);
        p.alpha = 1.0;
        p.beta = 0.0;
        p.exact_type_counts = true;
        const auto r = simulate(p);
        REQUIRE(r.profiles[0].type != r.profiles[1].type);
        CHECK(r.converged);
        CHECK(r.final_state.edge_count() == 0);
        CHECK(r.iterations == 9);
    }
}

TEST_CASE("default-size run") {
    ModelParams p;
    p.seed = 7;
    const auto r = simulate(p);
    CHECK(r.converged);
    CHECK(r.iterations <= 1000);
    CHECK(r.trace.size() == r.iterations + 1);
    CHECK(std::is_sorted(r.triad_history.begin(), r.triad_history.end()));
    CHECK(r.final_metrics == r.trace.back());
    CHECK(r.final_metrics.stable_triads == r.triad_history.back());
}

TEST_CASE("structural invariants hold along runs") {
    for (Ablation mode : {Ablation::None, Ablation::NoBudget, Ablation::GlobalKnowledge,
                          Ablation::IgnoreAttribute, Ablation::IgnoreStructure}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            ModelParams p;
            p.n = 60;
            p.kappa = 6;
            p.alpha = 0.25 * static_cast<double>(seed);
            p.beta = 1.0 - 0.25 * static_cast<double>(seed);
            p.seed = seed;
            p.ablation = mode;
            p.max_iters = 200;
            const std::size_t cap = p.effective_kappa();
            std::size_t violations = 0;
            SimulationOptions opt;
            opt.record_trace = false;
            opt.on_step = [&](const NetworkState& before, const NetworkState& after,
                              const UtilityModel& model) {
                for (AgentId v = 0; v < after.size(); ++v) {
                    const auto d0 = before.degree_unchecked(v);
                    const auto d1 = after.degree_unchecked(v);
                    const double u = model.breakdown(after, v).total;
                    violations += d1 > cap || d1 > d0 + 2 || u < 0.0 || u > 2.0 ? 1 : 0;
                }
            };
            const auto r = simulate(p, opt);
            CAPTURE(to_string(mode));
            CAPTURE(seed);
            CHECK(violations == 0);
            CHECK(r.iterations >= 1);
        }
    }
}

TEST_CASE("runs are deterministic") {
    ModelParams p;
    p.n = 80;
    p.seed = 1234;
    p.alpha = 0.3;
    p.beta = 0.8;
    const auto a = simulate(p);
    const auto b = simulate(p);
    CHECK(a.final_state == b.final_state);
    CHECK(a.trace == b.trace);
    CHECK(a.triad_history == b.triad_history);
    p.seed = 1235;
    CHECK_FALSE(simulate(p).final_state == a.final_state);
}

TEST_CASE("stage outcomes do not depend on processing order") {
    std::mt19937_64 gen(8);
    ModelParams p;
    p.n = 50;
    p.seed = 31;
    const auto pop = initialize(p);
    const UtilityModel model(pop.profiles, p.kappa, p.ablation);
    NetworkState g = pop.state;
    std::vector<AgentId> order(p.n);
    std::iota(order.begin(), order.end(), AgentId{0});
    for (int step = 0; step < 25; ++step) {
        std::shuffle(order.begin(), order.end(), gen);
        const auto map = proposal_stage(g, model, p, pop.rng);
        REQUIRE(proposal_stage(g, model, p, pop.rng, order) == map);
        const auto actions = select_actions(g, model, map, p, pop.rng);
        REQUIRE(select_actions(g, model, map, p, pop.rng, order) == actions);
        g = apply_actions(g, actions, p);
    }
    CHECK(g.edge_count() > 0);
}

// The stage evaluates deletions as if v's own proposal were already accepted.
// Here that assumption makes dropping a stable-wedge partner profitable, so
// the stable-triad count can fall in a single step.
TEST_CASE("assumed proposal can break a stable wedge") {
    // v=0, e=1, w=2, y=3, x=4; v proposed to x.
    const auto g = graph_of(5, {{0, 1}, {0, 2}, {0, 3}, {1, 3}, {1, 4}});
    const auto profiles = testing::uniform_profiles({Z, Z, Z, O, Z}, kHmLc);
    const UtilityModel model(profiles, 10, Ablation::None);
    const auto params = small_params(5, 10);
    ProposalMap map(5);
    map.set(0, 4);
    const RunRng rng(0);

    CHECK(model.scaled_delta(g, 0, EdgeChange::remove(1), std::nullopt) == 0);
    CHECK(model.scaled_delta(g, 0, EdgeChange::remove(1), AgentId{4}) * 10 == model.denominator());

    const auto before = count_stable_triads(g, profiles);
    const auto actions = select_actions(g, model, map, params, rng);
    CHECK(actions[0].kind == AgentAction::Kind::Delete);
    CHECK(actions[0].other == 1);
    const auto after = count_stable_triads(apply_actions(g, actions, params), profiles);
    CHECK(before == 2);
    CHECK(after < before);
}

TEST_CASE("apply_actions enforces the cap") {
    const auto g = graph_of(3, {{0, 1}});
    std::vector<AgentAction> actions(3);
    actions[2] = {AgentAction::Kind::Accept, 0, 1};
    CHECK_THROWS_AS(apply_actions(g, actions, small_params(3, 1)), ContractError);
    CHECK(apply_actions(g, actions, small_params(3, 2)).edge_count() == 2);
}
