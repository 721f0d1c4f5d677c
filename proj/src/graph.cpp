#include "commform/graph.hpp"

#include <algorithm>
#include <string>

#include "commform/errors.hpp"
#include "commform/kernels.hpp"

namespace commform {

std::size_t VertexSet::size() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

bool VertexSet::empty() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

VertexSet& VertexSet::operator|=(std::span<const std::uint64_t> other) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] |= other[w];
    }
    return *this;
}

VertexSet& VertexSet::operator&=(std::span<const std::uint64_t> other) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] &= other[w];
    }
    return *this;
}

VertexSet& VertexSet::subtract(std::span<const std::uint64_t> other) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] &= ~other[w];
    }
    return *this;
}

VertexSet VertexSet::complement() const {
    VertexSet out(n_);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        out.words_[w] = ~words_[w];
    }
    if (const std::size_t tail = n_ & 63; tail != 0 && !out.words_.empty()) {
        out.words_.back() &= (std::uint64_t{1} << tail) - 1;
    }
    return out;
}

void VertexSet::flip() noexcept {
    for (auto& w : words_) {
        w = ~w;
    }
    if (const std::size_t tail = n_ & 63; tail != 0 && !words_.empty()) {
        words_.back() &= (std::uint64_t{1} << tail) - 1;
    }
}

std::vector<AgentId> VertexSet::to_vector() const {
    std::vector<AgentId> out;
    out.reserve(size());
    for_each([&](AgentId v) { out.push_back(v); });
    return out;
}

AgentId VertexSet::nth(std::size_t index) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        const auto c = static_cast<std::size_t>(std::popcount(words_[w]));
        if (index < c) {
            std::uint64_t bits = words_[w];
            for (std::size_t i = 0; i < index; ++i) {
                bits &= bits - 1;
            }
            return static_cast<AgentId>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        }
        index -= c;
    }
    throw ContractError("VertexSet::nth: index out of range");
}

NetworkState::NetworkState(std::size_t n)
    : n_(n), words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0), degree_(n, 0) {}

NetworkState NetworkState::from_edges(std::size_t n, std::span<const Edge> edges,
                                      std::uint64_t iteration) {
    NetworkState g(n);
    g.iteration_ = iteration;
    for (const Edge& raw : edges) {
        g.check_id(raw.u);
        g.check_id(raw.v);
        if (raw.u == raw.v) {
            throw ContractError("self-loop on agent " + std::to_string(raw.u));
        }
        if (g.has_edge(raw.u, raw.v)) {
            throw ContractError("repeated edge (" + std::to_string(raw.u) + "," +
                                std::to_string(raw.v) + ")");
        }
        g.set_bit(raw.u, raw.v);
        g.set_bit(raw.v, raw.u);
        ++g.degree_[raw.u];
        ++g.degree_[raw.v];
        ++g.edge_count_;
    }
    return g;
}

void NetworkState::check_id(AgentId v) const {
    if (v >= n_) {
        throw IdError("agent id " + std::to_string(v) + " out of range for n=" + std::to_string(n_));
    }
}

std::vector<AgentId> NetworkState::neighbors(AgentId v) const {
    std::vector<AgentId> out;
    out.reserve(degree_[v]);
    for_each_neighbor(v, [&](AgentId u) { out.push_back(u); });
    return out;
}

std::uint32_t NetworkState::common_neighbors(AgentId a, AgentId b) const noexcept {
    return kernels::active().and_popcount(bits_.data() + a * words_, bits_.data() + b * words_,
                                          words_);
}

std::uint32_t NetworkState::neighbors_in(AgentId v, const VertexSet& set) const noexcept {
    return kernels::active().and_popcount(bits_.data() + v * words_, set.words().data(), words_);
}

std::vector<Edge> NetworkState::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (AgentId u = 0; u < n_; ++u) {
        for_each_neighbor(u, [&](AgentId v) {
            if (u < v) {
                out.push_back({u, v});
            }
        });
    }
    return out;
}

NetworkState NetworkState::apply_changes(std::span<const Edge> deletions,
                                         std::span<const Edge> additions) const {
    NetworkState next = *this;
    ++next.iteration_;
    for (const Edge& e : deletions) {
        check_id(e.u);
        check_id(e.v);
        if (!has_edge(e.u, e.v)) {
            throw ContractError("deletion of absent edge (" + std::to_string(e.u) + "," +
                                std::to_string(e.v) + ")");
        }
        if (!next.has_edge(e.u, e.v)) {
            continue; // duplicate deletion
        }
        next.clear_bit(e.u, e.v);
        next.clear_bit(e.v, e.u);
        --next.degree_[e.u];
        --next.degree_[e.v];
        --next.edge_count_;
    }
    for (const Edge& e : additions) {
        check_id(e.u);
        check_id(e.v);
        if (e.u == e.v) {
            throw ContractError("addition of self-loop on agent " + std::to_string(e.u));
        }
        if (has_edge(e.u, e.v)) {
            throw ContractError("addition of existing edge (" + std::to_string(e.u) + "," +
                                std::to_string(e.v) + ")");
        }
        if (next.has_edge(e.u, e.v)) {
            continue; // duplicate addition
        }
        next.set_bit(e.u, e.v);
        next.set_bit(e.v, e.u);
        ++next.degree_[e.u];
        ++next.degree_[e.v];
        ++next.edge_count_;
    }
    return next;
}

std::size_t degree(const NetworkState& g, AgentId v) {
    g.check_id(v);
    return g.degree_unchecked(v);
}

VertexSet distance_two_set(const NetworkState& g, AgentId v) {
    g.check_id(v);
    VertexSet reach(g.size());
    g.for_each_neighbor(v, [&](AgentId x) { reach |= g.row(x); });
    reach.subtract(g.row(v));
    reach.erase(v);
    return reach;
}

std::vector<AgentId> distance_two_candidates(const NetworkState& g, AgentId v) {
    return distance_two_set(g, v).to_vector();
}

std::size_t triangles_at(const NetworkState& g, AgentId v) {
    g.check_id(v);
    std::size_t twice = 0;
    g.for_each_neighbor(v, [&](AgentId x) { twice += g.common_neighbors(v, x); });
    return twice / 2;
}

std::size_t isolated_neighbors(const NetworkState& g, AgentId v) {
    g.check_id(v);
    std::size_t count = 0;
    g.for_each_neighbor(v, [&](AgentId x) {
        if (g.common_neighbors(v, x) == 0) {
            ++count;
        }
    });
    return count;
}

} // namespace commform
