#pragma once
// Undirected simple graph over a fixed agent population.
//
// Each vertex's neighbor set is held as a bit row, which doubles as an
// ascending sorted set: iterating set bits yields neighbors in id order, and
// neighborhood intersections reduce to an AND + popcount over a few words.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace commform {

using AgentId = std::uint32_t;

/// Unordered vertex pair, stored with u < v.
struct Edge {
    AgentId u = 0;
    AgentId v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Normalizes the pair order. Self-loops are the caller's problem.
constexpr Edge make_edge(AgentId a, AgentId b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Fixed-capacity vertex set backed by 64-bit words.
class VertexSet {
  public:
    VertexSet() = default;
    explicit VertexSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
    VertexSet(std::size_t n, std::span<const std::uint64_t> words)
        : n_(n), words_(words.begin(), words.end()) {}

    std::size_t capacity() const noexcept { return n_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }
    std::span<std::uint64_t> words() noexcept { return words_; }

    bool contains(AgentId v) const noexcept { return (words_[v >> 6] >> (v & 63)) & 1u; }
    void insert(AgentId v) noexcept { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
    void erase(AgentId v) noexcept { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
    std::size_t size() const noexcept;
    bool empty() const noexcept;

    VertexSet& operator|=(std::span<const std::uint64_t> other) noexcept;
    VertexSet& operator&=(std::span<const std::uint64_t> other) noexcept;
    /// Removes every member of `other`.
    VertexSet& subtract(std::span<const std::uint64_t> other) noexcept;
    /// Complement within [0, capacity).
    VertexSet complement() const;
    /// In-place complement within [0, capacity).
    void flip() noexcept;
    void clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }
    /// Overwrites the members from a word row of the same capacity.
    void assign(std::span<const std::uint64_t> row) noexcept {
        std::copy(row.begin(), row.end(), words_.begin());
    }

    /// Ascending member list.
    std::vector<AgentId> to_vector() const;

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const int b = std::countr_zero(bits);
                f(static_cast<AgentId>(w * 64 + static_cast<std::size_t>(b)));
                bits &= bits - 1;
            }
        }
    }

    /// The `index`-th smallest member. Precondition: index < size().
    AgentId nth(std::size_t index) const;

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

class NetworkState {
  public:
    NetworkState() = default;
    /// Empty graph on n agents at iteration 0.
    explicit NetworkState(std::size_t n);

    /// Throws IdError for out-of-range endpoints and ContractError for
    /// self-loops or repeated pairs.
    static NetworkState from_edges(std::size_t n, std::span<const Edge> edges,
                                   std::uint64_t iteration = 0);

    std::size_t size() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::uint64_t iteration() const noexcept { return iteration_; }
    std::size_t words_per_row() const noexcept { return words_; }

    /// Range-checked; throws IdError.
    void check_id(AgentId v) const;

    std::size_t degree_unchecked(AgentId v) const noexcept { return degree_[v]; }
    bool has_edge(AgentId a, AgentId b) const noexcept {
        return (bits_[a * words_ + (b >> 6)] >> (b & 63)) & 1u;
    }
    std::span<const std::uint64_t> row(AgentId v) const noexcept {
        return {bits_.data() + v * words_, words_};
    }
    VertexSet neighbor_set(AgentId v) const { return VertexSet(n_, row(v)); }
    /// Ascending neighbor ids.
    std::vector<AgentId> neighbors(AgentId v) const;

    template <class F>
    void for_each_neighbor(AgentId v, F&& f) const {
        const std::uint64_t* r = bits_.data() + v * words_;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = r[w];
            while (bits != 0) {
                const int b = std::countr_zero(bits);
                f(static_cast<AgentId>(w * 64 + static_cast<std::size_t>(b)));
                bits &= bits - 1;
            }
        }
    }

    /// |N(a) ∩ N(b)|.
    std::uint32_t common_neighbors(AgentId a, AgentId b) const noexcept;
    /// |N(v) ∩ set|.
    std::uint32_t neighbors_in(AgentId v, const VertexSet& set) const noexcept;

    /// Sorted edge list.
    std::vector<Edge> edges() const;

    /// Successor state: (E \ deletions) ∪ additions, iteration + 1. Requires
    /// deletions ⊆ E, additions ∩ E = ∅, and the two sets disjoint; duplicate
    /// entries within either list are tolerated. Throws ContractError otherwise.
    NetworkState apply_changes(std::span<const Edge> deletions,
                               std::span<const Edge> additions) const;

    friend bool operator==(const NetworkState& a, const NetworkState& b) {
        return a.n_ == b.n_ && a.bits_ == b.bits_;
    }

  private:
    void set_bit(AgentId a, AgentId b) noexcept {
        bits_[a * words_ + (b >> 6)] |= std::uint64_t{1} << (b & 63);
    }
    void clear_bit(AgentId a, AgentId b) noexcept {
        bits_[a * words_ + (b >> 6)] &= ~(std::uint64_t{1} << (b & 63));
    }

    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint32_t> degree_;
    std::size_t edge_count_ = 0;
    std::uint64_t iteration_ = 0;
};

/// |N(v)|. Throws IdError when v >= n.
std::size_t degree(const NetworkState& g, AgentId v);

/// { w : d(v, w) = 2 }, ascending.
std::vector<AgentId> distance_two_candidates(const NetworkState& g, AgentId v);
VertexSet distance_two_set(const NetworkState& g, AgentId v);

/// Unordered adjacent pairs inside N(v).
std::size_t triangles_at(const NetworkState& g, AgentId v);

/// Neighbors of v with no other neighbor of v adjacent to them.
std::size_t isolated_neighbors(const NetworkState& g, AgentId v);

} // namespace commform
