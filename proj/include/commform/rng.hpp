#pragma once
// Counter-derived random streams.
//
// Every random decision in a run draws from a stream keyed by
// (run seed, stage, iteration, agent). Streams are independent of the order
// in which agents are processed, so simultaneous stages stay simultaneous and
// runs are reproducible across platforms (no std:: distributions involved).

#include <cstdint>
#include <limits>

namespace commform {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive combination of a running hash with one more word.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
    return mix64(h ^ mix64(v + 0x632be59bd9b4e019ULL));
}

/// SplitMix64; satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return unit() < p; }

  private:
    std::uint64_t state_;
};

enum class Stage : std::uint64_t { Init = 1, Proposal = 2, Action = 3 };

/// Source of the per-agent streams for one run.
class RunRng {
  public:
    explicit constexpr RunRng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    SplitMix64 stream(Stage stage, std::uint64_t iteration, std::uint64_t agent) const noexcept {
        std::uint64_t h = hash_combine(mix64(seed_), static_cast<std::uint64_t>(stage));
        h = hash_combine(h, iteration);
        h = hash_combine(h, agent);
        return SplitMix64(h);
    }

  private:
    std::uint64_t seed_;
};

} // namespace commform
