#pragma once
// Data-parallel inner loops used by the graph queries and the transport solver.
//
// Every kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64, an AVX2 variant in `kernels::avx2`. The variants are required to
// produce bit-identical results; `active()` selects one at first use based on
// CPU support, and COMMFORM_SIMD=scalar forces the reference path.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace commform::kernels {

/// popcount(a & b) over `words` 64-bit words.
using AndPopcountFn = std::uint32_t (*)(const std::uint64_t* a, const std::uint64_t* b,
                                        std::size_t words);

/// out[i * k + j] = ||(ax[i], ay[i]) - (bx[j], by[j])||_2 for i < m, j < k.
using EuclideanMatrixFn = void (*)(const double* ax, const double* ay, std::size_t m,
                                   const double* bx, const double* by, std::size_t k,
                                   double* out);

/// Dijkstra relaxation of one dense row:
/// cand = (base + cost[j]) - potential[j]; if cand < dist[j] then dist[j] = cand,
/// parent[j] = from. Settled entries are expected to hold -inf so they never update.
using RelaxRowFn = void (*)(const double* cost, const double* potential, double base,
                            double* dist, std::int32_t* parent, std::int32_t from,
                            std::size_t k);

struct KernelTable {
    std::string_view name;
    AndPopcountFn and_popcount;
    EuclideanMatrixFn euclidean_matrix;
    RelaxRowFn relax_row;
};

namespace scalar {
std::uint32_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
void euclidean_matrix(const double* ax, const double* ay, std::size_t m, const double* bx,
                      const double* by, std::size_t k, double* out);
void relax_row(const double* cost, const double* potential, double base, double* dist,
               std::int32_t* parent, std::int32_t from, std::size_t k);
} // namespace scalar

namespace avx2 {
/// False when the binary was built without the AVX2 translation unit.
bool compiled() noexcept;
std::uint32_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
void euclidean_matrix(const double* ax, const double* ay, std::size_t m, const double* bx,
                      const double* by, std::size_t k, double* out);
void relax_row(const double* cost, const double* potential, double base, double* dist,
               std::int32_t* parent, std::int32_t from, std::size_t k);
} // namespace avx2

const KernelTable& scalar_table() noexcept;
/// Null when AVX2 is unavailable at compile time or on this CPU.
const KernelTable* avx2_table() noexcept;

/// The table used by the library. Resolved once per process.
const KernelTable& active() noexcept;

} // namespace commform::kernels
