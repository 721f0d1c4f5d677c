#include "commform/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace commform::kernels {

#ifndef COMMFORM_HAVE_AVX2
namespace avx2 {
bool compiled() noexcept { return false; }
std::uint32_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    return scalar::and_popcount(a, b, words);
}
void euclidean_matrix(const double* ax, const double* ay, std::size_t m, const double* bx,
                      const double* by, std::size_t k, double* out) {
    scalar::euclidean_matrix(ax, ay, m, bx, by, k, out);
}
void relax_row(const double* cost, const double* potential, double base, double* dist,
               std::int32_t* parent, std::int32_t from, std::size_t k) {
    scalar::relax_row(cost, potential, base, dist, parent, from, k);
}
} // namespace avx2
#endif

namespace {

bool cpu_has_avx2_popcnt() noexcept {
#if defined(COMMFORM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
    return false;
#endif
}

constexpr KernelTable kScalar{"scalar", &scalar::and_popcount, &scalar::euclidean_matrix,
                              &scalar::relax_row};
constexpr KernelTable kAvx2{"avx2", &avx2::and_popcount, &avx2::euclidean_matrix,
                            &avx2::relax_row};

const KernelTable& resolve() noexcept {
    const char* forced = std::getenv("COMMFORM_SIMD");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
        return kScalar;
    }
    if (const KernelTable* t = avx2_table()) {
        return *t;
    }
    return kScalar;
}

} // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
    static const bool ok = avx2::compiled() && cpu_has_avx2_popcnt();
    return ok ? &kAvx2 : nullptr;
}

const KernelTable& active() noexcept {
    static const KernelTable& table = resolve();
    return table;
}

} // namespace commform::kernels
