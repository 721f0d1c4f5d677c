// Compiled with -mavx2 -mpopcnt -mno-fma. Only reached through the dispatcher after a
// CPU feature check.
#include "commform/kernels.hpp"

#include <immintrin.h>

#include <bit>
#include <cmath>

namespace commform::kernels::avx2 {

bool compiled() noexcept { return true; }

namespace {

// Nibble-lookup popcount (Mula). Returns four 64-bit partial sums.
inline __m256i popcount_epi64(__m256i v) {
    const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, //
                                            0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i counts =
        _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
    return _mm256_sad_epu8(counts, _mm256_setzero_si256());
}

} // namespace

std::uint32_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    // Below two vectors the lookup setup costs more than popcnt per word.
    if (words < 8) {
        std::uint64_t total = 0;
        for (std::size_t w = 0; w < words; ++w) {
            total += static_cast<std::uint64_t>(_mm_popcnt_u64(a[w] & b[w]));
        }
        return static_cast<std::uint32_t>(total);
    }
    std::size_t w = 0;
    __m256i acc = _mm256_setzero_si256();
    for (; w + 4 <= words; w += 4) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + w));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + w));
        acc = _mm256_add_epi64(acc, popcount_epi64(_mm256_and_si256(va, vb)));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; w < words; ++w) {
        total += static_cast<std::uint64_t>(std::popcount(a[w] & b[w]));
    }
    return static_cast<std::uint32_t>(total);
}

void euclidean_matrix(const double* ax, const double* ay, std::size_t m, const double* bx,
                      const double* by, std::size_t k, double* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const __m256d xi = _mm256_set1_pd(ax[i]);
        const __m256d yi = _mm256_set1_pd(ay[i]);
        double* row = out + i * k;
        std::size_t j = 0;
        for (; j + 4 <= k; j += 4) {
            const __m256d dx = _mm256_sub_pd(xi, _mm256_loadu_pd(bx + j));
            const __m256d dy = _mm256_sub_pd(yi, _mm256_loadu_pd(by + j));
            const __m256d sq = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
            _mm256_storeu_pd(row + j, _mm256_sqrt_pd(sq));
        }
        for (; j < k; ++j) {
            const double dx = ax[i] - bx[j];
            const double dy = ay[i] - by[j];
            row[j] = std::sqrt(dx * dx + dy * dy);
        }
    }
}

void relax_row(const double* cost, const double* potential, double base, double* dist,
               std::int32_t* parent, std::int32_t from, std::size_t k) {
    const __m256d vbase = _mm256_set1_pd(base);
    std::size_t j = 0;
    for (; j + 4 <= k; j += 4) {
        const __m256d cand =
            _mm256_sub_pd(_mm256_add_pd(vbase, _mm256_loadu_pd(cost + j)), _mm256_loadu_pd(potential + j));
        const __m256d cur = _mm256_loadu_pd(dist + j);
        const __m256d lt = _mm256_cmp_pd(cand, cur, _CMP_LT_OQ);
        const int bits = _mm256_movemask_pd(lt);
        if (bits == 0) {
            continue;
        }
        _mm256_storeu_pd(dist + j, _mm256_blendv_pd(cur, cand, lt));
        for (int lane = 0; lane < 4; ++lane) {
            if (bits & (1 << lane)) {
                parent[j + lane] = from;
            }
        }
    }
    for (; j < k; ++j) {
        const double cand = (base + cost[j]) - potential[j];
        if (cand < dist[j]) {
            dist[j] = cand;
            parent[j] = from;
        }
    }
}

} // namespace commform::kernels::avx2
