#include "commform/kernels.hpp"

#include <bit>
#include <cmath>

namespace commform::kernels::scalar {

std::uint32_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    std::uint32_t total = 0;
    for (std::size_t w = 0; w < words; ++w) {
        total += static_cast<std::uint32_t>(std::popcount(a[w] & b[w]));
    }
    return total;
}

void euclidean_matrix(const double* ax, const double* ay, std::size_t m, const double* bx,
                      const double* by, std::size_t k, double* out) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double dx = ax[i] - bx[j];
            const double dy = ay[i] - by[j];
            out[i * k + j] = std::sqrt(dx * dx + dy * dy);
        }
    }
}

void relax_row(const double* cost, const double* potential, double base, double* dist,
               std::int32_t* parent, std::int32_t from, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
        const double cand = (base + cost[j]) - potential[j];
        if (cand < dist[j]) {
            dist[j] = cand;
            parent[j] = from;
        }
    }
}

} // namespace commform::kernels::scalar
