#include "commform/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "commform/errors.hpp"
#include "commform/kernels.hpp"
#include "commform/metrics.hpp"
#include "commform/transport.hpp"

namespace commform {

bool LocalSignature::normalized() const noexcept {
    if (points.empty()) {
        return false;
    }
    double sum = 0.0;
    for (const auto& p : points) {
        if (!(p.weight > 0.0)) {
            return false;
        }
        sum += p.weight;
    }
    return std::abs(sum - 1.0) <= 1e-9;
}

LocalSignature local_signature(const NetworkState& g, std::span<const AttributeType> types) {
    if (types.size() != g.size()) {
        throw ContractError("type vector does not match the vertex count");
    }
    LocalSignature sig;
    const std::size_t n = g.size();
    if (n == 0) {
        return sig;
    }
    std::vector<std::pair<double, double>> coords;
    coords.reserve(n);
    for (AgentId v = 0; v < n; ++v) {
        coords.emplace_back(vertex_assortativity(g, types, v), vertex_clustering(g, v));
    }
    std::sort(coords.begin(), coords.end());
    const double unit = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && coords[j] == coords[i]) {
            ++j;
        }
        sig.points.push_back({coords[i].first, coords[i].second,
                              static_cast<double>(j - i) * unit});
        i = j;
    }
    return sig;
}

double wasserstein1(const LocalSignature& p, const LocalSignature& q) {
    if (!p.normalized() || !q.normalized()) {
        throw ContractError("wasserstein1 requires normalized signatures");
    }
    const std::size_t m = p.points.size();
    const std::size_t k = q.points.size();
    std::vector<double> px(m), py(m), pw(m), qx(k), qy(k), qw(k);
    for (std::size_t i = 0; i < m; ++i) {
        px[i] = p.points[i].assortativity;
        py[i] = p.points[i].clustering;
        pw[i] = p.points[i].weight;
    }
    for (std::size_t j = 0; j < k; ++j) {
        qx[j] = q.points[j].assortativity;
        qy[j] = q.points[j].clustering;
        qw[j] = q.points[j].weight;
    }
    // Rescale the second side so both totals agree exactly up to rounding.
    double sp = 0.0, sq = 0.0;
    for (double w : pw) sp += w;
    for (double w : qw) sq += w;
    for (double& w : qw) w *= sp / sq;

    std::vector<double> cost(m * k);
    kernels::active().euclidean_matrix(px.data(), py.data(), m, qx.data(), qy.data(), k,
                                       cost.data());
    return solve_transport(pw, qw, cost).cost;
}

double smape(double x, double y) noexcept {
    const double denom = std::abs(x) + std::abs(y);
    if (denom == 0.0) {
        return 0.0;
    }
    return std::abs(x - y) / denom;
}

NetworkSummary summarize(const NetworkState& g, std::span<const AttributeType> types) {
    NetworkSummary s;
    s.signature = local_signature(g, types);
    s.triangles = static_cast<double>(triangle_count(g));
    s.assortativity = global_assortativity(g, types);
    return s;
}

double global_component(const NetworkSummary& a, const NetworkSummary& b) noexcept {
    return (smape(a.triangles, b.triangles) + smape(a.assortativity, b.assortativity)) / 2.0;
}

double global_component(const NetworkState& g_obs, const NetworkState& g_sim,
                        std::span<const AttributeType> types_obs,
                        std::span<const AttributeType> types_sim) {
    if (types_obs.size() != g_obs.size() || types_sim.size() != g_sim.size()) {
        throw ContractError("type vector does not match the vertex count");
    }
    const double t_obs = static_cast<double>(triangle_count(g_obs));
    const double t_sim = static_cast<double>(triangle_count(g_sim));
    return (smape(t_obs, t_sim) +
            smape(global_assortativity(g_obs, types_obs), global_assortativity(g_sim, types_sim))) /
           2.0;
}

LossReport loss(const NetworkSummary& obs, const NetworkSummary& sim) {
    LossReport r;
    // Order the transport arguments canonically so loss(a, b) == loss(b, a) bitwise.
    const bool swap = std::lexicographical_compare(
        sim.signature.points.begin(), sim.signature.points.end(), obs.signature.points.begin(),
        obs.signature.points.end(), [](const SignaturePoint& x, const SignaturePoint& y) {
            return std::tie(x.assortativity, x.clustering, x.weight) <
                   std::tie(y.assortativity, y.clustering, y.weight);
        });
    r.distributional = swap ? wasserstein1(sim.signature, obs.signature)
                            : wasserstein1(obs.signature, sim.signature);
    r.smape_triangles = smape(obs.triangles, sim.triangles);
    r.smape_assortativity = smape(obs.assortativity, sim.assortativity);
    r.global = (r.smape_triangles + r.smape_assortativity) / 2.0;
    r.total = (r.distributional + r.global) / 2.0;
    return r;
}

LossReport loss(const NetworkState& g_obs, const NetworkState& g_sim,
                std::span<const AttributeType> types_obs, std::span<const AttributeType> types_sim) {
    return loss(summarize(g_obs, types_obs), summarize(g_sim, types_sim));
}

} // namespace commform
