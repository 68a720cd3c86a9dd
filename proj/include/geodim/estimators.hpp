#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geodim/graph.hpp"
#include "geodim/wd.hpp"

namespace geodim {

enum class EstimatorMethod { w1, w2, w2_symmetric, w3, w4 };

enum class EstimatorFailure {
    degenerate_degree,  ///< examined vertex has degree below 2 (or no vertex exists)
    empty_denominator,  ///< no qualifying substructure anywhere in the graph
};

/// Raw counts behind a statistic, populated as applicable per method.
struct EstimatorDiagnostics {
    std::optional<std::uint64_t> degree;       ///< examined vertex degree (W1, W4)
    std::optional<std::uint64_t> local_edges;  ///< edges inside its neighborhood (W1, W4)
    std::optional<std::uint64_t> triangles;    ///< numerator source (W2, W2sym)
    std::optional<std::uint64_t> denominator;  ///< two-path count (W2, W2sym)
    std::optional<std::uint64_t> qualifying;   ///< vertices of degree >= 2 (W3)
};

/// Result of one estimator on one graph: either a statistic with its
/// inverted dimension, or a typed failure. Never both.
struct EstimatorOutcome {
    std::optional<double> statistic;
    std::optional<int> delta;
    bool clamped = false;
    std::optional<EstimatorFailure> failure;
    EstimatorDiagnostics diagnostics;

    bool ok() const noexcept { return statistic.has_value(); }
};

namespace detail {

inline EstimatorOutcome statistic_outcome(double w, int cap, EstimatorDiagnostics diag) {
    EstimatorOutcome out;
    out.statistic = w;
    const DimensionEstimate est = dim_from_stat(w, cap);
    out.delta = est.delta;
    out.clamped = est.clamped;
    out.diagnostics = diag;
    return out;
}

inline EstimatorOutcome failure_outcome(EstimatorFailure failure, EstimatorDiagnostics diag) {
    EstimatorOutcome out;
    out.failure = failure;
    out.diagnostics = diag;
    return out;
}

/// Statistic of one examined vertex: local edges over C(degree, 2), or a
/// degenerate-degree failure when fewer than two neighbors exist.
inline EstimatorOutcome examined_vertex_outcome(const Graph& g, std::uint32_t v, int cap) {
    EstimatorDiagnostics diag;
    const std::uint64_t deg = g.degree(v);
    diag.degree = deg;
    if (deg < 2) return failure_outcome(EstimatorFailure::degenerate_degree, diag);
    const std::uint64_t local = local_edge_count(g, v);
    diag.local_edges = local;
    const double w = static_cast<double>(local) / static_cast<double>(choose2(deg));
    return statistic_outcome(w, cap, diag);
}

} // namespace detail

/// Neighborhood statistic of the busiest vertex: local edge count over
/// C(degree, 2) at the max-degree vertex, smallest label on ties. Labels
/// must already be shuffled for the tie rule to be exchangeable.
inline EstimatorOutcome w1(const Graph& g, int cap = kDefaultDimensionCap) {
    const std::uint32_t n = g.vertex_count();
    if (n == 0) return detail::failure_outcome(EstimatorFailure::degenerate_degree, {});
    std::uint32_t pick = 0;
    for (std::uint32_t v = 1; v < n; ++v) {
        if (g.degree(v) > g.degree(pick)) pick = v;
    }
    return detail::examined_vertex_outcome(g, pick, cap);
}

/// Global triangle statistic: triangles over the label-dependent two-path
/// count (middle vertex largest). Labels must already be shuffled.
inline EstimatorOutcome w2(const Graph& g, int cap = kDefaultDimensionCap) {
    EstimatorDiagnostics diag;
    const std::uint64_t tri = count_triangles(g);
    const std::uint64_t den = count_max_labeled_cherries(g);
    diag.triangles = tri;
    diag.denominator = den;
    if (den == 0) return detail::failure_outcome(EstimatorFailure::empty_denominator, diag);
    const double w = static_cast<double>(tri) / static_cast<double>(den);
    return detail::statistic_outcome(w, cap, diag);
}

/// Label-free variant of w2: three times the triangles over all two-paths.
inline EstimatorOutcome w2_symmetric(const Graph& g, int cap = kDefaultDimensionCap) {
    EstimatorDiagnostics diag;
    const std::uint64_t tri = count_triangles(g);
    const std::uint64_t den = count_cherries(g);
    diag.triangles = tri;
    diag.denominator = den;
    if (den == 0) return detail::failure_outcome(EstimatorFailure::empty_denominator, diag);
    const double w = 3.0 * static_cast<double>(tri) / static_cast<double>(den);
    return detail::statistic_outcome(w, cap, diag);
}

/// Average of the per-vertex neighborhood statistic over all vertices of
/// degree at least 2. The ratios are summed in sorted order so the result
/// depends only on their multiset, making the statistic label-invariant
/// bit for bit, not just up to rounding.
inline EstimatorOutcome w3(const Graph& g, int cap = kDefaultDimensionCap) {
    EstimatorDiagnostics diag;
    std::vector<double> ratios;
    const std::uint32_t n = g.vertex_count();
    for (std::uint32_t v = 0; v < n; ++v) {
        const std::uint64_t deg = g.degree(v);
        if (deg < 2) continue;
        ratios.push_back(static_cast<double>(local_edge_count(g, v)) /
                         static_cast<double>(choose2(deg)));
    }
    diag.qualifying = ratios.size();
    if (ratios.empty()) return detail::failure_outcome(EstimatorFailure::empty_denominator, diag);
    std::sort(ratios.begin(), ratios.end());
    double sum = 0.0;
    for (double ratio : ratios) sum += ratio;
    return detail::statistic_outcome(sum / static_cast<double>(ratios.size()), cap, diag);
}

/// Neighborhood statistic of one designated vertex, label 0. Labels must
/// already be shuffled so the designated vertex is exchangeable.
inline EstimatorOutcome w4(const Graph& g, int cap = kDefaultDimensionCap) {
    if (g.vertex_count() == 0)
        return detail::failure_outcome(EstimatorFailure::degenerate_degree, {});
    return detail::examined_vertex_outcome(g, 0, cap);
}

/// One-call front end: shuffles labels first for the label-dependent
/// methods (W1, W2, W4), then applies the statistic and inverts it.
/// Label-invariant methods ignore the seed.
///
/// The shuffle only reaches each statistic through the examined vertex
/// (W1, W4) or the per-vertex smaller-label counts (W2), so the
/// permutation is applied in place of rebuilding the graph. Every outcome
/// is identical, bit for bit, to the method run on shuffle_labels(g, seed).
inline EstimatorOutcome estimate_dimension(const Graph& g, EstimatorMethod method,
                                           std::uint64_t seed, int cap = kDefaultDimensionCap) {
    if (method == EstimatorMethod::w2_symmetric) return w2_symmetric(g, cap);
    if (method == EstimatorMethod::w3) return w3(g, cap);

    const std::uint32_t n = g.vertex_count();
    switch (method) {
        case EstimatorMethod::w1: {
            if (n == 0) return w1(g, cap);
            const auto label = detail::shuffle_permutation(n, seed);
            // Max degree, breaking ties toward the smallest shuffled label.
            std::uint32_t pick = 0;
            for (std::uint32_t v = 1; v < n; ++v) {
                if (g.degree(v) > g.degree(pick) ||
                    (g.degree(v) == g.degree(pick) && label[v] < label[pick])) {
                    pick = v;
                }
            }
            return detail::examined_vertex_outcome(g, pick, cap);
        }
        case EstimatorMethod::w2: {
            EstimatorDiagnostics diag;
            const auto label = detail::shuffle_permutation(n, seed);
            const std::uint64_t tri = count_triangles(g);
            std::uint64_t den = 0;
            for (std::uint32_t k = 0; k < n; ++k) {
                std::uint64_t below = 0;
                for (const auto u : g.neighbors(k)) below += label[u] < label[k];
                den += choose2(below);
            }
            diag.triangles = tri;
            diag.denominator = den;
            if (den == 0) return detail::failure_outcome(EstimatorFailure::empty_denominator, diag);
            const double w = static_cast<double>(tri) / static_cast<double>(den);
            return detail::statistic_outcome(w, cap, diag);
        }
        case EstimatorMethod::w4: {
            if (n == 0) return w4(g, cap);
            const auto label = detail::shuffle_permutation(n, seed);
            std::uint32_t designated = 0;
            for (std::uint32_t v = 0; v < n; ++v) {
                if (label[v] == 0) {
                    designated = v;
                    break;
                }
            }
            return detail::examined_vertex_outcome(g, designated, cap);
        }
        default: break;
    }
    throw std::invalid_argument("estimate_dimension: unknown method");
}

inline const char* method_name(EstimatorMethod method) {
    switch (method) {
        case EstimatorMethod::w1: return "W1";
        case EstimatorMethod::w2: return "W2";
        case EstimatorMethod::w2_symmetric: return "W2sym";
        case EstimatorMethod::w3: return "W3";
        case EstimatorMethod::w4: return "W4";
    }
    return "?";
}

inline EstimatorMethod parse_method(std::string_view text) {
    if (text == "W1") return EstimatorMethod::w1;
    if (text == "W2") return EstimatorMethod::w2;
    if (text == "W2sym") return EstimatorMethod::w2_symmetric;
    if (text == "W3") return EstimatorMethod::w3;
    if (text == "W4") return EstimatorMethod::w4;
    throw ConfigError("unknown estimator method '" + std::string(text) +
                      "' (expected W1, W2, W2sym, W3 or W4)");
}

inline const char* failure_name(EstimatorFailure failure) {
    switch (failure) {
        case EstimatorFailure::degenerate_degree: return "degenerate-degree";
        case EstimatorFailure::empty_denominator: return "empty-denominator";
    }
    return "?";
}

} // namespace geodim
