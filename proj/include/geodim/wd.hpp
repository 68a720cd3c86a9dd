#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "geodim/specfun.hpp"

namespace geodim {

/// Default upper bound for dimension searches.
inline constexpr int kDefaultDimensionCap = 4096;

/// Probability that two independent uniform points in the d-dimensional
/// unit ball lie within distance 1 of each other:
///   w_d = (3/2) * P{ Beta(1/2, (d+1)/2) >= 1/4 }.
/// Strictly decreasing in d, w_1 = 3/4, and w_d -> 0 as d grows.
///
/// The tail is evaluated through the reflection I_{3/4}((d+1)/2, 1/2) =
/// 1 - I_{1/4}(1/2, (d+1)/2): the literal 1-minus form cancels to zero
/// once w_d drops below an ulp of 1 (d around 120), while the reflected
/// form stays a positive product and keeps w_d strictly decreasing in
/// double precision far beyond any searchable dimension.
inline double wd(int d) {
    if (d < 1) throw std::invalid_argument("wd: dimension must be at least 1");
    const double half_dp1 = 0.5 * (d + 1);
    return 1.5 * reg_inc_beta(half_dp1, 0.5, 0.75);
}

/// Algebraically equal form of wd built from two incomplete-beta terms,
/// kept as an independent cross-check of the primary implementation. The
/// second term uses the same reflection as wd() for the same reason.
inline double wd_sum_form(int d) {
    if (d < 1) throw std::invalid_argument("wd_sum_form: dimension must be at least 1");
    const double half_dp1 = 0.5 * (d + 1);
    return reg_inc_beta(half_dp1, half_dp1, 0.25) + reg_inc_beta(half_dp1, 0.5, 0.75);
}

/// Result of inverting a ball-overlap statistic to a dimension.
struct DimensionEstimate {
    int delta = 1;           ///< estimated dimension
    double statistic = 0.0;  ///< input statistic clamped to [0, 1]
    int evaluations = 0;     ///< distinct wd() evaluations performed
    bool clamped = false;    ///< statistic fell at or outside [w_cap, w_1]
};

/// Nearest-w_d inversion: delta = argmin over 1 <= d <= cap of |W - w_d|,
/// ties resolved toward the smaller dimension.
///
/// Exponential doubling brackets the crossing and binary search refines it,
/// so at most 4*ceil(log2(delta)) + 8 distinct w_d evaluations are needed;
/// repeated dimensions hit a per-call memo and are not recounted.
inline DimensionEstimate dim_from_stat(double w_stat, int cap = kDefaultDimensionCap) {
    if (!std::isfinite(w_stat)) throw std::invalid_argument("dim_from_stat: statistic must be finite");
    if (cap < 1) throw std::invalid_argument("dim_from_stat: cap must be at least 1");

    DimensionEstimate out;
    out.statistic = std::clamp(w_stat, 0.0, 1.0);
    const double w = out.statistic;

    std::vector<std::pair<int, double>> memo;
    auto eval = [&](int d) {
        for (const auto& [dim, val] : memo) {
            if (dim == d) return val;
        }
        const double val = wd(d);
        memo.emplace_back(d, val);
        ++out.evaluations;
        return val;
    };

    if (w >= eval(1)) {
        out.delta = 1;
        out.clamped = true;
        return out;
    }

    // Invariant: w < wd(lo). Double hi until wd(hi) <= w or hi hits the cap.
    int lo = 1;
    int hi = 1;
    while (eval(hi) > w) {
        if (hi == cap) {
            // Never crossed: w below the whole table, clamp to the cap.
            out.delta = cap;
            out.clamped = true;
            return out;
        }
        lo = hi;
        hi = std::min(2 * hi, cap);
    }

    // Smallest dimension with wd(dim) <= w lies in (lo, hi].
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (eval(mid) <= w) {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // wd(lo) > w >= wd(hi); pick the closer, preferring lo on a tie.
    out.delta = (eval(lo) - w <= w - eval(hi)) ? lo : hi;
    out.clamped = (out.delta == cap && w <= eval(cap));
    return out;
}

} // namespace geodim
