#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "geodim/estimators.hpp"
#include "geodim/graph.hpp"
#include "geodim/pointcloud.hpp"
#include "geodim/rng.hpp"
#include "geodim/wd.hpp"

using geodim::build_rgg;
using geodim::DensitySpec;
using geodim::estimate_dimension;
using geodim::EstimatorFailure;
using geodim::EstimatorMethod;
using geodim::EstimatorOutcome;
using geodim::Graph;
using geodim::PointCloud;
using geodim::sample_points;

namespace {

constexpr EstimatorMethod kAllMethods[] = {
    EstimatorMethod::w1, EstimatorMethod::w2, EstimatorMethod::w2_symmetric,
    EstimatorMethod::w3, EstimatorMethod::w4,
};

Graph path3() { return Graph::from_edges(3, {{0, 1}, {1, 2}}); }
Graph triangle() { return Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }
Graph star5() { return Graph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}); }

Graph complete(std::uint32_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return Graph::from_edges(n, edges);
}

Graph bipartite_k23() {
    return Graph::from_edges(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}});
}

/// Two vertices tie at the maximum degree; the smaller label (1) has one
/// edge inside its neighborhood, the larger (2) has none.
Graph degree_tie() {
    return Graph::from_edges(6, {{1, 0}, {1, 2}, {1, 3}, {2, 4}, {2, 5}, {0, 3}});
}

} // namespace

TEST_CASE("every method reads the complete graph as dimension 1", "[estimators]") {
    for (const Graph& g : {triangle(), complete(6)}) {
        for (const auto method : kAllMethods) {
            const EstimatorOutcome out = estimate_dimension(g, method, 7);
            REQUIRE(out.ok());
            CHECK(*out.statistic == 1.0);
            CHECK(*out.delta == 1);
            CHECK(out.clamped); // 1.0 sits above w_1
        }
    }
}

TEST_CASE("every method reads a triangle-free graph as statistic zero", "[estimators]") {
    const Graph g = bipartite_k23();
    for (const EstimatorOutcome& out :
         {geodim::w1(g), geodim::w2(g), geodim::w2_symmetric(g), geodim::w3(g), geodim::w4(g)}) {
        REQUIRE(out.ok());
        CHECK(*out.statistic == 0.0);
        CHECK(out.clamped); // zero falls below the whole table
        CHECK(*out.delta == geodim::kDefaultDimensionCap);
    }
}

TEST_CASE("w1 examines the busiest vertex, smallest label on ties", "[estimators]") {
    {
        const EstimatorOutcome out = geodim::w1(degree_tie());
        REQUIRE(out.ok());
        CHECK(*out.statistic == 1.0 / 3.0);
        CHECK(out.diagnostics.degree == 3);
        CHECK(out.diagnostics.local_edges == 1);
    }
    {
        // Hub with independent leaves: statistic 0, clamped at a small cap.
        const EstimatorOutcome out = geodim::w1(star5(), 64);
        REQUIRE(out.ok());
        CHECK(*out.statistic == 0.0);
        CHECK(*out.delta == 64);
        CHECK(out.clamped);
        CHECK(out.diagnostics.degree == 4);
        CHECK(out.diagnostics.local_edges == 0);
    }
}

TEST_CASE("w1 fails on graphs without a usable vertex", "[estimators]") {
    {
        const EstimatorOutcome out = geodim::w1(Graph::from_edges(0, {}));
        REQUIRE_FALSE(out.ok());
        CHECK(out.failure == EstimatorFailure::degenerate_degree);
        CHECK_FALSE(out.delta.has_value());
    }
    {
        const EstimatorOutcome out = geodim::w1(Graph::from_edges(2, {{0, 1}}));
        REQUIRE_FALSE(out.ok());
        CHECK(out.failure == EstimatorFailure::degenerate_degree);
        CHECK(out.diagnostics.degree == 1);
    }
}

TEST_CASE("w2 divides triangles by max-labeled two-paths", "[estimators]") {
    {
        const EstimatorOutcome out = geodim::w2(triangle());
        REQUIRE(out.ok());
        CHECK(*out.statistic == 1.0);
        CHECK(out.diagnostics.triangles == 1);
        CHECK(out.diagnostics.denominator == 1);
    }
    {
        const EstimatorOutcome out = geodim::w2(Graph::from_edges(3, {{2, 0}, {2, 1}}));
        REQUIRE(out.ok());
        CHECK(*out.statistic == 0.0);
        CHECK(out.diagnostics.denominator == 1);
    }
    {
        // The path's only two-path has its middle at label 1, not the max.
        const EstimatorOutcome out = geodim::w2(path3());
        REQUIRE_FALSE(out.ok());
        CHECK(out.failure == EstimatorFailure::empty_denominator);
        CHECK(out.diagnostics.triangles == 0);
        CHECK(out.diagnostics.denominator == 0);
    }
}

TEST_CASE("w2_symmetric divides three times the triangles by all two-paths", "[estimators]") {
    {
        const EstimatorOutcome out = geodim::w2_symmetric(triangle());
        REQUIRE(out.ok());
        CHECK(*out.statistic == 1.0);
        CHECK(out.diagnostics.denominator == 3);
    }
    {
        const EstimatorOutcome out = geodim::w2_symmetric(path3());
        REQUIRE(out.ok());
        CHECK(*out.statistic == 0.0);
    }
    {
        const EstimatorOutcome out =
            geodim::w2_symmetric(Graph::from_edges(4, {{0, 1}, {2, 3}}));
        REQUIRE_FALSE(out.ok());
        CHECK(out.failure == EstimatorFailure::empty_denominator);
    }
}

TEST_CASE("w3 averages over vertices of degree at least 2", "[estimators]") {
    {
        const EstimatorOutcome out = geodim::w3(triangle());
        REQUIRE(out.ok());
        CHECK(*out.statistic == 1.0);
        CHECK(out.diagnostics.qualifying == 3);
    }
    {
        const EstimatorOutcome out = geodim::w3(path3());
        REQUIRE(out.ok());
        CHECK(*out.statistic == 0.0);
        CHECK(out.diagnostics.qualifying == 1);
    }
    {
        const EstimatorOutcome out = geodim::w3(Graph::from_edges(2, {{0, 1}}));
        REQUIRE_FALSE(out.ok());
        CHECK(out.failure == EstimatorFailure::empty_denominator);
        CHECK(out.diagnostics.qualifying == 0);
    }
}

TEST_CASE("w4 examines the designated vertex 0", "[estimators]") {
    {
        const Graph g = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}});
        const EstimatorOutcome out = geodim::w4(g);
        REQUIRE(out.ok());
        CHECK(*out.statistic == 1.0 / 3.0);
        CHECK(out.diagnostics.degree == 3);
        CHECK(out.diagnostics.local_edges == 1);
    }
    {
        const EstimatorOutcome out = geodim::w4(Graph::from_edges(3, {{1, 2}}));
        REQUIRE_FALSE(out.ok());
        CHECK(out.failure == EstimatorFailure::degenerate_degree);
        CHECK(out.diagnostics.degree == 0);
    }
    {
        const EstimatorOutcome out = geodim::w4(Graph::from_edges(0, {}));
        REQUIRE_FALSE(out.ok());
        CHECK(out.failure == EstimatorFailure::degenerate_degree);
    }
}

TEST_CASE("outcomes are a statistic or a failure, never both", "[estimators]") {
    std::mt19937_64 mix(5);
    for (int inst = 0; inst < 12; ++inst) {
        const PointCloud cloud =
            sample_points(DensitySpec::torus(2), 40 + 20 * inst, 600 + static_cast<std::uint64_t>(inst));
        const Graph g = build_rgg(cloud, 0.02 + 0.01 * inst);
        for (const auto method : kAllMethods) {
            const EstimatorOutcome out = estimate_dimension(g, method, mix());
            REQUIRE(out.ok() != out.failure.has_value());
            REQUIRE(out.delta.has_value() == out.statistic.has_value());
            if (out.ok()) {
                REQUIRE(*out.statistic >= 0.0);
                REQUIRE(*out.statistic <= 1.0);
                REQUIRE(*out.delta >= 1);
                REQUIRE(*out.delta <= geodim::kDefaultDimensionCap);
            }
        }
    }
}

TEST_CASE("w3 and w2_symmetric are exactly label-invariant", "[estimators]") {
    const PointCloud cloud = sample_points(DensitySpec::torus(2), 300, 99);
    const Graph g = build_rgg(cloud, 0.07);
    const EstimatorOutcome w3_base = geodim::w3(g);
    const EstimatorOutcome sym_base = geodim::w2_symmetric(g);
    REQUIRE(w3_base.ok());
    REQUIRE(sym_base.ok());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Graph s = geodim::shuffle_labels(g, seed);
        CHECK(*geodim::w3(s).statistic == *w3_base.statistic); // bitwise
        CHECK(*geodim::w2_symmetric(s).statistic == *sym_base.statistic);
    }
    // The front end must therefore ignore the seed for these methods.
    CHECK(*estimate_dimension(g, EstimatorMethod::w3, 1).statistic == *w3_base.statistic);
    CHECK(*estimate_dimension(g, EstimatorMethod::w3, 2).statistic == *w3_base.statistic);
}

TEST_CASE("label-dependent methods see the shuffle", "[estimators]") {
    {
        // Both tied vertices get examined across seeds, giving two values.
        std::set<double> seen;
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const EstimatorOutcome out = estimate_dimension(degree_tie(), EstimatorMethod::w1, seed);
            REQUIRE(out.ok());
            seen.insert(*out.statistic);
        }
        CHECK(seen == std::set<double>{0.0, 1.0 / 3.0});
    }
    {
        // On a star, W4's designated vertex is the hub 1 time in 5.
        bool hub = false;
        bool leaf = false;
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const EstimatorOutcome out = estimate_dimension(star5(), EstimatorMethod::w4, seed);
            if (out.ok()) {
                hub = true;
            } else {
                REQUIRE(out.failure == EstimatorFailure::degenerate_degree);
                leaf = true;
            }
        }
        CHECK(hub);
        CHECK(leaf);
    }
    // Same seed, same outcome.
    for (const auto method : kAllMethods) {
        const EstimatorOutcome a = estimate_dimension(star5(), method, 11);
        const EstimatorOutcome b = estimate_dimension(star5(), method, 11);
        REQUIRE(a.ok() == b.ok());
        if (a.ok()) {
            CHECK(*a.statistic == *b.statistic);
            CHECK(*a.delta == *b.delta);
        } else {
            CHECK(a.failure == b.failure);
        }
    }
}

TEST_CASE("the front end matches a literal shuffle for every method", "[estimators]") {
    // estimate_dimension applies the permutation without rebuilding the
    // graph; the contract is bitwise agreement with the rebuilt form.
    for (std::uint64_t inst = 0; inst < 6; ++inst) {
        const PointCloud cloud = sample_points(DensitySpec::torus(2), 80 + 40 * inst, 7000 + inst);
        const Graph g = build_rgg(cloud, 0.03 + 0.03 * static_cast<double>(inst));
        for (const auto method : kAllMethods) {
            for (std::uint64_t seed = 0; seed < 4; ++seed) {
                const EstimatorOutcome fast = estimate_dimension(g, method, seed);
                const Graph shuffled = geodim::shuffle_labels(g, seed);
                EstimatorOutcome ref;
                switch (method) {
                    case EstimatorMethod::w1: ref = geodim::w1(shuffled); break;
                    case EstimatorMethod::w2: ref = geodim::w2(shuffled); break;
                    case EstimatorMethod::w2_symmetric: ref = geodim::w2_symmetric(g); break;
                    case EstimatorMethod::w3: ref = geodim::w3(g); break;
                    case EstimatorMethod::w4: ref = geodim::w4(shuffled); break;
                }
                REQUIRE(fast.ok() == ref.ok());
                if (fast.ok()) {
                    REQUIRE(*fast.statistic == *ref.statistic); // bitwise
                    REQUIRE(*fast.delta == *ref.delta);
                    REQUIRE(fast.clamped == ref.clamped);
                } else {
                    REQUIRE(fast.failure == ref.failure);
                }
                REQUIRE(fast.diagnostics.degree == ref.diagnostics.degree);
                REQUIRE(fast.diagnostics.local_edges == ref.diagnostics.local_edges);
                REQUIRE(fast.diagnostics.triangles == ref.diagnostics.triangles);
                REQUIRE(fast.diagnostics.denominator == ref.diagnostics.denominator);
            }
        }
    }
}

TEST_CASE("empty graphs produce typed failures for every method", "[estimators]") {
    const Graph g = Graph::from_edges(0, {});
    for (const auto method : kAllMethods) {
        const EstimatorOutcome out = estimate_dimension(g, method, 3);
        REQUIRE_FALSE(out.ok());
        REQUIRE(out.failure.has_value());
    }
}

TEST_CASE("neighborhood statistic is conditionally unbiased for w_d", "[estimators][slow]") {
    // 20 uniform points in a radius-r ball around a torus point: each pair
    // is within r with probability exactly w_d, so the mean of
    // delta / C(20,2) over many draws must match wd(d).
    constexpr int reps = 20000;
    constexpr std::size_t pts = 20;
    constexpr double r = 0.1;
    for (int d = 1; d <= 3; ++d) {
        geodim::Rng center_rng(geodim::substream_seed(4100 + static_cast<std::uint64_t>(d), 0));
        std::vector<double> center(static_cast<std::size_t>(d));
        std::vector<double> pt(pts * static_cast<std::size_t>(d));
        double sum = 0.0;
        double sumsq = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            for (auto& c : center) c = center_rng.uniform01();
            const PointCloud ball = geodim::sample_unit_ball(
                d, pts, geodim::substream_seed(static_cast<std::uint64_t>(d) << 32,
                                               static_cast<std::uint64_t>(rep)));
            for (std::size_t i = 0; i < pts; ++i) {
                for (int j = 0; j < d; ++j) {
                    double x = center[static_cast<std::size_t>(j)] +
                               r * ball.point(i)[static_cast<std::size_t>(j)];
                    x -= std::floor(x);
                    pt[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = x;
                }
            }
            std::uint64_t close = 0;
            for (std::size_t i = 0; i < pts; ++i) {
                for (std::size_t k = i + 1; k < pts; ++k) {
                    std::span<const double> xi(pt.data() + i * static_cast<std::size_t>(d),
                                               static_cast<std::size_t>(d));
                    std::span<const double> xk(pt.data() + k * static_cast<std::size_t>(d),
                                               static_cast<std::size_t>(d));
                    if (geodim::distance(geodim::Metric::torus, xi, xk) <= r) ++close;
                }
            }
            const double w = static_cast<double>(close) / static_cast<double>(geodim::choose2(pts));
            sum += w;
            sumsq += w * w;
        }
        const double mean = sum / reps;
        const double var = (sumsq - reps * mean * mean) / (reps - 1);
        const double se = std::sqrt(var / reps);
        INFO("d=" << d << " mean=" << mean << " wd=" << geodim::wd(d) << " se=" << se);
        REQUIRE(std::fabs(mean - geodim::wd(d)) <= 4.0 * se);
    }
}

TEST_CASE("method names parse and print consistently", "[estimators]") {
    for (const auto method : kAllMethods) {
        CHECK(geodim::parse_method(geodim::method_name(method)) == method);
    }
    CHECK_THROWS_AS(geodim::parse_method("W5"), geodim::ConfigError);
    CHECK_THROWS_AS(geodim::parse_method("w1"), geodim::ConfigError);
    CHECK(std::string(geodim::failure_name(EstimatorFailure::degenerate_degree)) ==
          "degenerate-degree");
    CHECK(std::string(geodim::failure_name(EstimatorFailure::empty_denominator)) ==
          "empty-denominator");
}
