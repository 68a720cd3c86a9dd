#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geodim/errors.hpp"
#include "geodim/pointcloud.hpp"
#include "geodim/rng.hpp"

namespace geodim {

/// C(k, 2) without overflow surprises for k = 0 or 1.
inline constexpr std::uint64_t choose2(std::uint64_t k) noexcept {
    return k < 2 ? 0 : k * (k - 1) / 2;
}

/// Immutable undirected simple graph in CSR form. Neighbor lists are
/// sorted ascending, which the counting kernels below rely on.
class Graph {
public:
    Graph() = default;

    /// Build from unique undirected edges: no self-loops, each unordered
    /// pair present exactly once (either orientation).
    static Graph from_edges(std::uint32_t n,
                            const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
        Graph g;
        g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (const auto& [u, v] : edges) {
            ++g.offsets_[static_cast<std::size_t>(u) + 1];
            ++g.offsets_[static_cast<std::size_t>(v) + 1];
        }
        for (std::size_t i = 1; i <= n; ++i) g.offsets_[i] += g.offsets_[i - 1];
        g.adj_.resize(g.offsets_[n]);
        std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& [u, v] : edges) {
            g.adj_[cursor[u]++] = v;
            g.adj_[cursor[v]++] = u;
        }
        g.sort_rows();
        g.edge_count_ = edges.size();
        return g;
    }

    std::uint32_t vertex_count() const noexcept {
        return offsets_.empty() ? 0 : static_cast<std::uint32_t>(offsets_.size() - 1);
    }
    std::uint64_t edge_count() const noexcept { return edge_count_; }

    std::uint32_t degree(std::uint32_t v) const noexcept {
        const auto i = static_cast<std::size_t>(v);
        return static_cast<std::uint32_t>(offsets_[i + 1] - offsets_[i]);
    }
    std::span<const std::uint32_t> neighbors(std::uint32_t v) const noexcept {
        const auto i = static_cast<std::size_t>(v);
        return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
    }

    /// Copy with vertex v renamed to new_label[v]; new_label must be a
    /// permutation of 0..n-1.
    Graph relabeled(std::span<const std::uint32_t> new_label) const {
        const std::uint32_t n = vertex_count();
        if (new_label.size() != n)
            throw std::invalid_argument("relabeled: permutation size mismatch");
        Graph out;
        out.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (std::uint32_t v = 0; v < n; ++v)
            out.offsets_[static_cast<std::size_t>(new_label[v]) + 1] = degree(v);
        for (std::size_t i = 1; i <= n; ++i) out.offsets_[i] += out.offsets_[i - 1];
        out.adj_.resize(adj_.size());
        for (std::uint32_t v = 0; v < n; ++v) {
            std::uint64_t dst = out.offsets_[new_label[v]];
            for (const auto u : neighbors(v)) out.adj_[dst++] = new_label[u];
        }
        out.sort_rows();
        out.edge_count_ = edge_count_;
        return out;
    }

    bool operator==(const Graph& other) const noexcept {
        return offsets_ == other.offsets_ && adj_ == other.adj_;
    }

private:
    void sort_rows() {
        const std::uint32_t n = vertex_count();
        for (std::uint32_t v = 0; v < n; ++v) {
            std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                      adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
        }
    }

    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> adj_;
    std::uint64_t edge_count_ = 0;
};

namespace detail {

/// Integer cell coordinates used as exact hash keys. Exactness matters:
/// distinct cells must never merge, or a pair could be scanned twice and
/// produce a duplicate edge. Dimensions above 32 take the brute-force path.
struct CellKey {
    std::array<std::int64_t, 32> c;
};

struct CellKeyHash {
    int d;
    std::size_t operator()(const CellKey& key) const noexcept {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL;
        for (int j = 0; j < d; ++j) h = mix64(h ^ static_cast<std::uint64_t>(key.c[j]));
        return static_cast<std::size_t>(h);
    }
};

struct CellKeyEq {
    int d;
    bool operator()(const CellKey& x, const CellKey& y) const noexcept {
        return std::equal(x.c.begin(), x.c.begin() + d, y.c.begin());
    }
};

inline bool within_torus(const double* x, const double* y, int d, double r2) {
    double sum = 0.0;
    for (int j = 0; j < d; ++j) {
        double delta = std::fabs(x[j] - y[j]);
        delta = std::min(delta, 1.0 - delta);
        sum += delta * delta;
        if (sum > r2) return false;
    }
    return true;
}

inline bool within_euclidean(const double* x, const double* y, int d, double r2) {
    double sum = 0.0;
    for (int j = 0; j < d; ++j) {
        const double delta = x[j] - y[j];
        sum += delta * delta;
        if (sum > r2) return false;
    }
    return true;
}

} // namespace detail

/// Random geometric graph: vertices are the points, an edge joins each
/// pair at metric distance <= r.
///
/// A fixed-radius cell list keeps construction near-linear: points are
/// binned into boxes of side >= r, so every qualifying pair sits in the
/// same or an adjacent box. On the torus the grid has floor(1/r) cells
/// per axis (side 1/floor(1/r) >= r) so adjacency wraps cleanly; in
/// Euclidean space the side is exactly r on an unbounded grid. Candidate
/// pairs are confirmed by an exact distance check, making the result
/// identical to the all-pairs scan. Dimensions where the 3^d adjacent-box
/// sweep would dominate (d > 8 with 3^d > n, or d > 32) fall back to
/// brute force.
inline Graph build_rgg(const PointCloud& cloud, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("build_rgg: radius must be positive");
    const bool torus = cloud.metric == Metric::torus;
    if (torus && r > 0.5)
        throw std::invalid_argument("build_rgg: torus radius must be at most 1/2");
    const std::size_t n = cloud.size();
    if (n > 0xFFFFFFFFull) throw std::invalid_argument("build_rgg: too many points");
    const int d = cloud.d;
    const double r2 = r * r;
    const double* pts = cloud.coords.data();

    auto within = [&](std::size_t i, std::size_t j) {
        const double* x = pts + i * static_cast<std::size_t>(d);
        const double* y = pts + j * static_cast<std::size_t>(d);
        return torus ? detail::within_torus(x, y, d, r2) : detail::within_euclidean(x, y, d, r2);
    };

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    if (n < 2) return Graph::from_edges(static_cast<std::uint32_t>(n), edges);

    bool use_cells = d <= 8;
    if (!use_cells && d <= 32) use_cells = std::pow(3.0, d) <= static_cast<double>(n);

    if (!use_cells) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (within(i, j)) {
                    edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
                }
            }
        }
        return Graph::from_edges(static_cast<std::uint32_t>(n), edges);
    }

    // Integer cell coordinates per point.
    const std::int64_t wrap = torus ? static_cast<std::int64_t>(std::floor(1.0 / r)) : 0;
    std::vector<std::int64_t> cell(n * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            const double x = pts[i * static_cast<std::size_t>(d) + j];
            std::int64_t c;
            if (torus) {
                if (!(x >= 0.0 && x < 1.0))
                    throw std::invalid_argument("build_rgg: torus coordinates must lie in [0,1)");
                c = std::min<std::int64_t>(wrap - 1, static_cast<std::int64_t>(x * static_cast<double>(wrap)));
            } else {
                const double q = std::floor(x / r);
                if (!(std::fabs(q) < 4.6e18))
                    throw std::invalid_argument("build_rgg: radius too small for coordinate range");
                c = static_cast<std::int64_t>(q);
            }
            cell[i * static_cast<std::size_t>(d) + j] = c;
        }
    }

    using CellMap = std::unordered_map<detail::CellKey, std::vector<std::uint32_t>,
                                       detail::CellKeyHash, detail::CellKeyEq>;
    CellMap cells(64, detail::CellKeyHash{d}, detail::CellKeyEq{d});
    detail::CellKey key{};
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(cell.data() + i * static_cast<std::size_t>(d), d, key.c.begin());
        cells[key].push_back(static_cast<std::uint32_t>(i));
    }

    // Sweep each point's adjacent boxes; per-axis candidate offsets are
    // deduplicated so a 2-cell torus axis is not visited twice.
    std::array<std::array<std::int64_t, 3>, 32> cand{};
    std::array<int, 32> cand_n{};
    std::array<int, 32> odo{};
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t* ci = cell.data() + i * static_cast<std::size_t>(d);
        for (int j = 0; j < d; ++j) {
            int m = 0;
            for (int shift = -1; shift <= 1; ++shift) {
                std::int64_t c = ci[j] + shift;
                if (torus) c = (c % wrap + wrap) % wrap;
                bool seen = false;
                for (int k = 0; k < m; ++k) seen = seen || cand[j][k] == c;
                if (!seen) cand[j][m++] = c;
            }
            cand_n[j] = m;
        }
        odo.fill(0);
        for (;;) {
            for (int j = 0; j < d; ++j) key.c[j] = cand[j][odo[j]];
            if (const auto it = cells.find(key); it != cells.end()) {
                for (const auto other : it->second) {
                    if (other > i && within(i, other)) {
                        edges.emplace_back(static_cast<std::uint32_t>(i), other);
                    }
                }
            }
            int j = 0;
            while (j < d && ++odo[j] == cand_n[j]) odo[j++] = 0;
            if (j == d) break;
        }
    }
    return Graph::from_edges(static_cast<std::uint32_t>(n), edges);
}

/// Number of common entries of two ascending lists.
inline std::uint64_t sorted_common_count(std::span<const std::uint32_t> a,
                                         std::span<const std::uint32_t> b) {
    std::uint64_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

/// Edges of the graph joining two neighbors of v.
inline std::uint64_t local_edge_count(const Graph& g, std::uint32_t v) {
    const auto nv = g.neighbors(v);
    std::uint64_t twice = 0;
    for (const auto u : nv) twice += sorted_common_count(nv, g.neighbors(u));
    return twice / 2;
}

struct VertexStats {
    std::uint32_t degree = 0;
    std::uint64_t local_edges = 0;
};

inline std::vector<VertexStats> vertex_stats(const Graph& g) {
    const std::uint32_t n = g.vertex_count();
    std::vector<VertexStats> stats(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        stats[v].degree = g.degree(v);
        stats[v].local_edges = local_edge_count(g, v);
    }
    return stats;
}

inline std::uint32_t max_degree(const Graph& g) {
    std::uint32_t best = 0;
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) best = std::max(best, g.degree(v));
    return best;
}

/// Triangle count by forward counting: each edge (u, v) with u < v
/// contributes the common neighbors above v in label order, so every
/// triangle is counted exactly once at its smallest vertex.
inline std::uint64_t count_triangles(const Graph& g) {
    std::uint64_t total = 0;
    const std::uint32_t n = g.vertex_count();
    for (std::uint32_t u = 0; u < n; ++u) {
        const auto nu = g.neighbors(u);
        const auto su = nu.subspan(static_cast<std::size_t>(
            std::upper_bound(nu.begin(), nu.end(), u) - nu.begin()));
        for (const auto v : su) {
            const auto nv = g.neighbors(v);
            const auto sv = nv.subspan(static_cast<std::size_t>(
                std::upper_bound(nv.begin(), nv.end(), v) - nv.begin()));
            total += sorted_common_count(su, sv);
        }
    }
    return total;
}

/// Sum over vertices k of C(m_k, 2), where m_k counts the neighbors of k
/// with a smaller label: the two-paths whose middle vertex carries the
/// largest label. Label-dependent by design.
inline std::uint64_t count_max_labeled_cherries(const Graph& g) {
    std::uint64_t total = 0;
    const std::uint32_t n = g.vertex_count();
    for (std::uint32_t k = 0; k < n; ++k) {
        const auto nk = g.neighbors(k);
        const auto m = static_cast<std::uint64_t>(
            std::lower_bound(nk.begin(), nk.end(), k) - nk.begin());
        total += choose2(m);
    }
    return total;
}

/// All two-paths: sum over vertices of C(degree, 2).
inline std::uint64_t count_cherries(const Graph& g) {
    std::uint64_t total = 0;
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) total += choose2(g.degree(v));
    return total;
}

namespace detail {

/// Uniform permutation of 0..n-1 by seeded Fisher-Yates; entry v is the
/// shuffled label of vertex v.
inline std::vector<std::uint32_t> shuffle_permutation(std::uint32_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> label(n);
    std::iota(label.begin(), label.end(), 0u);
    Rng rng(seed);
    for (std::uint32_t i = n; i > 1; --i) {
        const auto j = static_cast<std::uint32_t>(rng.uniform_below(i));
        std::swap(label[i - 1], label[j]);
    }
    return label;
}

} // namespace detail

/// Uniformly relabel the vertices. Deterministic in the seed; the
/// structure (degree multiset, triangle count, ...) is untouched.
inline Graph shuffle_labels(const Graph& g, std::uint64_t seed) {
    return g.relabeled(detail::shuffle_permutation(g.vertex_count(), seed));
}

namespace detail {

inline bool parse_u64_field(const char*& cursor, const char* end, std::uint64_t& out) {
    while (cursor < end && (*cursor == ' ' || *cursor == '\t')) ++cursor;
    if (cursor == end) return false;
    const auto res = std::from_chars(cursor, end, out);
    if (res.ec != std::errc{} || res.ptr == cursor) return false;
    cursor = res.ptr;
    return true;
}

inline bool only_blanks(const char* cursor, const char* end) {
    while (cursor < end && (*cursor == ' ' || *cursor == '\t')) ++cursor;
    return cursor == end;
}

} // namespace detail

/// Edge-list format: '#' lines are comments, the first significant line
/// must be "n <count>", every further line one edge "u v" with 0-based
/// labels. Repeated and reversed mentions collapse to one edge.
inline Graph read_edge_list(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    bool have_n = false;
    std::uint64_t n = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const char* cursor = line.data();
        const char* end = cursor + line.size();
        while (cursor < end && (*cursor == ' ' || *cursor == '\t')) ++cursor;
        if (cursor == end || *cursor == '#') continue;

        if (!have_n) {
            if (*cursor != 'n')
                throw ParseError("edge list: line " + std::to_string(line_no) +
                                 ": expected header 'n <count>'");
            ++cursor;
            if (!detail::parse_u64_field(cursor, end, n) || !detail::only_blanks(cursor, end))
                throw ParseError("edge list: line " + std::to_string(line_no) +
                                 ": expected header 'n <count>'");
            if (n > 0xFFFFFFFFull)
                throw ParseError("edge list: line " + std::to_string(line_no) +
                                 ": vertex count too large");
            have_n = true;
            continue;
        }

        std::uint64_t u = 0;
        std::uint64_t v = 0;
        if (!detail::parse_u64_field(cursor, end, u) || !detail::parse_u64_field(cursor, end, v) ||
            !detail::only_blanks(cursor, end))
            throw ParseError("edge list: line " + std::to_string(line_no) + ": expected edge 'u v'");
        if (u >= n || v >= n)
            throw ParseError("edge list: line " + std::to_string(line_no) +
                             ": vertex label out of range");
        if (u == v)
            throw ParseError("edge list: line " + std::to_string(line_no) + ": self-loop");
        edges.emplace_back(static_cast<std::uint32_t>(std::min(u, v)),
                           static_cast<std::uint32_t>(std::max(u, v)));
    }
    if (!have_n) throw ParseError("edge list: missing 'n <count>' header");
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Graph::from_edges(static_cast<std::uint32_t>(n), edges);
}

/// Inverse of read_edge_list, in canonical form: header, then each edge
/// once as "u v" with u < v, ascending lexicographically.
inline void write_edge_list(const Graph& g, std::ostream& os) {
    const std::uint32_t n = g.vertex_count();
    os << "n " << n << '\n';
    for (std::uint32_t u = 0; u < n; ++u) {
        for (const auto v : g.neighbors(u)) {
            if (v > u) os << u << ' ' << v << '\n';
        }
    }
}

} // namespace geodim
