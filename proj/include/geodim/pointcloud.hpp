#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geodim/errors.hpp"
#include "geodim/format.hpp"
#include "geodim/rng.hpp"
#include "geodim/specfun.hpp"

namespace geodim {

/// Metric the graph builder applies to a point cloud. Torus coordinates
/// live in [0,1)^d with per-coordinate wraparound distance.
enum class Metric { torus, euclidean };

enum class DensityKind { uniform_torus, uniform_cube, gaussian_isotropic, product_beta };

/// Sampling density for point clouds. Factories validate parameters; the
/// struct itself stays an aggregate so configs can build it directly and
/// call validate().
struct DensitySpec {
    DensityKind kind = DensityKind::uniform_torus;
    int d = 1;
    double sigma = 1.0; ///< gaussian_isotropic only
    double a = 1.0;     ///< product_beta only
    double b = 1.0;     ///< product_beta only

    static DensitySpec torus(int d) {
        DensitySpec spec{DensityKind::uniform_torus, d};
        spec.validate();
        return spec;
    }
    static DensitySpec cube(int d) {
        DensitySpec spec{DensityKind::uniform_cube, d};
        spec.validate();
        return spec;
    }
    static DensitySpec gaussian(int d, double sigma) {
        DensitySpec spec{DensityKind::gaussian_isotropic, d};
        spec.sigma = sigma;
        spec.validate();
        return spec;
    }
    static DensitySpec beta_product(int d, double a, double b) {
        DensitySpec spec{DensityKind::product_beta, d};
        spec.a = a;
        spec.b = b;
        spec.validate();
        return spec;
    }

    Metric metric() const noexcept {
        return kind == DensityKind::uniform_torus ? Metric::torus : Metric::euclidean;
    }

    void validate() const {
        if (d < 1) throw std::invalid_argument("density: dimension must be at least 1");
        if (kind == DensityKind::gaussian_isotropic && !(sigma > 0.0))
            throw std::invalid_argument("density: gaussian sigma must be positive");
        if (kind == DensityKind::product_beta && (!(a > 0.0) || !(b > 0.0)))
            throw std::invalid_argument("density: beta shapes must be positive");
    }
};

/// Immutable flat point set, row-major n x d.
struct PointCloud {
    int d = 1;
    Metric metric = Metric::euclidean;
    std::vector<double> coords;

    std::size_t size() const noexcept {
        return d > 0 ? coords.size() / static_cast<std::size_t>(d) : 0;
    }
    std::span<const double> point(std::size_t i) const noexcept {
        return {coords.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
};

/// Distance under the given metric. Torus coordinates must lie in [0,1)
/// (guaranteed for clouds sampled here); each coordinate contributes
/// min(|dx|, 1-|dx|).
inline double distance(Metric metric, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("distance: dimension mismatch");
    double sum = 0.0;
    if (metric == Metric::torus) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            double delta = std::fabs(x[j] - y[j]);
            delta = std::min(delta, 1.0 - delta);
            sum += delta * delta;
        }
    } else {
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double delta = x[j] - y[j];
            sum += delta * delta;
        }
    }
    return std::sqrt(sum);
}

/// Draw n points from the density. Deterministic in (spec, n, seed):
/// coordinates are generated point-major from a single stream.
inline PointCloud sample_points(const DensitySpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    PointCloud cloud;
    cloud.d = spec.d;
    cloud.metric = spec.metric();
    cloud.coords.resize(n * static_cast<std::size_t>(spec.d));
    Rng rng(seed);
    switch (spec.kind) {
        case DensityKind::uniform_torus:
        case DensityKind::uniform_cube:
            for (auto& c : cloud.coords) c = rng.uniform01();
            break;
        case DensityKind::gaussian_isotropic:
            for (auto& c : cloud.coords) c = spec.sigma * rng.normal();
            break;
        case DensityKind::product_beta:
            for (auto& c : cloud.coords) c = rng.beta_variate(spec.a, spec.b);
            break;
    }
    return cloud;
}

/// Uniform points in the d-dimensional unit ball: an isotropic Gaussian
/// direction scaled to radius U^(1/d), which is the radial law that makes
/// the volume measure uniform.
inline PointCloud sample_unit_ball(int d, std::size_t n, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("sample_unit_ball: dimension must be at least 1");
    PointCloud cloud;
    cloud.d = d;
    cloud.metric = Metric::euclidean;
    cloud.coords.resize(n * static_cast<std::size_t>(d));
    Rng rng(seed);
    std::vector<double> dir(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& g : dir) {
                g = rng.normal();
                norm2 += g * g;
            }
        } while (norm2 == 0.0);
        const double radius = std::pow(rng.uniform01(), 1.0 / d);
        const double scale = radius / std::sqrt(norm2);
        double* out = cloud.coords.data() + i * static_cast<std::size_t>(d);
        for (int j = 0; j < d; ++j) out[j] = scale * dir[static_cast<std::size_t>(j)];
    }
    return cloud;
}

/// Probability mass of the metric ball B(center, r) under the density.
struct BallMassEstimate {
    double value = 0.0;
    double std_error = 0.0; ///< zero when the value is exact
};

/// On the torus (which requires r <= 1/2) the ball never self-overlaps
/// and the density is flat, so the mass is exactly V_d r^d. Every other
/// density is estimated by Monte Carlo with a binomial standard error.
inline BallMassEstimate ball_mass(const DensitySpec& spec, std::span<const double> center,
                                  double r, std::size_t mc_samples, std::uint64_t seed) {
    spec.validate();
    if (center.size() != static_cast<std::size_t>(spec.d))
        throw std::invalid_argument("ball_mass: center has wrong dimension");
    if (!(r > 0.0)) throw std::invalid_argument("ball_mass: radius must be positive");

    if (spec.kind == DensityKind::uniform_torus) {
        if (r > 0.5) throw std::invalid_argument("ball_mass: torus radius must be at most 1/2");
        return {unit_ball_volume(spec.d) * std::pow(r, spec.d), 0.0};
    }
    if (mc_samples == 0) throw std::invalid_argument("ball_mass: mc_samples must be positive");
    const PointCloud sample = sample_points(spec, mc_samples, seed);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (distance(sample.metric, sample.point(i), center) <= r) ++inside;
    }
    const double m = static_cast<double>(mc_samples);
    const double p = static_cast<double>(inside) / m;
    return {p, std::sqrt(p * (1.0 - p) / m)};
}

/// Density grammar used by the CLI and JSON configs:
///   torus | cube | gauss:sigma=<v> | beta:a=<v>,b=<v>
inline DensitySpec parse_density(std::string_view text, int d) {
    auto parse_value = [&](std::string_view token, std::string_view key) {
        if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key ||
            token[key.size()] != '=') {
            throw ConfigError("density: expected " + std::string(key) + "=<value> in '" +
                              std::string(text) + "'");
        }
        const std::string_view digits = token.substr(key.size() + 1);
        double value = 0.0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
            throw ConfigError("density: bad numeric value in '" + std::string(text) + "'");
        }
        return value;
    };

    if (d < 1) throw ConfigError("density: dimension must be at least 1");
    if (text == "torus") return DensitySpec::torus(d);
    if (text == "cube") return DensitySpec::cube(d);
    if (text.substr(0, 6) == "gauss:") {
        const double sigma = parse_value(text.substr(6), "sigma");
        if (!(sigma > 0.0)) throw ConfigError("density: gaussian sigma must be positive");
        return DensitySpec::gaussian(d, sigma);
    }
    if (text.substr(0, 5) == "beta:") {
        const std::string_view params = text.substr(5);
        const std::size_t comma = params.find(',');
        if (comma == std::string_view::npos)
            throw ConfigError("density: expected beta:a=<v>,b=<v> in '" + std::string(text) + "'");
        const double a = parse_value(params.substr(0, comma), "a");
        const double b = parse_value(params.substr(comma + 1), "b");
        if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("density: beta shapes must be positive");
        return DensitySpec::beta_product(d, a, b);
    }
    throw ConfigError("density: unknown kind in '" + std::string(text) + "'");
}

/// Canonical text for a density, matching the parse_density grammar.
inline std::string density_to_string(const DensitySpec& spec) {
    switch (spec.kind) {
        case DensityKind::uniform_torus: return "torus";
        case DensityKind::uniform_cube: return "cube";
        case DensityKind::gaussian_isotropic: return "gauss:sigma=" + format_double(spec.sigma);
        case DensityKind::product_beta:
            return "beta:a=" + format_double(spec.a) + ",b=" + format_double(spec.b);
    }
    return {};
}

inline const char* metric_name(Metric metric) {
    return metric == Metric::torus ? "torus" : "euclidean";
}

/// CSV layout: header line "# d=<d> metric=<torus|euclidean>", then one
/// point per line with comma-separated coordinates in shortest
/// round-trip decimal form.
inline void write_points_csv(const PointCloud& cloud, std::ostream& os) {
    os << "# d=" << cloud.d << " metric=" << metric_name(cloud.metric) << '\n';
    const std::size_t n = cloud.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = cloud.point(i);
        for (int j = 0; j < cloud.d; ++j) {
            if (j > 0) os << ',';
            os << format_double(p[static_cast<std::size_t>(j)]);
        }
        os << '\n';
    }
}

inline PointCloud read_points_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() {
        while (std::getline(is, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError("points csv: empty input");
    int d = 0;
    char metric_buf[16] = {};
    if (std::sscanf(line.c_str(), "# d=%d metric=%15s", &d, metric_buf) != 2 || d < 1)
        throw ParseError("points csv: line 1: expected header '# d=<d> metric=<torus|euclidean>'");
    const std::string_view metric_text(metric_buf);
    PointCloud cloud;
    cloud.d = d;
    if (metric_text == "torus") {
        cloud.metric = Metric::torus;
    } else if (metric_text == "euclidean") {
        cloud.metric = Metric::euclidean;
    } else {
        throw ParseError("points csv: line 1: unknown metric '" + std::string(metric_text) + "'");
    }

    std::vector<double> row(static_cast<std::size_t>(d));
    while (next_line()) {
        const char* cursor = line.c_str();
        const char* end = cursor + line.size();
        for (int j = 0; j < d; ++j) {
            if (j > 0) {
                if (cursor >= end || *cursor != ',')
                    throw ParseError("points csv: line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(d) + " coordinates");
                ++cursor;
            }
            const auto res = std::from_chars(cursor, end, row[static_cast<std::size_t>(j)]);
            if (res.ec != std::errc{})
                throw ParseError("points csv: line " + std::to_string(line_no) + ": bad coordinate");
            cursor = res.ptr;
        }
        if (cursor != end)
            throw ParseError("points csv: line " + std::to_string(line_no) + ": trailing characters");
        cloud.coords.insert(cloud.coords.end(), row.begin(), row.end());
    }
    return cloud;
}

} // namespace geodim
