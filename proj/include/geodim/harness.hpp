#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "geodim/errors.hpp"
#include "geodim/estimators.hpp"
#include "geodim/format.hpp"
#include "geodim/graph.hpp"
#include "geodim/pointcloud.hpp"
#include "geodim/rng.hpp"
#include "geodim/wd.hpp"

namespace geodim {

/// How the connection radius scales with n:
///   explicit_radius : r = value
///   n_r_pow_d       : n r^d = value        (constant expected degree)
///   n32_r_pow_d     : n^(3/2) r^d = value  (sparser, triangle-statistic regime)
enum class RadiusRuleKind { explicit_radius, n_r_pow_d, n32_r_pow_d };

struct RadiusRule {
    RadiusRuleKind kind = RadiusRuleKind::explicit_radius;
    double value = 0.1;
};

inline const char* radius_rule_name(RadiusRuleKind kind) {
    switch (kind) {
        case RadiusRuleKind::explicit_radius: return "r";
        case RadiusRuleKind::n_r_pow_d: return "nrd";
        case RadiusRuleKind::n32_r_pow_d: return "n32rd";
    }
    return "?";
}

inline RadiusRuleKind parse_radius_rule(std::string_view text) {
    if (text == "r") return RadiusRuleKind::explicit_radius;
    if (text == "nrd") return RadiusRuleKind::n_r_pow_d;
    if (text == "n32rd") return RadiusRuleKind::n32_r_pow_d;
    throw ConfigError("radius: unknown rule '" + std::string(text) + "' (expected r, nrd or n32rd)");
}

/// Resolve a radius rule at a given n and dimension. On the torus the
/// resolved radius must land in (0, 1/2] or the configuration is invalid.
inline double resolve_radius(const RadiusRule& rule, std::uint64_t n, int d, Metric metric) {
    if (d < 1) throw ConfigError("radius: dimension must be at least 1");
    if (!(rule.value > 0.0)) throw ConfigError("radius: rule constant must be positive");
    double r = 0.0;
    switch (rule.kind) {
        case RadiusRuleKind::explicit_radius:
            r = rule.value;
            break;
        case RadiusRuleKind::n_r_pow_d:
            if (n == 0) throw ConfigError("radius: n must be positive under the nrd rule");
            r = std::pow(rule.value / static_cast<double>(n), 1.0 / d);
            break;
        case RadiusRuleKind::n32_r_pow_d:
            if (n == 0) throw ConfigError("radius: n must be positive under the n32rd rule");
            r = std::pow(rule.value / std::pow(static_cast<double>(n), 1.5), 1.0 / d);
            break;
    }
    if (!std::isfinite(r) || !(r > 0.0))
        throw ConfigError("radius: resolved radius is not a positive real");
    if (metric == Metric::torus && r > 0.5)
        throw ConfigError("radius: resolved radius " + format_double(r) +
                          " lies outside (0, 1/2] on the torus");
    return r;
}

/// Full description of one simulation experiment. The density carries the
/// true dimension; each (n, trial) pair is an independent graph on which
/// every listed method runs.
struct ExperimentConfig {
    DensitySpec density;
    std::vector<std::uint64_t> ns{1000};
    RadiusRule radius_rule;
    std::vector<EstimatorMethod> methods{EstimatorMethod::w3};
    int trials = 1;
    std::uint64_t seed = 0;
    int cap = kDefaultDimensionCap;
};

struct TrialRecord {
    int trial = 0;
    EstimatorMethod method = EstimatorMethod::w1;
    std::uint64_t n = 0;
    int d_true = 0;
    double r = 0.0;
    std::optional<double> statistic;
    std::optional<int> delta;
    bool clamped = false;
    std::optional<EstimatorFailure> failure;
    bool correct = false;
    std::uint64_t edges = 0;
    std::uint32_t max_degree = 0;
    double seconds = 0.0;
};

struct MethodSummary {
    EstimatorMethod method = EstimatorMethod::w1;
    std::uint64_t n = 0;
    int trials = 0;
    double fraction_correct = 0.0;
    double fraction_failed = 0.0;
    double fraction_incorrect = 0.0;
    /// Mean |W - w_{d_true}| over trials that produced a statistic;
    /// NaN when none did.
    double mean_abs_deviation = 0.0;
};

struct ExperimentResult {
    std::vector<TrialRecord> records;
    std::vector<MethodSummary> summaries;
};

inline void validate_experiment_config(const ExperimentConfig& config) {
    config.density.validate();
    if (config.ns.empty()) throw ConfigError("config: at least one n is required");
    for (const auto n : config.ns) {
        if (n == 0) throw ConfigError("config: n must be positive");
        if (n > 0xFFFFFFFFull) throw ConfigError("config: n exceeds the supported vertex count");
        resolve_radius(config.radius_rule, n, config.density.d, config.density.metric());
    }
    if (config.methods.empty()) throw ConfigError("config: at least one method is required");
    if (config.trials < 1) throw ConfigError("config: trials must be at least 1");
    if (config.cap < 1) throw ConfigError("config: cap must be at least 1");
}

/// Run every (n, trial, method) combination.
///
/// Determinism: each (n, trial) unit derives its own substreams from the
/// master seed by index, and records land in a preallocated slot, so the
/// output is a pure function of the config no matter how many worker
/// threads execute the units. Method substreams are keyed by the method
/// identity, not its position in the list, so reordering or subsetting
/// methods never changes another method's draws.
inline ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1) {
    validate_experiment_config(config);
    if (threads < 1) throw ConfigError("config: threads must be at least 1");

    const std::size_t trials = static_cast<std::size_t>(config.trials);
    const std::size_t method_count = config.methods.size();
    const std::size_t unit_count = config.ns.size() * trials;
    const int d_true = config.density.d;

    std::vector<double> radii(config.ns.size());
    for (std::size_t i = 0; i < config.ns.size(); ++i) {
        radii[i] = resolve_radius(config.radius_rule, config.ns[i], d_true,
                                  config.density.metric());
    }

    ExperimentResult result;
    result.records.resize(unit_count * method_count);

    auto run_unit = [&](std::size_t unit) {
        const std::size_t n_index = unit / trials;
        const int trial = static_cast<int>(unit % trials);
        const std::uint64_t n = config.ns[n_index];
        const double r = radii[n_index];
        const std::uint64_t unit_seed = substream_seed(config.seed, unit);

        const auto setup_start = std::chrono::steady_clock::now();
        const PointCloud cloud = sample_points(config.density, n, substream_seed(unit_seed, 0));
        const Graph g = build_rgg(cloud, r);
        const double setup_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - setup_start).count();

        const std::uint64_t edges = g.edge_count();
        const std::uint32_t maxdeg = max_degree(g);
        const double setup_share = setup_seconds / static_cast<double>(method_count);

        for (std::size_t mi = 0; mi < method_count; ++mi) {
            const EstimatorMethod method = config.methods[mi];
            const std::uint64_t method_seed =
                substream_seed(unit_seed, 1 + static_cast<std::uint64_t>(method));
            const auto eval_start = std::chrono::steady_clock::now();
            const EstimatorOutcome outcome = estimate_dimension(g, method, method_seed, config.cap);
            const double eval_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - eval_start)
                    .count();

            TrialRecord rec;
            rec.trial = trial;
            rec.method = method;
            rec.n = n;
            rec.d_true = d_true;
            rec.r = r;
            rec.statistic = outcome.statistic;
            rec.delta = outcome.delta;
            rec.clamped = outcome.clamped;
            rec.failure = outcome.failure;
            rec.correct = outcome.delta.has_value() && *outcome.delta == d_true;
            rec.edges = edges;
            rec.max_degree = maxdeg;
            rec.seconds = setup_share + eval_seconds;
            result.records[unit * method_count + mi] = std::move(rec);
        }
    };

    const int worker_count =
        static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), unit_count));
    std::atomic<std::size_t> next_unit{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t unit = next_unit.fetch_add(1);
            if (unit >= unit_count) return;
            try {
                run_unit(unit);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(worker_count));
        for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Per (n, method) summaries in config order.
    const double w_true = wd(d_true);
    for (std::size_t n_index = 0; n_index < config.ns.size(); ++n_index) {
        for (std::size_t mi = 0; mi < method_count; ++mi) {
            MethodSummary s;
            s.method = config.methods[mi];
            s.n = config.ns[n_index];
            s.trials = config.trials;
            int correct = 0;
            int failures = 0;
            int defined = 0;
            double abs_dev_sum = 0.0;
            for (std::size_t trial = 0; trial < trials; ++trial) {
                const auto& rec =
                    result.records[(n_index * trials + trial) * method_count + mi];
                if (rec.correct) ++correct;
                if (rec.failure) ++failures;
                if (rec.statistic) {
                    ++defined;
                    abs_dev_sum += std::fabs(*rec.statistic - w_true);
                }
            }
            const double t = static_cast<double>(config.trials);
            s.fraction_correct = correct / t;
            s.fraction_failed = failures / t;
            s.fraction_incorrect = (config.trials - correct - failures) / t;
            s.mean_abs_deviation =
                defined > 0 ? abs_dev_sum / defined : std::numeric_limits<double>::quiet_NaN();
            result.summaries.push_back(s);
        }
    }
    return result;
}

/// CSV layout is fixed; timing is opt-in so that default output is
/// byte-identical across runs and worker counts (wall-clock measurements
/// are the one nondeterministic field).
inline void write_records_csv(std::span<const TrialRecord> records, std::ostream& os,
                              bool include_timing = false) {
    os << "trial,method,n,d_true,r,W,delta,clamped,failed,correct,edges,max_degree,seconds\n";
    for (const auto& rec : records) {
        os << rec.trial << ',' << method_name(rec.method) << ',' << rec.n << ',' << rec.d_true
           << ',' << format_double(rec.r) << ',';
        if (rec.statistic) os << format_double(*rec.statistic);
        os << ',';
        if (rec.delta) os << *rec.delta;
        os << ',' << (rec.clamped ? 1 : 0) << ',' << (rec.failure ? 1 : 0) << ','
           << (rec.correct ? 1 : 0) << ',' << rec.edges << ',' << rec.max_degree << ',';
        if (include_timing) os << format_double(rec.seconds);
        os << '\n';
    }
}

inline nlohmann::json summary_json(const ExperimentConfig& config,
                                   const ExperimentResult& result) {
    nlohmann::json summaries = nlohmann::json::array();
    for (const auto& s : result.summaries) {
        nlohmann::json entry;
        entry["method"] = method_name(s.method);
        entry["n"] = s.n;
        entry["trials"] = s.trials;
        entry["fraction_correct"] = s.fraction_correct;
        entry["fraction_failed"] = s.fraction_failed;
        entry["fraction_incorrect"] = s.fraction_incorrect;
        if (std::isnan(s.mean_abs_deviation)) {
            entry["mean_abs_deviation"] = nullptr;
        } else {
            entry["mean_abs_deviation"] = s.mean_abs_deviation;
        }
        summaries.push_back(entry);
    }
    nlohmann::json out;
    out["density"] = density_to_string(config.density);
    out["d_true"] = config.density.d;
    out["seed"] = config.seed;
    out["radius_rule"] = radius_rule_name(config.radius_rule.kind);
    out["radius_value"] = config.radius_rule.value;
    out["summaries"] = summaries;
    return out;
}

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config: missing key '") + key + "'");
    return j.at(key);
}

inline std::int64_t require_integer(const nlohmann::json& j, const char* key) {
    const auto& v = require_key(j, key);
    if (!v.is_number_integer())
        throw ConfigError(std::string("config: key '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

inline std::uint64_t to_count(const nlohmann::json& v, const char* key) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError(std::string("config: key '") + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

} // namespace detail

/// JSON schema:
/// {
///   "density": "torus",
///   "d": 2,
///   "n": 100000,                       // scalar or array
///   "radius": {"rule": "nrd", "value": 100.0},
///   "methods": ["W1", "W3"],
///   "trials": 30,
///   "seed": 12345,
///   "cap": 4096                        // optional
/// }
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    static constexpr const char* known[] = {"density", "d", "n",    "radius",
                                            "methods", "trials", "seed", "cap"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "'");
    }

    ExperimentConfig config;

    const std::int64_t d = detail::require_integer(j, "d");
    if (d < 1 || d > 1'000'000) throw ConfigError("config: key 'd' must be a positive dimension");

    const auto& density = detail::require_key(j, "density");
    if (!density.is_string()) throw ConfigError("config: key 'density' must be a string");
    config.density = parse_density(density.get<std::string>(), static_cast<int>(d));

    const auto& n = detail::require_key(j, "n");
    config.ns.clear();
    if (n.is_array()) {
        for (const auto& entry : n) config.ns.push_back(detail::to_count(entry, "n"));
    } else {
        config.ns.push_back(detail::to_count(n, "n"));
    }

    const auto& radius = detail::require_key(j, "radius");
    if (!radius.is_object()) throw ConfigError("config: key 'radius' must be an object");
    const auto& rule = detail::require_key(radius, "rule");
    if (!rule.is_string()) throw ConfigError("config: key 'radius.rule' must be a string");
    config.radius_rule.kind = parse_radius_rule(rule.get<std::string>());
    const auto& value = detail::require_key(radius, "value");
    if (!value.is_number()) throw ConfigError("config: key 'radius.value' must be a number");
    config.radius_rule.value = value.get<double>();

    const auto& methods = detail::require_key(j, "methods");
    if (!methods.is_array() || methods.empty())
        throw ConfigError("config: key 'methods' must be a nonempty array");
    config.methods.clear();
    for (const auto& entry : methods) {
        if (!entry.is_string()) throw ConfigError("config: key 'methods' must hold strings");
        config.methods.push_back(parse_method(entry.get<std::string>()));
    }

    const std::int64_t trials = detail::require_integer(j, "trials");
    if (trials < 1 || trials > 1'000'000'000)
        throw ConfigError("config: key 'trials' must be a positive integer");
    config.trials = static_cast<int>(trials);

    config.seed = detail::to_count(detail::require_key(j, "seed"), "seed");

    if (j.contains("cap")) {
        const std::int64_t cap = detail::require_integer(j, "cap");
        if (cap < 1 || cap > 1'000'000)
            throw ConfigError("config: key 'cap' must be a positive dimension bound");
        config.cap = static_cast<int>(cap);
    }

    validate_experiment_config(config);
    return config;
}

/// Parse a config file; malformed JSON is a parse error, a well-formed
/// document with bad contents is a configuration error.
inline ExperimentConfig read_experiment_config(std::istream& is) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config json: ") + e.what());
    }
    return parse_experiment_config(j);
}

struct GenStats {
    std::uint64_t n = 0;
    std::uint64_t edges = 0;
    std::uint32_t max_degree = 0;
};

/// Sample one graph and write it as an edge list. The seed feeds point
/// sampling directly, so `gen` with a given seed matches the graph a
/// simulate unit would build from the same substream.
inline GenStats generate_graph(const DensitySpec& density, std::uint64_t n,
                               const RadiusRule& rule, std::uint64_t seed, std::ostream& os) {
    if (n > 0xFFFFFFFFull) throw ConfigError("gen: n exceeds the supported vertex count");
    const double r = resolve_radius(rule, n, density.d, density.metric());
    const PointCloud cloud = sample_points(density, n, seed);
    const Graph g = build_rgg(cloud, r);
    write_edge_list(g, os);
    return {n, g.edge_count(), max_degree(g)};
}

} // namespace geodim
