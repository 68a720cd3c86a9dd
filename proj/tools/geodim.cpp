// Command-line front end: overlap-constant tables, one-off graph
// generation, dimension estimation from an edge list, and the batch
// simulation harness. Exit codes: 0 success, 2 configuration error,
// 3 input parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "geodim/errors.hpp"
#include "geodim/estimators.hpp"
#include "geodim/format.hpp"
#include "geodim/graph.hpp"
#include "geodim/harness.hpp"
#include "geodim/pointcloud.hpp"
#include "geodim/wd.hpp"

namespace {

int run_wd_table(int max_d) {
    for (int d = 1; d <= max_d; ++d) {
        std::cout << d << ' ' << geodim::format_double_sig(geodim::wd(d), 12) << '\n';
    }
    return 0;
}

int run_gen(const std::string& density_text, int d, std::uint64_t n,
            const geodim::RadiusRule& rule, std::uint64_t seed, const std::string& out_path) {
    const geodim::DensitySpec density = geodim::parse_density(density_text, d);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw geodim::ConfigError("gen: cannot open output file '" + out_path + "'");
    const geodim::GenStats stats = geodim::generate_graph(density, n, rule, seed, out);
    out.flush();
    if (!out) throw geodim::ConfigError("gen: failed writing '" + out_path + "'");
    std::cerr << "n=" << stats.n << " edges=" << stats.edges << " max_degree=" << stats.max_degree
              << '\n';
    return 0;
}

int run_estimate(const std::string& input_path, const std::string& method_text,
                 std::uint64_t seed, int cap) {
    const geodim::EstimatorMethod method = geodim::parse_method(method_text);
    std::ifstream in(input_path, std::ios::binary);
    if (!in) throw geodim::ConfigError("estimate: cannot open input file '" + input_path + "'");
    const geodim::Graph g = geodim::read_edge_list(in);
    const geodim::EstimatorOutcome outcome = geodim::estimate_dimension(g, method, seed, cap);

    nlohmann::json j;
    j["method"] = geodim::method_name(method);
    j["W"] = outcome.statistic ? nlohmann::json(*outcome.statistic) : nlohmann::json(nullptr);
    j["delta"] = outcome.delta ? nlohmann::json(*outcome.delta) : nlohmann::json(nullptr);
    j["clamped"] = outcome.clamped;
    j["failure"] = outcome.failure ? nlohmann::json(geodim::failure_name(*outcome.failure))
                                   : nlohmann::json(nullptr);
    nlohmann::json diag = nlohmann::json::object();
    const auto& dg = outcome.diagnostics;
    if (dg.degree) diag["degree"] = *dg.degree;
    if (dg.local_edges) diag["local_edges"] = *dg.local_edges;
    if (dg.triangles) diag["triangles"] = *dg.triangles;
    if (dg.denominator) diag["denominator"] = *dg.denominator;
    if (dg.qualifying) diag["qualifying"] = *dg.qualifying;
    j["diagnostics"] = diag;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& summary_path, int threads, bool timing) {
    std::ifstream cfg(config_path, std::ios::binary);
    if (!cfg) throw geodim::ConfigError("simulate: cannot open config file '" + config_path + "'");
    const geodim::ExperimentConfig config = geodim::read_experiment_config(cfg);
    const geodim::ExperimentResult result = geodim::run_experiment(config, threads);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw geodim::ConfigError("simulate: cannot open output file '" + out_path + "'");
    geodim::write_records_csv(result.records, out, timing);
    out.flush();
    if (!out) throw geodim::ConfigError("simulate: failed writing '" + out_path + "'");

    if (!summary_path.empty()) {
        std::ofstream sum(summary_path, std::ios::binary);
        if (!sum)
            throw geodim::ConfigError("simulate: cannot open summary file '" + summary_path + "'");
        sum << geodim::summary_json(config, result).dump(2) << '\n';
        sum.flush();
        if (!sum) throw geodim::ConfigError("simulate: failed writing '" + summary_path + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euclidean dimension estimation from random geometric graphs"};
    app.require_subcommand(1);

    auto* wd_cmd = app.add_subcommand("wd", "Print d and w_d for d = 1..max-d");
    int max_d = 10;
    wd_cmd->add_option("--max-d", max_d, "largest dimension to print")
        ->required()
        ->check(CLI::PositiveNumber);

    auto* gen_cmd = app.add_subcommand("gen", "Sample one geometric graph, write its edge list");
    std::string gen_density = "torus";
    int gen_d = 2;
    std::uint64_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    double gen_r = 0.0;
    double gen_nrd = 0.0;
    double gen_n32rd = 0.0;
    gen_cmd->add_option("--density", gen_density,
                        "density: torus | cube | gauss:sigma=<v> | beta:a=<v>,b=<v>");
    gen_cmd->add_option("--d", gen_d, "dimension")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--n", gen_n, "number of points")->required();
    gen_cmd->add_option("--seed", gen_seed, "random seed")->required();
    gen_cmd->add_option("--out", gen_out, "output edge-list path")->required();
    auto* radius_group = gen_cmd->add_option_group("radius", "connection radius rule");
    radius_group->add_option("--r", gen_r, "explicit radius");
    radius_group->add_option("--nrd", gen_nrd, "constant for n r^d = c");
    radius_group->add_option("--n32rd", gen_n32rd, "constant for n^(3/2) r^d = c");
    radius_group->require_option(1);

    auto* est_cmd = app.add_subcommand("estimate", "Estimate dimension from an edge-list file");
    std::string est_input;
    std::string est_method;
    std::uint64_t est_seed = 0;
    int est_cap = geodim::kDefaultDimensionCap;
    est_cmd->add_option("--input", est_input, "edge-list file")->required();
    est_cmd->add_option("--method", est_method, "W1 | W2 | W2sym | W3 | W4")->required();
    est_cmd->add_option("--seed", est_seed, "label-shuffle seed")->required();
    est_cmd->add_option("--cap", est_cap, "dimension search cap")->check(CLI::PositiveNumber);

    auto* sim_cmd = app.add_subcommand("simulate", "Run a batch experiment from a JSON config");
    std::string sim_config;
    std::string sim_out;
    std::string sim_summary;
    int sim_threads = 1;
    bool sim_timing = false;
    sim_cmd->add_option("--config", sim_config, "JSON experiment config")->required();
    sim_cmd->add_option("--out", sim_out, "output CSV path")->required();
    sim_cmd->add_option("--summary", sim_summary, "optional summary JSON path");
    sim_cmd->add_option("--threads", sim_threads, "worker threads")->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--timing", sim_timing, "fill the seconds column (nondeterministic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*wd_cmd) return run_wd_table(max_d);
        if (*gen_cmd) {
            geodim::RadiusRule rule;
            if (radius_group->count("--r") > 0) {
                rule = {geodim::RadiusRuleKind::explicit_radius, gen_r};
            } else if (radius_group->count("--nrd") > 0) {
                rule = {geodim::RadiusRuleKind::n_r_pow_d, gen_nrd};
            } else {
                rule = {geodim::RadiusRuleKind::n32_r_pow_d, gen_n32rd};
            }
            return run_gen(gen_density, gen_d, gen_n, rule, gen_seed, gen_out);
        }
        if (*est_cmd) return run_estimate(est_input, est_method, est_seed, est_cap);
        if (*sim_cmd) return run_simulate(sim_config, sim_out, sim_summary, sim_threads, sim_timing);
    } catch (const geodim::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const geodim::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
