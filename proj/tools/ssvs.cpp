// Command-line front end: run, oracle, count, scenario.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssvs/ssvs.hpp"

namespace {

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

void print_result(const ssvs::AnalysisResult& r, const std::vector<std::string>& labels, std::size_t top) {
    std::printf("%-24s %10s %10s\n", "term", "posterior", "prior");
    for (std::size_t i = 0; i < labels.size(); ++i)
        std::printf("%-24s %10.4f %10.4f\n", labels[i].c_str(), r.marginals[i],
                    i < r.prior_marginals.size() ? r.prior_marginals[i] : ssvs::not_computed);
    std::printf("\n%-4s %10s  %s\n", "rank", "prob", "model");
    for (std::size_t k = 0; k < r.table.rows.size() && k < top; ++k) {
        const auto& row = r.table.rows[k];
        std::string terms;
        for (std::size_t i = 0; i < row.key.size(); ++i)
            if (row.key[i] == '1') terms += (terms.empty() ? "" : " ") + labels[i];
        std::printf("%-4zu %10.4f  %s\n", k + 1, row.posterior, terms.empty() ? "(none)" : terms.c_str());
    }
    if (r.oracle_discrepancy)
        std::printf("\nmax |sampled - exact| marginal: %.4f, total variation %.4f\n", *r.oracle_discrepancy,
                    *r.oracle_tv);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("\noutputs written to %s\n", r.dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian variable selection with structured model priors"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto run = app.add_subcommand("run", "sample the posterior described by a config file");
    run->add_option("config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (overrides the config and SSVS_OUTPUT_DIR)");

    auto oracle = app.add_subcommand("oracle", "enumerate the exact posterior for a small config");
    oracle->add_option("config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    oracle->add_option("--out", out_dir, "output directory");

    unsigned main_effects = 0;
    std::string rule = "strong";
    auto count = app.add_subcommand("count", "count models allowed by a heredity rule over main effects and "
                                             "two-way interactions");
    count->add_option("--main-effects,-m", main_effects, "number of main effects")->required();
    count->add_option("--rule", rule, "strong, weak or none")->check(CLI::IsMember({"strong", "weak", "none"}));

    std::string scen_name, scen_out;
    std::uint64_t seed = 1;
    double sigma = 1.0;
    std::size_t n = 50;
    std::vector<double> beta;
    auto scen = app.add_subcommand("scenario", "write a synthetic data set");
    scen->add_option("--name", scen_name, "table1 (interaction) or table3 (grouping)")
        ->required()
        ->check(CLI::IsMember({"table1", "table3", "interaction", "grouping"}));
    scen->add_option("--seed", seed, "random seed");
    scen->add_option("--sigma", sigma, "noise multiplier");
    scen->add_option("--n", n, "rows");
    scen->add_option("--beta", beta, "six true coefficients")->expected(6);
    scen->add_option("--out", scen_out, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*run || *oracle) {
            auto rc = ssvs::load_config(config_path);
            std::optional<std::filesystem::path> dir;
            if (!out_dir.empty()) dir = out_dir;
            auto r = *run ? ssvs::run_analysis(rc, dir) : ssvs::run_oracle(rc, dir);
            print_result(r, rc.problem.prior.labels, rc.output.top_k);
        } else if (*count) {
            ssvs::BigInt c = rule == "strong" ? ssvs::count_strong(main_effects)
                             : rule == "weak" ? ssvs::count_weak(main_effects)
                                              : ssvs::count_all(main_effects);
            std::cout << "terms " << ssvs::two_way_term_count(main_effects) << "\n"
                      << "models " << c << "\n"
                      << "log2 " << ssvs::log2_big(c) << "\n";
        } else if (*scen) {
            ssvs::ScenarioSpec spec;
            spec.name = *ssvs::scenario_name(scen_name);
            spec.seed = seed;
            spec.sigma = sigma;
            spec.n = n;
            spec.true_beta = beta;
            auto ds = ssvs::generate_scenario(spec);
            if (scen_out.empty()) {
                ssvs::write_csv(ds, std::cout);
            } else {
                std::ofstream out(scen_out);
                if (!out) throw ssvs::Error("cannot write '" + scen_out + "'");
                ssvs::write_csv(ds, out);
            }
        }
    } catch (const ssvs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return 0;
}
