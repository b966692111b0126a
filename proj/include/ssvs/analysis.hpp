#pragma once
//! End-to-end runs: sample (or enumerate), summarize and write every output file.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "ssvs/config.hpp"
#include "ssvs/oracle.hpp"
#include "ssvs/prior.hpp"
#include "ssvs/sampler.hpp"
#include "ssvs/summary.hpp"
#include "ssvs/svg.hpp"

namespace ssvs {

struct ChainSummary {
    std::uint64_t seed = 0;
    ModelTable table;
    std::vector<double> marginals;
    double sigma2_mean = 0;
    double lag1_sigma2 = 0;
    double lag1_size = 0;
};

struct AnalysisResult {
    std::filesystem::path dir;
    ModelTable table;                 ///< pooled over chains
    std::vector<double> marginals;    ///< pooled
    std::vector<double> prior_marginals;
    std::vector<ChainSummary> chains;
    double between_chain_discrepancy = 0;
    std::optional<ExactPosterior> exact;
    std::optional<double> oracle_discrepancy;  ///< max |sampled - exact| marginal
    std::optional<double> oracle_tv;
    std::vector<std::string> warnings;
    Json summary;
};

/// Output directory: the environment override when set, else the configured one.
inline std::filesystem::path output_dir(const RunConfig& rc) {
    if (const char* env = std::getenv("SSVS_OUTPUT_DIR"); env && *env) return env;
    return rc.output.dir;
}

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + p.string() + "'");
}

inline std::string models_csv(const ModelTable& t) {
    std::ostringstream o;
    write_models_csv(t, o);
    return o.str();
}

inline std::string marginals_csv(const std::vector<std::string>& labels, const std::vector<double>& post,
                                 const std::vector<double>& prior) {
    std::ostringstream o;
    write_marginals_csv({labels, post, prior}, o);
    return o.str();
}

inline Json real_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

/// Warnings about the prior that do not stop a run.
inline std::vector<std::string> prior_warnings(const PriorSpec& spec) {
    std::vector<std::string> out;
    for (const auto& d : validate(spec))
        if (!d.is_error()) out.push_back(d.message);
    bool strict = false;
    for (const auto& n : spec.nodes)
        for (double v : n.rows()) strict = strict || v == 0.0 || v == 1.0;
    if (spec.weight.active())
        for (double w : spec.weight.weights) strict = strict || w == 0.0;
    strict = strict || spec.weight.kind == GlobalWeight::Kind::size_indicator || spec.competing.has_value();
    if (strict)
        out.push_back("prior gives zero mass to some patterns; single-site Gibbs moves can only reach patterns "
                      "connected through patterns of positive mass");
    return out;
}

inline Json marginal_rows(const std::vector<std::string>& labels, const std::vector<double>& post,
                          const std::vector<double>& prior) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < labels.size(); ++i)
        rows.push_back({{"term", labels[i]},
                        {"posterior_incl", post[i]},
                        {"prior_incl", i < prior.size() ? real_or_null(prior[i]) : Json(nullptr)}});
    return rows;
}

inline Json model_rows(const ModelTable& t, const Prior& prior, const std::vector<std::string>& labels,
                       std::size_t limit) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < t.rows.size() && k < limit; ++k) {
        const auto& r = t.rows[k];
        Json active = Json::array();
        for (std::size_t i = 0; i < r.key.size(); ++i)
            if (r.key[i] == '1') active.push_back(labels[i]);
        Json odds = nullptr;
        try {
            if (prior.normalized()) odds = real_or_null(posterior_prior_odds(r.posterior, r.prior));
        } catch (const Error&) {
        }
        rows.push_back({{"pattern", r.key},
                        {"terms", active},
                        {"count", r.count},
                        {"posterior_prob", r.posterior},
                        {"prior_prob", real_or_null(r.prior)},
                        {"posterior_prior_odds", odds},
                        {"rss", real_or_null(r.rss)},
                        {"r2", real_or_null(r.r2)}});
    }
    return rows;
}

inline double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline void write_figures(const std::filesystem::path& dir, const std::string& suffix, const ModelTable& t,
                          const RunConfig& rc) {
    const auto& pb = rc.problem;
    write_text(dir / ("model_matrix" + suffix + ".svg"), render_model_matrix(t, pb.prior.labels, rc.output.top_n));
    write_text(dir / ("rss_size" + suffix + ".svg"),
               render_rss_size(t, pb.design, pb.data.response, rc.output.top_k));
}

}  // namespace detail

/// Exact posterior for the configured problem.
inline ExactPosterior exact_for(const RunConfig& rc, const Prior& prior) {
    return exact_posterior(prior, rc.problem.design, rc.problem.data.response, rc.problem.scales, rc.oracle.config);
}

/// Run the sampler (all chains), summarize, and write outputs under `dir`
/// (default: output_dir(rc)).
inline AnalysisResult run_analysis(const RunConfig& rc, std::optional<std::filesystem::path> dir = std::nullopt) {
    const auto& pb = rc.problem;
    AnalysisResult res;
    res.dir = dir ? *dir : output_dir(rc);
    std::filesystem::create_directories(res.dir);

    Prior prior(pb.prior);
    res.warnings = detail::prior_warnings(pb.prior);
    const auto& labels = pb.prior.labels;
    const std::size_t p = labels.size();

    // Chains k = 0..K-1 use seeds seed + k and run concurrently.
    std::vector<std::future<ChainOutput>> futures;
    for (std::size_t k = 0; k < rc.sampler.chains; ++k) {
        ChainConfig cfg = rc.sampler.chain;
        cfg.seed = rc.sampler.chain.seed + k;
        auto launch = rc.sampler.chains > 1 ? std::launch::async : std::launch::deferred;
        futures.push_back(std::async(launch, [&pb, &prior, cfg] {
            return run_chain(cfg, pb.design, pb.data.response, prior, pb.scales, pb.noise);
        }));
    }
    std::vector<ChainOutput> outputs;
    for (auto& f : futures) outputs.push_back(f.get());

    auto pm = prior_marginals(prior, 20, 100000, rc.sampler.chain.seed);
    res.prior_marginals = pm.inclusion;
    if (!pm.exact) res.warnings.push_back("prior inclusion probabilities estimated by Monte Carlo");

    std::vector<ActivationPattern> pooled;
    for (const auto& out : outputs) {
        ChainSummary cs;
        cs.seed = out.config.seed;
        cs.table = tabulate(out.deltas);
        cs.marginals = marginal_inclusion(out.deltas);
        std::vector<double> sizes;
        for (const auto& d : out.deltas) sizes.push_back(static_cast<double>(d.count()));
        double s = 0;
        for (double v : out.sigma2s) s += v;
        cs.sigma2_mean = out.sigma2s.empty() ? 0.0 : s / static_cast<double>(out.sigma2s.size());
        cs.lag1_sigma2 = lag1_autocorrelation(out.sigma2s);
        cs.lag1_size = lag1_autocorrelation(sizes);
        pooled.insert(pooled.end(), out.deltas.begin(), out.deltas.end());
        res.chains.push_back(std::move(cs));
    }
    res.table = tabulate(pooled);
    annotate(res.table, prior, pb.design, pb.data.response, rc.output.top_n);
    res.marginals = marginal_inclusion(pooled);
    for (std::size_t i = 0; i < p; ++i) {
        double lo = 1, hi = 0;
        for (const auto& c : res.chains) {
            lo = std::min(lo, c.marginals[i]);
            hi = std::max(hi, c.marginals[i]);
        }
        res.between_chain_discrepancy = std::max(res.between_chain_discrepancy, hi - lo);
    }

    detail::write_text(res.dir / "models.csv", detail::models_csv(res.table));
    detail::write_text(res.dir / "marginals.csv", detail::marginals_csv(labels, res.marginals, res.prior_marginals));
    detail::write_figures(res.dir, "", res.table, rc);
    detail::write_text(res.dir / "samples.svg",
                       render_sampled_matrix(outputs.front().deltas, labels, std::min<std::size_t>(1000, outputs.front().deltas.size())));
    if (res.chains.size() > 1)
        for (std::size_t k = 0; k < res.chains.size(); ++k) {
            auto cdir = res.dir / ("chain_" + std::to_string(k + 1));
            std::filesystem::create_directories(cdir);
            detail::write_text(cdir / "models.csv", detail::models_csv(res.chains[k].table));
            detail::write_text(cdir / "marginals.csv",
                               detail::marginals_csv(labels, res.chains[k].marginals, res.prior_marginals));
        }

    Json oracle_json = nullptr;
    if (rc.oracle.enabled) {
        res.exact = exact_for(rc, prior);
        auto et = tabulate(*res.exact);
        annotate(et, prior, pb.design, pb.data.response, rc.output.top_n);
        res.oracle_discrepancy = detail::max_abs_difference(res.marginals, res.exact->marginals);
        res.oracle_tv = total_variation(res.table, et);
        detail::write_text(res.dir / "oracle_models.csv", detail::models_csv(et));
        detail::write_text(res.dir / "oracle_marginals.csv",
                           detail::marginals_csv(labels, res.exact->marginals, res.prior_marginals));
        oracle_json = {{"max_marginal_discrepancy", *res.oracle_discrepancy},
                       {"total_variation", *res.oracle_tv},
                       {"marginals", detail::marginal_rows(labels, res.exact->marginals, res.prior_marginals)},
                       {"top_models", detail::model_rows(et, prior, labels, rc.output.top_k)}};
    }

    Json chains = Json::array();
    for (const auto& c : res.chains)
        chains.push_back({{"seed", c.seed},
                          {"recorded", c.table.samples},
                          {"distinct_models", c.table.rows.size()},
                          {"sigma2_mean", c.sigma2_mean},
                          {"lag1_autocorrelation", {{"sigma2", c.lag1_sigma2}, {"model_size", c.lag1_size}}}});

    Json s;
    s["nodes"] = labels;
    s["prior"] = prior_echo(pb.prior);
    s["prior_marginals_exact"] = pm.exact;
    s["marginals"] = detail::marginal_rows(labels, res.marginals, res.prior_marginals);
    s["top_models"] = detail::model_rows(res.table, prior, labels, rc.output.top_k);
    s["chains"] = {{"count", res.chains.size()},
                   {"iterations", rc.sampler.chain.iterations},
                   {"burn_in", rc.sampler.chain.burn_in},
                   {"thin", rc.sampler.chain.thin},
                   {"recorded_per_chain", rc.sampler.chain.recorded()},
                   {"max_between_chain_discrepancy", res.between_chain_discrepancy},
                   {"per_chain", chains}};
    s["oracle"] = oracle_json;
    s["warnings"] = res.warnings;
    s["config"] = rc.echo;
    res.summary = s;
    detail::write_text(res.dir / "summary.json", s.dump(2) + "\n");
    return res;
}

/// Exact enumeration only; writes oracle_models.csv, oracle_marginals.csv,
/// oracle_summary.json and the figures for the exact table.
inline AnalysisResult run_oracle(const RunConfig& rc, std::optional<std::filesystem::path> dir = std::nullopt) {
    const auto& pb = rc.problem;
    AnalysisResult res;
    res.dir = dir ? *dir : output_dir(rc);
    std::filesystem::create_directories(res.dir);
    Prior prior(pb.prior);
    res.warnings = detail::prior_warnings(pb.prior);
    const auto& labels = pb.prior.labels;

    res.exact = exact_for(rc, prior);
    res.table = tabulate(*res.exact);
    annotate(res.table, prior, pb.design, pb.data.response, rc.output.top_n);
    res.marginals = res.exact->marginals;
    res.prior_marginals = prior_marginals(prior, rc.oracle.config.p_limit).inclusion;

    detail::write_text(res.dir / "oracle_models.csv", detail::models_csv(res.table));
    detail::write_text(res.dir / "oracle_marginals.csv",
                       detail::marginals_csv(labels, res.marginals, res.prior_marginals));
    detail::write_figures(res.dir, "_oracle", res.table, rc);

    Json s;
    s["nodes"] = labels;
    s["prior"] = prior_echo(pb.prior);
    s["marginals"] = detail::marginal_rows(labels, res.marginals, res.prior_marginals);
    s["top_models"] = detail::model_rows(res.table, prior, labels, rc.output.top_k);
    s["sigma_grid_points"] = res.exact->sigma_grid.size();
    s["warnings"] = res.warnings;
    s["config"] = rc.echo;
    res.summary = s;
    detail::write_text(res.dir / "oracle_summary.json", s.dump(2) + "\n");
    return res;
}

}  // namespace ssvs
