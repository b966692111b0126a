#pragma once
//! Exact posterior over activation patterns for small models. The coefficients
//! are integrated out analytically; sigma is either fixed or integrated on a
//! log-spaced grid.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssvs/data.hpp"
#include "ssvs/error.hpp"
#include "ssvs/linalg.hpp"
#include "ssvs/pattern.hpp"
#include "ssvs/prior.hpp"
#include "ssvs/sampler.hpp"

namespace ssvs {

/// Sufficient statistics of a design and response.
struct GramData {
    Eigen::MatrixXd xtx;
    Eigen::VectorXd xty;
    double yty = 0;
    std::size_t n = 0;

    static GramData of(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
        return {x.transpose() * x, x.transpose() * y, y.squaredNorm(), static_cast<std::size_t>(y.size())};
    }
};

/// log N(Y; 0, sigma^2 I + X D^2 X') evaluated through the q x q system
/// M = sigma^2 D^-2 + X'X:
///   log det = (n - q) log sigma^2 + sum log d_j^2 + log det M
///   quad    = (Y'Y - b' M^-1 b) / sigma^2, b = X'Y.
inline double log_marginal(const GramData& g, const Eigen::VectorXd& prior_sd, double sigma) {
    if (!(sigma > 0)) throw Error("log_marginal needs sigma > 0");
    const double s2 = sigma * sigma;
    const auto q = g.xtx.rows();
    const double n = static_cast<double>(g.n);
    double log_det = n * std::log(s2);
    double quad = g.yty / s2;
    if (q > 0) {
        Eigen::MatrixXd m = g.xtx;
        m.diagonal() += s2 * prior_sd.cwiseAbs2().cwiseInverse();
        ScaledCholesky chol(m);
        if (!chol.ok()) throw Error("marginal covariance is not positive definite");
        log_det += -static_cast<double>(q) * std::log(s2) + 2.0 * prior_sd.array().log().sum() + chol.log_det();
        quad = (g.yty - g.xty.dot(chol.solve(g.xty))) / s2;
    }
    return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

inline double log_marginal(const ActivationPattern& delta, double sigma, const DesignMatrix& design,
                           const Eigen::VectorXd& response, const SpikeSlabScales& scales) {
    return log_marginal(GramData::of(design.x, response), scales.prior_sd(design, delta), sigma);
}

struct OracleConfig {
    enum class SigmaMode { fixed, integrate };
    SigmaMode sigma_mode = SigmaMode::integrate;
    double sigma = 1.0;                   ///< fixed mode
    std::size_t grid_points = 128;        ///< integrate mode
    std::optional<double> sigma_min, sigma_max;
    std::size_t p_limit = 14;
    bool likelihood = true;               ///< false reproduces the prior
    NoiseVariancePrior noise;
};

struct ExactEntry {
    ActivationPattern pattern;
    double probability = 0;
    double log_marginal = 0;
    double log_prior = 0;
};

struct ExactPosterior {
    std::vector<ExactEntry> entries;  ///< lexicographic pattern order
    std::vector<double> marginals;
    std::vector<double> sigma_grid;
};

/// Default sigma grid bounds: sqrt(RSS_full / (10 n)) to sqrt(10 TSS / n).
inline std::pair<double, double> default_sigma_bounds(const DesignMatrix& design, const Eigen::VectorXd& y) {
    const double n = static_cast<double>(y.size());
    double tss = (y.array() - y.mean()).square().sum();
    if (!(tss > 0)) tss = std::max(y.squaredNorm(), 1.0);
    double rss = least_squares(design.x, y).rss;
    rss = std::max(rss, 1e-10 * tss);
    return {std::sqrt(rss / (10.0 * n)), std::sqrt(10.0 * tss / n)};
}

/// log of the sigma prior density with respect to log sigma.
inline double log_sigma_prior(double sigma, const NoiseVariancePrior& noise) {
    if (noise.nu <= 0) return 0.0;  // p(sigma^2) ~ 1/sigma^2 is flat in log sigma
    const double s2 = sigma * sigma, a = noise.nu / 2.0, b = noise.nu * noise.lambda / 2.0;
    return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(s2) - b / s2 + std::log(2.0 * s2);
}

inline std::vector<double> exact_marginals(const ExactPosterior& ep) {
    if (ep.entries.empty()) return {};
    std::vector<double> m(ep.entries.front().pattern.size(), 0.0);
    for (const auto& e : ep.entries)
        for (std::size_t i = 0; i < m.size(); ++i)
            if (e.pattern[i]) m[i] += e.probability;
    return m;
}

inline ExactPosterior exact_posterior(const Prior& prior, const DesignMatrix& design, const Eigen::VectorXd& y,
                                      const SpikeSlabScales& scales, const OracleConfig& cfg = {}) {
    if (prior.size() > cfg.p_limit)
        throw Error("oracle: " + std::to_string(prior.size()) + " nodes exceeds p_limit " + std::to_string(cfg.p_limit));
    if (design.node_count() != prior.size()) throw Error("oracle: design and prior node counts differ");
    scales.check(design.cols() - 1);
    auto support = enumerate_support(prior, cfg.p_limit);

    ExactPosterior ep;
    std::vector<double> log_w;  // trapezoid log weights on the log-sigma grid
    if (cfg.likelihood && cfg.sigma_mode == OracleConfig::SigmaMode::integrate) {
        if (cfg.grid_points < 32) throw Error("oracle: sigma grid needs at least 32 points");
        auto [lo, hi] = default_sigma_bounds(design, y);
        if (cfg.sigma_min) lo = *cfg.sigma_min;
        if (cfg.sigma_max) hi = *cfg.sigma_max;
        if (!(lo > 0) || !(hi > lo)) throw Error("oracle: sigma grid bounds must satisfy 0 < min < max");
        const double u0 = std::log(lo), u1 = std::log(hi);
        const double h = (u1 - u0) / static_cast<double>(cfg.grid_points - 1);
        for (std::size_t k = 0; k < cfg.grid_points; ++k) {
            double s = std::exp(u0 + h * static_cast<double>(k));
            ep.sigma_grid.push_back(s);
            double w = (k == 0 || k + 1 == cfg.grid_points) ? 0.5 * h : h;
            log_w.push_back(std::log(w) + log_sigma_prior(s, cfg.noise));
        }
    }

    const auto gram = GramData::of(design.x, y);
    double log_total = neg_inf;
    std::vector<double> log_post;
    for (auto& wp : support) {
        ExactEntry e;
        e.pattern = wp.pattern;
        e.log_prior = wp.log_probability;
        if (cfg.likelihood) {
            auto sd = scales.prior_sd(design, wp.pattern);
            if (cfg.sigma_mode == OracleConfig::SigmaMode::fixed) {
                e.log_marginal = log_marginal(gram, sd, cfg.sigma);
            } else {
                double acc = neg_inf;
                for (std::size_t k = 0; k < ep.sigma_grid.size(); ++k)
                    acc = log_add(acc, log_w[k] + log_marginal(gram, sd, ep.sigma_grid[k]));
                e.log_marginal = acc;
            }
        }
        double lp = e.log_prior + e.log_marginal;
        log_post.push_back(lp);
        log_total = log_add(log_total, lp);
        ep.entries.push_back(std::move(e));
    }
    for (std::size_t k = 0; k < ep.entries.size(); ++k)
        ep.entries[k].probability = std::exp(log_post[k] - log_total);
    ep.marginals = exact_marginals(ep);
    return ep;
}

}  // namespace ssvs
