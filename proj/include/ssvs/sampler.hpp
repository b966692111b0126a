#pragma once
//! Stochastic search variable selection: Gibbs sampling of (beta, sigma^2, delta)
//! under a spike-and-slab coefficient prior and a structured prior on delta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssvs/data.hpp"
#include "ssvs/error.hpp"
#include "ssvs/linalg.hpp"
#include "ssvs/pattern.hpp"
#include "ssvs/prior.hpp"

namespace ssvs {

/// Per selectable column: spike sd tau_j and slab multiplier c_j (slab sd c_j tau_j).
/// Entry j describes design column j + 1; the intercept has its own diffuse scale.
struct SpikeSlabScales {
    Eigen::VectorXd tau;
    Eigen::VectorXd c;
    double intercept_scale = 1e6;

    static SpikeSlabScales uniform(std::size_t columns, double tau, double c) {
        return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(columns), tau),
                Eigen::VectorXd::Constant(static_cast<Eigen::Index>(columns), c), 1e6};
    }

    void check(std::size_t columns) const {
        if (static_cast<std::size_t>(tau.size()) != columns || static_cast<std::size_t>(c.size()) != columns)
            throw SamplerError("scales: expected " + std::to_string(columns) + " selectable columns");
        if ((tau.array() <= 0).any() || !tau.allFinite()) throw SamplerError("scales: tau must be positive");
        if ((c.array() < 1).any() || !c.allFinite()) throw SamplerError("scales: c must be at least 1");
        if (!(intercept_scale > 0)) throw SamplerError("scales: intercept scale must be positive");
    }

    /// Prior sd of every design column (intercept first) under `delta`.
    Eigen::VectorXd prior_sd(const DesignMatrix& design, const ActivationPattern& delta) const {
        Eigen::VectorXd sd(static_cast<Eigen::Index>(design.cols()));
        sd[0] = intercept_scale;
        for (std::size_t j = 1; j < design.cols(); ++j) {
            auto k = static_cast<Eigen::Index>(j - 1);
            bool on = delta[static_cast<std::size_t>(design.column_node[j])];
            sd[static_cast<Eigen::Index>(j)] = on ? c[k] * tau[k] : tau[k];
        }
        return sd;
    }
};

/// sigma^2 ~ InverseGamma(nu / 2, nu * lambda / 2); nu = 0 is the improper
/// prior p(sigma^2) proportional to 1 / sigma^2.
struct NoiseVariancePrior {
    double nu = 0.0;
    double lambda = 1.0;
};

struct ChainConfig {
    std::size_t iterations = 10000;
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
    std::uint64_t seed = 1;
    bool record_coefficients = false;
    bool random_scan = false;

    void check() const {
        if (iterations <= burn_in) throw SamplerError("chain: iterations must exceed burn_in");
        if (thin < 1) throw SamplerError("chain: thin must be at least 1");
    }
    std::size_t recorded() const { return (iterations - burn_in) / thin; }
};

struct SamplerState {
    Eigen::VectorXd beta;
    double sigma2 = 1.0;
    ActivationPattern delta;
};

struct ChainOutput {
    std::vector<ActivationPattern> deltas;
    std::vector<Eigen::VectorXd> betas;
    std::vector<double> sigma2s;
    ChainConfig config;
};

using Rng = std::mt19937_64;

struct GaussianPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

/// beta | sigma^2, delta ~ N(A^-1 X'Y / sigma^2, A^-1), A = X'X / sigma^2 + D^-2.
inline GaussianPosterior coefficient_posterior(const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xty,
                                               const Eigen::VectorXd& prior_sd, double sigma2) {
    Eigen::MatrixXd a = xtx / sigma2;
    a.diagonal() += prior_sd.cwiseAbs2().cwiseInverse();
    ScaledCholesky chol(a);
    if (!chol.ok()) throw SamplerError("coefficient precision matrix is not positive definite");
    GaussianPosterior out;
    out.mean = chol.solve(xty / sigma2);
    out.covariance = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.rows(); ++j)
        out.covariance.col(j) = chol.solve(Eigen::VectorXd::Unit(a.rows(), j));
    return out;
}

inline Eigen::VectorXd draw_coefficients(const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xty,
                                         const Eigen::VectorXd& prior_sd, double sigma2, Rng& rng) {
    if (!(sigma2 > 0)) throw SamplerError("coefficient draw needs sigma^2 > 0");
    Eigen::MatrixXd a = xtx / sigma2;
    a.diagonal() += prior_sd.cwiseAbs2().cwiseInverse();
    ScaledCholesky chol(a);
    if (!chol.ok()) throw SamplerError("coefficient precision matrix is not positive definite");
    std::normal_distribution<double> norm(0.0, 1.0);
    Eigen::VectorXd z(a.rows());
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = norm(rng);
    return chol.solve(xty / sigma2) + chol.inverse_root_times(z);
}

struct InverseGammaParams {
    double shape = 0;
    double scale = 0;
};

inline InverseGammaParams noise_variance_posterior(double rss, std::size_t n, const NoiseVariancePrior& prior) {
    if (prior.nu < 0) throw SamplerError("noise prior: nu must be non-negative");
    if (prior.nu == 0 && !(rss > 0)) throw SamplerError("noise draw: zero residual with improper prior");
    if (prior.nu > 0 && !(prior.lambda > 0)) throw SamplerError("noise prior: lambda must be positive");
    double extra = prior.nu > 0 ? prior.nu * prior.lambda : 0.0;
    return {(static_cast<double>(n) + prior.nu) / 2.0, (rss + extra) / 2.0};
}

/// sigma^2 as scale / Gamma(shape, 1).
inline double draw_inverse_gamma(const InverseGammaParams& ig, Rng& rng) {
    std::gamma_distribution<double> gamma(ig.shape, 1.0);
    double g = gamma(rng);
    if (!(g > 0)) throw SamplerError("inverse-gamma draw underflowed");
    return ig.scale / g;
}

/// log N(b; 0, (c tau)^2) - log N(b; 0, tau^2).
inline double slab_spike_log_ratio(double beta, double tau, double c) {
    return -std::log(c) + beta * beta / (2.0 * tau * tau) * (1.0 - 1.0 / (c * c));
}

/// Gibbs sampler bound to one design, response and prior.
class SsvsSampler {
public:
    SsvsSampler(const DesignMatrix& design, const Eigen::VectorXd& response, const Prior& prior,
                SpikeSlabScales scales, NoiseVariancePrior noise)
        : design_(design), y_(response), prior_(prior), scales_(std::move(scales)), noise_(noise) {
        if (design_.rows() != static_cast<std::size_t>(y_.size()))
            throw SamplerError("design and response lengths differ");
        if (design_.node_count() != prior_.size())
            throw SamplerError("design has " + std::to_string(design_.node_count()) + " nodes, prior has " +
                               std::to_string(prior_.size()));
        scales_.check(design_.cols() - 1);
        xtx_ = design_.x.transpose() * design_.x;
        xty_ = design_.x.transpose() * y_;
    }

    const Prior& prior() const { return prior_; }
    const SpikeSlabScales& scales() const { return scales_; }

    Eigen::VectorXd draw_coefficients(const SamplerState& s, Rng& rng) const {
        return ssvs::draw_coefficients(xtx_, xty_, scales_.prior_sd(design_, s.delta), s.sigma2, rng);
    }

    double residual_sum_of_squares(const Eigen::VectorXd& beta) const {
        return (y_ - design_.x * beta).squaredNorm();
    }

    double draw_noise_variance(const SamplerState& s, Rng& rng) const {
        auto ig = noise_variance_posterior(residual_sum_of_squares(s.beta), design_.rows(), noise_);
        return draw_inverse_gamma(ig, rng);
    }

    /// Pr(delta_i = 1 | beta, delta_(-i)): the product over the node's columns
    /// of slab/spike density ratios times the prior conditional odds.
    double activation_probability(std::size_t i, const SamplerState& s) const {
        double pi = prior_.conditional_activation(i, s.delta);
        if (pi <= 0.0) return 0.0;
        if (pi >= 1.0) return 1.0;
        double log_odds = std::log(pi) - std::log1p(-pi);
        for (auto j : design_.node_columns[i]) {
            auto k = static_cast<Eigen::Index>(j - 1);
            log_odds += slab_spike_log_ratio(s.beta[static_cast<Eigen::Index>(j)], scales_.tau[k], scales_.c[k]);
        }
        return 1.0 / (1.0 + std::exp(-log_odds));
    }

    /// One coordinate pass over delta, parents before children unless random scan.
    ActivationPattern sweep_activations(SamplerState s, Rng& rng, bool random_scan = false) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<std::size_t> order = prior_.topological_order();
        if (random_scan) std::shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            double prob = activation_probability(i, s);
            s.delta.set(i, unif(rng) < prob);
        }
        return s.delta;
    }

    /// Starting point: delta from the prior, ridge coefficients, residual variance.
    SamplerState initial_state(Rng& rng) const {
        SamplerState s;
        s.delta = prior_.sample(rng);
        Eigen::MatrixXd a = xtx_;
        a.diagonal() *= 1.0 + 1e-8;
        a.diagonal().array() += 1e-12;
        ScaledCholesky chol(a);
        s.beta = chol.ok() ? chol.solve(xty_) : Eigen::VectorXd::Zero(xty_.size());
        double rss = residual_sum_of_squares(s.beta);
        s.sigma2 = rss > 0 ? rss / static_cast<double>(design_.rows()) : 1.0;
        if (!(s.sigma2 > 0) || !std::isfinite(s.sigma2)) s.sigma2 = 1.0;
        return s;
    }

    ChainOutput run(const ChainConfig& cfg) const {
        cfg.check();
        Rng rng(cfg.seed);
        ChainOutput out;
        out.config = cfg;
        out.deltas.reserve(cfg.recorded());
        SamplerState s = initial_state(rng);
        for (std::size_t t = 1; t <= cfg.iterations; ++t) {
            try {
                s.beta = draw_coefficients(s, rng);
                s.sigma2 = draw_noise_variance(s, rng);
                s.delta = sweep_activations(s, rng, cfg.random_scan);
            } catch (const Error& e) {
                throw SamplerError("sweep " + std::to_string(t) + ": " + e.what());
            }
            if (prior_.log_prior(s.delta) == neg_inf)
                throw SamplerError("sweep " + std::to_string(t) + ": chain entered a zero-mass pattern " + s.delta.key());
            if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0) {
                out.deltas.push_back(s.delta);
                out.sigma2s.push_back(s.sigma2);
                if (cfg.record_coefficients) out.betas.push_back(s.beta);
            }
        }
        return out;
    }

private:
    const DesignMatrix& design_;
    const Eigen::VectorXd& y_;
    const Prior& prior_;
    SpikeSlabScales scales_;
    NoiseVariancePrior noise_;
    Eigen::MatrixXd xtx_;
    Eigen::VectorXd xty_;
};

inline ChainOutput run_chain(const ChainConfig& cfg, const DesignMatrix& design, const Eigen::VectorXd& response,
                             const Prior& prior, const SpikeSlabScales& scales, const NoiseVariancePrior& noise) {
    return SsvsSampler(design, response, prior, scales, noise).run(cfg);
}

inline ChainOutput run_chain(const ChainConfig& cfg, const Dataset& data, const TermSet& terms, const Prior& prior,
                             const SpikeSlabScales& scales, const NoiseVariancePrior& noise) {
    auto design = build_design(data, terms);
    return run_chain(cfg, design, data.response, prior, scales, noise);
}

/// Lag-1 autocorrelation of a series; 0 for constant series.
inline double lag1_autocorrelation(const std::vector<double>& x) {
    if (x.size() < 3) return 0.0;
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double num = 0, den = 0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - mean) * (x[t] - mean);
        if (t + 1 < x.size()) num += (x[t] - mean) * (x[t + 1] - mean);
    }
    return den > 0 ? num / den : 0.0;
}

}  // namespace ssvs
