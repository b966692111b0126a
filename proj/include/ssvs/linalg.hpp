#pragma once
//! Dense linear-algebra helpers shared by the sampler, the oracle and the
//! fit metrics. Raw polynomial columns can differ in scale by many orders of
//! magnitude, so every factorization here works on a Jacobi-scaled system.

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "ssvs/error.hpp"

namespace ssvs {

/// Cholesky factorization of S^-1 A S^-1 with S = sqrt(diag(A)).
class ScaledCholesky {
public:
    ScaledCholesky() = default;
    explicit ScaledCholesky(const Eigen::MatrixXd& a) { compute(a); }

    bool compute(const Eigen::MatrixXd& a) {
        ok_ = false;
        if ((a.diagonal().array() <= 0).any() || !a.allFinite()) return false;
        inv_scale_ = a.diagonal().cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd b = inv_scale_.asDiagonal() * a * inv_scale_.asDiagonal();
        llt_.compute(b);
        ok_ = llt_.info() == Eigen::Success;
        return ok_;
    }

    bool ok() const { return ok_; }

    double log_det() const {
        const auto& l = llt_.matrixL();
        double s = 0;
        for (Eigen::Index i = 0; i < inv_scale_.size(); ++i)
            s += 2.0 * std::log(l(i, i)) - 2.0 * std::log(inv_scale_[i]);
        return s;
    }

    /// A^-1 b.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd t = inv_scale_.cwiseProduct(b);
        t = llt_.solve(t);
        return inv_scale_.cwiseProduct(t);
    }

    /// For z ~ N(0, I), the result has covariance A^-1.
    Eigen::VectorXd inverse_root_times(const Eigen::VectorXd& z) const {
        Eigen::VectorXd t = llt_.matrixU().solve(z);
        return inv_scale_.cwiseProduct(t);
    }

    /// Diagonal of A^-1.
    Eigen::VectorXd inverse_diagonal() const {
        const auto q = inv_scale_.size();
        Eigen::MatrixXd inv = llt_.solve(Eigen::MatrixXd::Identity(q, q));
        return inv.diagonal().cwiseProduct(Eigen::VectorXd(inv_scale_.cwiseAbs2()));
    }

private:
    Eigen::VectorXd inv_scale_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    bool ok_ = false;
};

struct LeastSquaresFit {
    Eigen::VectorXd coef;
    double rss = 0;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
};

/// Minimum-norm least squares (on scaled columns) with rank detection.
inline LeastSquaresFit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     double rank_tol = 1e-10) {
    LeastSquaresFit fit;
    const auto q = x.cols();
    if (q == 0) {
        fit.coef.resize(0);
        fit.rss = y.squaredNorm();
        return fit;
    }
    Eigen::ArrayXd norms = x.colwise().norm().transpose().array();
    Eigen::ArrayXd scale = (norms > 0).select(norms.inverse(), 1.0);
    Eigen::MatrixXd xs = x * scale.matrix().asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(rank_tol);
    cod.compute(xs);
    Eigen::VectorXd cs = cod.solve(y);
    fit.coef = scale.matrix().cwiseProduct(cs);
    fit.rank = cod.rank();
    fit.rank_deficient = fit.rank < q;
    fit.rss = (y - xs * cs).squaredNorm();
    return fit;
}

/// Standard errors of the full least-squares coefficients,
/// sigma_hat * sqrt(diag((X'X)^-1)) with sigma_hat^2 = RSS / (n - q).
/// With `unscaled` the sigma_hat factor is dropped.
inline Eigen::VectorXd coefficient_standard_errors(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                   bool unscaled = false) {
    const auto n = x.rows(), q = x.cols();
    if (n <= q) throw Error("standard errors need more rows than columns");
    auto fit = least_squares(x, y);
    if (fit.rank_deficient) throw Error("standard errors need a full-rank design");
    double sigma2 = unscaled ? 1.0 : fit.rss / static_cast<double>(n - q);
    ScaledCholesky chol(x.transpose() * x);
    if (!chol.ok()) throw Error("X'X is not positive definite");
    return (sigma2 * chol.inverse_diagonal().array()).sqrt().matrix();
}

}  // namespace ssvs
