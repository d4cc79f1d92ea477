#ifndef LESC_TLRR_HPP
#define LESC_TLRR_HPP

#include <cstddef>
#include <functional>

#include "lesc/prox.hpp"
#include "lesc/subspace.hpp"
#include "lesc/tensor_ops.hpp"
#include "lesc/types.hpp"

namespace lesc {

/// ALM settings for the two-view tensor problem
///   min ||C||_tnn + lambda2 ||E||_{2,1}
///   s.t. X = X C1 + E1, Gamma = Gamma C2 + E2,
/// where C stacks (C1, C2) as an n x n x 2 tensor. mu penalizes the two
/// data constraints, rho the coupling C = G.
struct TlrrConfig {
    double lambda2 = 0.1;
    double mu0 = 1e-4;
    double mu_max = 1e6;
    double rho0 = 1e-4;
    double rho_max = 1e6;
    double scale = 1.1; ///< both penalties grow as p <- min(scale * p, p_max)
    double tol = 1e-6;
    std::size_t max_iter = 500;

    void validate() const {
        if (!(lambda2 > 0.0)) throw ArgumentError("tlrr: lambda2 must be > 0");
        if (!(mu0 > 0.0) || mu0 > mu_max) throw ArgumentError("tlrr: need 0 < mu0 <= mu_max");
        if (!(rho0 > 0.0) || rho0 > rho_max) throw ArgumentError("tlrr: need 0 < rho0 <= rho_max");
        if (!(scale > 1.0)) throw ArgumentError("tlrr: scale must be > 1");
        if (!(tol > 0.0)) throw ArgumentError("tlrr: tol must be > 0");
        if (max_iter < 1) throw ArgumentError("tlrr: max_iter must be >= 1");
    }
};

struct TlrrSolution {
    Matrix C1;    ///< feature-view representation
    Matrix C2;    ///< label-view representation
    Matrix C_hat; ///< (C1 + C2) / 2
    Matrix E1;    ///< q x n
    Matrix E2;    ///< o x n
    SolverTrace trace;
    Matrix basis;        ///< n x r orthonormal; C_hat ~= basis * coefficients
    Matrix coefficients; ///< (z1 + z2) / 2, r x n
};

/// Full-coordinate ALM state at the end of an iteration; mu and rho are the
/// penalties that iteration used.
struct TlrrIterate {
    std::size_t iteration;
    double mu;
    double rho;
    const Matrix& C1;
    const Matrix& C2;
    const Matrix& G1;
    const Matrix& G2;
    const Matrix& W1;
    const Matrix& W2;
    const Matrix& E1;
    const Matrix& E2;
    const Matrix& Y1;
    const Matrix& Y2;
};

using TlrrObserver = std::function<void(const TlrrIterate&)>;

/// Per iteration: G (tubal shrink with threshold n3/rho = 2/rho), C1 and C2
/// (SPD solves), E (column shrink of the stacked (q+o) x n residual),
/// multipliers, then mu and rho.
inline TlrrSolution solve_tensor_lrr(const Matrix& X, const Matrix& Gamma, const TlrrConfig& cfg,
                                     const TlrrObserver& observer = {}) {
    cfg.validate();
    require_finite(X, "tlrr: X");
    require_finite(Gamma, "tlrr: Gamma");
    const Eigen::Index q = X.rows();
    const Eigen::Index o = Gamma.rows();
    const Eigen::Index n = X.cols();
    if (Gamma.cols() != n) throw ArgumentError("tlrr: X and Gamma disagree on instance count");
    if (n < 2) throw ArgumentError("tlrr: need at least 2 instances");
    if (Gamma.cwiseAbs().maxCoeff() == 0.0) throw ArgumentError("tlrr: Gamma is all zero");

    const Matrix basis = detail::instance_space_basis({&X, &Gamma});
    const Eigen::Index r = basis.cols();
    const Matrix xb = X * basis;
    const Matrix gb = Gamma * basis;
    const Matrix xgram = xb.transpose() * xb;
    const Matrix ggram = gb.transpose() * gb;
    const Matrix xbt_x = xb.transpose() * X;
    const Matrix gbt_g = gb.transpose() * Gamma;
    const Matrix eye = Matrix::Identity(r, r);
    constexpr double n3 = 2.0;

    Matrix z1 = Matrix::Zero(r, n), z2 = Matrix::Zero(r, n);
    Matrix g1 = Matrix::Zero(r, n), g2 = Matrix::Zero(r, n);
    Matrix w1 = Matrix::Zero(r, n), w2 = Matrix::Zero(r, n);
    Matrix E1 = Matrix::Zero(q, n), E2 = Matrix::Zero(o, n);
    Matrix Y1 = Matrix::Zero(q, n), Y2 = Matrix::Zero(o, n);

    Eigen::LLT<Matrix> chol1, chol2;
    double factored_ratio = -1.0;

    TlrrSolution sol;
    double mu = cfg.mu0;
    double rho = cfg.rho0;
    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        {
            const Tensor3 shrunk = tubal_shrink(Tensor3({z1 + w1 / rho, z2 + w2 / rho}), n3 / rho);
            g1 = shrunk.slice(0);
            g2 = shrunk.slice(1);
        }

        const double ratio = mu / rho;
        if (ratio != factored_ratio) {
            chol1.compute(ratio * xgram + eye);
            chol2.compute(ratio * ggram + eye);
            if (chol1.info() != Eigen::Success || chol2.info() != Eigen::Success) {
                throw NumericalError("tlrr: C-update system is not SPD", it);
            }
            factored_ratio = ratio;
        }
        z1 = chol1.solve(g1 + (mu * xbt_x - mu * (xb.transpose() * E1) + xb.transpose() * Y1 - w1) / rho);
        z2 = chol2.solve(g2 + (mu * gbt_g - mu * (gb.transpose() * E2) + gb.transpose() * Y2 - w2) / rho);

        const Matrix xc = xb * z1;
        const Matrix gc = gb * z2;
        {
            Matrix stacked(q + o, n);
            stacked.topRows(q) = X - xc + Y1 / mu;
            stacked.bottomRows(o) = Gamma - gc + Y2 / mu;
            const Matrix shrunk = l21_shrink(stacked, cfg.lambda2 / mu);
            E1 = shrunk.topRows(q);
            E2 = shrunk.bottomRows(o);
        }

        const Matrix r1 = X - xc - E1;
        const Matrix r2 = Gamma - gc - E2;
        const Matrix d1 = z1 - g1;
        const Matrix d2 = z2 - g2;
        Y1 += mu * r1;
        Y2 += mu * r2;
        w1 += rho * d1;
        w2 += rho * d2;

        const double residual = std::max({detail::max_abs(r1), detail::max_abs(r2),
                                          detail::expanded_max_abs(basis, d1),
                                          detail::expanded_max_abs(basis, d2)});
        sol.trace.residuals.push_back(residual);
        sol.trace.penalties.push_back(mu);
        sol.trace.iterations = it;

        if (observer) {
            const Matrix C1 = basis * z1, C2 = basis * z2;
            const Matrix G1 = basis * g1, G2 = basis * g2;
            const Matrix W1 = basis * w1, W2 = basis * w2;
            observer(TlrrIterate{it, mu, rho, C1, C2, G1, G2, W1, W2, E1, E2, Y1, Y2});
        }

        mu = std::min(cfg.scale * mu, cfg.mu_max);
        rho = std::min(cfg.scale * rho, cfg.rho_max);
        if (residual <= cfg.tol) {
            sol.trace.converged = true;
            break;
        }
    }

    sol.C1 = basis * z1;
    sol.C2 = basis * z2;
    sol.C_hat = (sol.C1 + sol.C2) / 2.0;
    sol.E1 = std::move(E1);
    sol.E2 = std::move(E2);
    sol.basis = basis;
    sol.coefficients = (z1 + z2) / 2.0;
    return sol;
}

} // namespace lesc

#endif // LESC_TLRR_HPP
