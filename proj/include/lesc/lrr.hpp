#ifndef LESC_LRR_HPP
#define LESC_LRR_HPP

#include <cstddef>
#include <functional>

#include "lesc/prox.hpp"
#include "lesc/subspace.hpp"
#include "lesc/types.hpp"

namespace lesc {

/// Inexact ALM settings for min ||C||_* + lambda2 ||E||_{2,1} s.t. X = XC + E.
struct LrrConfig {
    double lambda2 = 0.1;
    double mu0 = 1e-4;
    double mu_max = 1e6;
    double rho_scale = 1.1; ///< mu <- min(rho_scale * mu, mu_max)
    double tol = 1e-6;
    std::size_t max_iter = 500;

    void validate() const {
        if (!(lambda2 > 0.0)) throw ArgumentError("lrr: lambda2 must be > 0");
        if (!(mu0 > 0.0) || !(mu_max > 0.0) || mu0 > mu_max) throw ArgumentError("lrr: need 0 < mu0 <= mu_max");
        if (!(rho_scale > 1.0)) throw ArgumentError("lrr: rho_scale must be > 1");
        if (!(tol > 0.0)) throw ArgumentError("lrr: tol must be > 0");
        if (max_iter < 1) throw ArgumentError("lrr: max_iter must be >= 1");
    }
};

struct LrrSolution {
    Matrix C; ///< n x n low-rank representation
    Matrix E; ///< q x n sample-specific corruption
    SolverTrace trace;
    Matrix basis;        ///< n x r orthonormal; C = basis * coefficients
    Matrix coefficients; ///< r x n
};

/// Full-coordinate view of the ALM state at the end of one iteration (after
/// the multiplier update). `mu` is the penalty the iteration used.
struct LrrIterate {
    std::size_t iteration;
    double mu;
    const Matrix& J;
    const Matrix& C;
    const Matrix& E;
    const Matrix& Y1;
    const Matrix& Y2;
};

using LrrObserver = std::function<void(const LrrIterate&)>;

/// Subproblem order per iteration: J (SVT), C (SPD solve), E (L2,1 shrink),
/// multipliers, mu. Starts from all-zero iterates. Returns with
/// trace.converged == false if max_iter is reached first.
inline LrrSolution solve_lrr(const Matrix& X, const LrrConfig& cfg, const LrrObserver& observer = {}) {
    cfg.validate();
    require_finite(X, "lrr: X");
    const Eigen::Index q = X.rows();
    const Eigen::Index n = X.cols();
    if (n < 2) throw ArgumentError("lrr: need at least 2 instances");
    if (X.cwiseAbs().maxCoeff() == 0.0) throw ArgumentError("lrr: X is all zero");

    const Matrix basis = detail::instance_space_basis({&X});
    const Eigen::Index r = basis.cols();
    const Matrix xb = X * basis;                 // q x r
    const Matrix xbt_x = xb.transpose() * X;     // B^T X^T X, r x n
    // T_CA / mu = I + X^T X restricted to the basis.
    const Matrix gram = Matrix::Identity(r, r) + xb.transpose() * xb;
    const Eigen::LLT<Matrix> chol(gram);
    if (chol.info() != Eigen::Success) throw NumericalError("lrr: I + X^T X is not SPD", 0);

    Matrix z = Matrix::Zero(r, n);
    Matrix jz = Matrix::Zero(r, n);
    Matrix y2z = Matrix::Zero(r, n);
    Matrix E = Matrix::Zero(q, n);
    Matrix Y1 = Matrix::Zero(q, n);

    LrrSolution sol;
    double mu = cfg.mu0;
    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        jz = svt(z + y2z / mu, 1.0 / mu);

        const Matrix rhs = jz - y2z / mu + (xb.transpose() * Y1) / mu + xbt_x - xb.transpose() * E;
        z = chol.solve(rhs);

        const Matrix xc = xb * z;
        E = l21_shrink(X - xc + Y1 / mu, cfg.lambda2 / mu);

        const Matrix r1 = X - xc - E;
        const Matrix r2z = z - jz;
        Y1 += mu * r1;
        y2z += mu * r2z;

        const double residual = std::max(detail::max_abs(r1), detail::expanded_max_abs(basis, r2z));
        sol.trace.residuals.push_back(residual);
        sol.trace.penalties.push_back(mu);
        sol.trace.iterations = it;

        if (observer) {
            const Matrix J = basis * jz;
            const Matrix C = basis * z;
            const Matrix Y2 = basis * y2z;
            observer(LrrIterate{it, mu, J, C, E, Y1, Y2});
        }

        mu = std::min(cfg.rho_scale * mu, cfg.mu_max);
        if (residual <= cfg.tol) {
            sol.trace.converged = true;
            break;
        }
    }

    sol.C = basis * z;
    sol.E = std::move(E);
    sol.basis = basis;
    sol.coefficients = std::move(z);
    return sol;
}

/// ||C||_* + lambda2 ||E||_{2,1}
inline double lrr_objective(const Matrix& C, const Matrix& E, double lambda2) {
    return nuclear_norm(C) + lambda2 * l21_norm(E);
}

} // namespace lesc

#endif // LESC_LRR_HPP
