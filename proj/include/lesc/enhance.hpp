#ifndef LESC_ENHANCE_HPP
#define LESC_ENHANCE_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lesc/kernel.hpp"
#include "lesc/lbfgs.hpp"
#include "lesc/lrr.hpp"
#include "lesc/tlrr.hpp"
#include "lesc/types.hpp"

namespace lesc {

struct LeConfig {
    double lambda1 = 1.0;
    KernelConfig kernel;
    LbfgsConfig lbfgs;

    void validate() const {
        if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) throw ArgumentError("le: lambda1 must be >= 0");
        kernel.validate();
        lbfgs.validate();
    }
};

/// Linear map on kernelized features: scores = weights * K (o x n).
struct Theta {
    Matrix weights;
};

/// C_hat = left * right with left n x r and right r x n.
struct LowRankCorrelations {
    Matrix left;
    Matrix right;

    [[nodiscard]] Matrix dense() const { return left * right; }
};

/// The recovery objective
///   ||theta K - Gamma||_F^2 + lambda1 ||theta K (I - C_hat)||_F^2,
/// evaluated on pre-softmax scores.
class LeProblem {
public:
    LeProblem(Matrix K, Matrix Gamma, const Matrix& C_hat, double lambda1)
        : K_(std::move(K)), gamma_(std::move(Gamma)), lambda1_(lambda1) {
        const Eigen::Index n = K_.cols();
        if (K_.rows() != n) throw ArgumentError("le: K must be square");
        require_shape(gamma_, gamma_.rows(), n, "le: Gamma");
        require_shape(C_hat, n, n, "le: C_hat");
        if (!(lambda1 >= 0.0)) throw ArgumentError("le: lambda1 must be >= 0");
        complement_ = Matrix::Identity(n, n) - C_hat;
    }

    /// Same objective with C_hat kept factored; products with I - C_hat cost O(n r).
    LeProblem(Matrix K, Matrix Gamma, const LowRankCorrelations& C_hat, double lambda1)
        : K_(std::move(K)), gamma_(std::move(Gamma)), lambda1_(lambda1), factored_(true) {
        const Eigen::Index n = K_.cols();
        if (K_.rows() != n) throw ArgumentError("le: K must be square");
        require_shape(gamma_, gamma_.rows(), n, "le: Gamma");
        if (C_hat.left.rows() != n || C_hat.right.cols() != n || C_hat.left.cols() != C_hat.right.rows()) {
            throw ArgumentError("le: factored C_hat has inconsistent shape");
        }
        if (!(lambda1 >= 0.0)) throw ArgumentError("le: lambda1 must be >= 0");
        left_ = C_hat.left;
        right_ = C_hat.right;
    }

    [[nodiscard]] Eigen::Index labels() const { return gamma_.rows(); }
    [[nodiscard]] Eigen::Index instances() const { return gamma_.cols(); }
    [[nodiscard]] const Matrix& kernel() const { return K_; }

    [[nodiscard]] double objective(const Matrix& theta) const {
        check(theta);
        const Matrix s = theta * K_;
        const double fit = (s - gamma_).squaredNorm();
        return fit + lambda1_ * times_complement(s).squaredNorm();
    }

    [[nodiscard]] Matrix gradient(const Matrix& theta) const {
        Matrix g;
        evaluate(theta, g);
        return g;
    }

    /// Objective and gradient 2 (theta K - Gamma) K + 2 lambda1 theta K M K
    /// with M = (I - C_hat)(I - C_hat)^T. Requires K symmetric.
    double evaluate(const Matrix& theta, Matrix& grad) const {
        check(theta);
        const Matrix s = theta * K_;
        const Matrix resid = s - gamma_;
        const Matrix reg = times_complement(s);
        const double value = resid.squaredNorm() + lambda1_ * reg.squaredNorm();
        grad.noalias() = (2.0 * (resid + lambda1_ * times_complement_transpose(reg))) * K_;
        return value;
    }

private:
    void check(const Matrix& theta) const {
        require_shape(theta, gamma_.rows(), gamma_.cols(), "le: theta");
    }

    [[nodiscard]] Matrix times_complement(const Matrix& s) const {
        if (!factored_) return s * complement_;
        return s - (s * left_) * right_;
    }

    [[nodiscard]] Matrix times_complement_transpose(const Matrix& s) const {
        if (!factored_) return s * complement_.transpose();
        return s - (s * right_.transpose()) * left_.transpose();
    }

    Matrix K_;
    Matrix gamma_;
    double lambda1_;
    bool factored_ = false;
    Matrix complement_;
    Matrix left_, right_;
};

inline double le_objective(const Theta& theta, const Matrix& K, const Matrix& Gamma, const Matrix& C_hat,
                           double lambda1) {
    return LeProblem(K, Gamma, C_hat, lambda1).objective(theta.weights);
}

inline Matrix le_gradient(const Theta& theta, const Matrix& K, const Matrix& Gamma, const Matrix& C_hat,
                          double lambda1) {
    return LeProblem(K, Gamma, C_hat, lambda1).gradient(theta.weights);
}

/// Minimizes the problem from theta0 with L-BFGS.
inline LbfgsResult minimize_theta(const LeProblem& problem, const Theta& theta0, const LbfgsConfig& cfg) {
    const Eigen::Index o = problem.labels();
    const Eigen::Index n = problem.instances();
    require_shape(theta0.weights, o, n, "le: theta0");
    Matrix grad(o, n);
    auto fg = [&](const Vector& x, Vector& g) {
        const Eigen::Map<const Matrix> theta(x.data(), o, n);
        const double v = problem.evaluate(theta, grad);
        g = Eigen::Map<const Vector>(grad.data(), grad.size());
        return v;
    };
    return lbfgs_minimize(fg, Eigen::Map<const Vector>(theta0.weights.data(), theta0.weights.size()), cfg);
}

/// Column-wise softmax.
inline Matrix softmax_columns(const Matrix& scores) {
    Matrix out(scores.rows(), scores.cols());
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
        const double top = scores.col(j).maxCoeff();
        out.col(j) = (scores.col(j).array() - top).exp().matrix();
        out.col(j) /= out.col(j).sum();
    }
    return out;
}

inline Matrix recover_distributions(const Theta& theta, const Matrix& K) {
    if (theta.weights.cols() != K.rows()) throw ArgumentError("recover_distributions: theta/K shape mismatch");
    return softmax_columns(theta.weights * K);
}

struct EnhanceResult {
    Matrix distributions;        ///< o x n, columns sum to one
    Matrix correlations;         ///< the C_hat that regularized the fit
    SolverTrace solver_trace;    ///< empty for methods without an ALM stage
    double sigma = 0.0;
    std::size_t lbfgs_iterations = 0;
    std::size_t lbfgs_evaluations = 0;
    LbfgsStatus lbfgs_status = LbfgsStatus::max_iterations;
    double final_objective = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] bool degraded() const {
        return (!solver_trace.residuals.empty() && !solver_trace.converged) ||
               lbfgs_status == LbfgsStatus::line_search_failed;
    }
};

inline void require_logical(const Matrix& Gamma) {
    for (Eigen::Index j = 0; j < Gamma.cols(); ++j) {
        bool any = false;
        for (Eigen::Index i = 0; i < Gamma.rows(); ++i) {
            const double v = Gamma(i, j);
            if (v != 0.0 && v != 1.0) throw ArgumentError("logical labels must be 0 or 1");
            any = any || v == 1.0;
        }
        if (!any) throw ArgumentError("instance " + std::to_string(j) + " has no relevant label");
    }
}

namespace detail {

template <typename Correlations>
EnhanceResult enhance_impl(const Matrix& X, const Matrix& Gamma, const Correlations& C_hat, const LeConfig& cfg) {
    cfg.validate();
    require_finite(X, "enhance: X");
    if (Gamma.cols() != X.cols()) throw ArgumentError("enhance: X and Gamma disagree on instance count");
    require_logical(Gamma);

    EnhanceResult out;
    out.sigma = resolve_sigma(cfg.kernel, X);
    LeProblem problem(gaussian_gram(X, out.sigma), Gamma, C_hat, cfg.lambda1);
    const Theta theta0{Matrix::Zero(Gamma.rows(), Gamma.cols())};
    const auto fit = minimize_theta(problem, theta0, cfg.lbfgs);
    const Theta theta{Eigen::Map<const Matrix>(fit.x.data(), Gamma.rows(), Gamma.cols())};
    out.distributions = recover_distributions(theta, problem.kernel());
    out.lbfgs_iterations = fit.iterations;
    out.lbfgs_evaluations = fit.evaluations;
    out.lbfgs_status = fit.status;
    out.final_objective = fit.objective;
    if (fit.status == LbfgsStatus::line_search_failed) out.warnings.emplace_back("L-BFGS line search failed");
    return out;
}

} // namespace detail

/// Kernel fit regularized by a given correlation matrix, then softmax.
inline EnhanceResult enhance_with_correlations(const Matrix& X, const Matrix& Gamma, const Matrix& C_hat,
                                               const LeConfig& cfg) {
    auto out = detail::enhance_impl(X, Gamma, C_hat, cfg);
    out.correlations = C_hat;
    return out;
}

inline EnhanceResult enhance_with_correlations(const Matrix& X, const Matrix& Gamma,
                                               const LowRankCorrelations& C_hat, const LeConfig& cfg) {
    auto out = detail::enhance_impl(X, Gamma, C_hat, cfg);
    out.correlations = C_hat.dense();
    return out;
}

inline EnhanceResult enhance_lesc(const LrrSolution& sol, const Matrix& X, const Matrix& Gamma, const LeConfig& le) {
    auto out = enhance_with_correlations(X, Gamma, LowRankCorrelations{sol.basis, sol.coefficients}, le);
    out.correlations = sol.C;
    out.solver_trace = sol.trace;
    if (!out.solver_trace.converged) out.warnings.emplace_back("low-rank representation did not converge");
    return out;
}

/// Feature-space low-rank correlations (LESC).
inline EnhanceResult enhance_lesc(const Matrix& X, const Matrix& Gamma, const LrrConfig& lrr, const LeConfig& le) {
    return enhance_lesc(solve_lrr(X, lrr), X, Gamma, le);
}

inline EnhanceResult enhance_glesc(const TlrrSolution& sol, const Matrix& X, const Matrix& Gamma,
                                   const LeConfig& le) {
    auto out = enhance_with_correlations(X, Gamma, LowRankCorrelations{sol.basis, sol.coefficients}, le);
    out.correlations = sol.C_hat;
    out.solver_trace = sol.trace;
    if (!out.solver_trace.converged) out.warnings.emplace_back("tensor low-rank representation did not converge");
    return out;
}

/// Joint feature/label tensor low-rank correlations (gLESC).
inline EnhanceResult enhance_glesc(const Matrix& X, const Matrix& Gamma, const TlrrConfig& tlrr,
                                   const LeConfig& le) {
    return enhance_glesc(solve_tensor_lrr(X, Gamma, tlrr), X, Gamma, le);
}

/// Label propagation over a fully connected Gaussian graph (zero diagonal):
/// D* = (1 - alpha)(I - alpha P)^{-1} Gamma with P = Q~^{-1/2} Q Q~^{-1/2},
/// softmax-normalized per instance.
inline Matrix baseline_lp(const Matrix& X, const Matrix& Gamma, double alpha, double sigma = 1.0,
                          std::vector<std::string>* warnings = nullptr) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("lp: alpha must lie in (0, 1)");
    if (Gamma.cols() != X.cols()) throw ArgumentError("lp: X and Gamma disagree on instance count");
    Matrix Q = gaussian_gram(X, sigma);
    Q.diagonal().setZero();
    Vector deg = Q.rowwise().sum();
    for (Eigen::Index i = 0; i < deg.size(); ++i) {
        if (deg(i) <= 0.0) {
            deg(i) = std::numeric_limits<double>::epsilon();
            if (warnings) warnings->push_back("lp: instance " + std::to_string(i) + " is isolated; degree clamped");
        }
    }
    const Vector inv_sqrt = deg.cwiseSqrt().cwiseInverse();
    const Matrix system = Matrix::Identity(Q.rows(), Q.cols()) - alpha * (inv_sqrt.asDiagonal() * Q * inv_sqrt.asDiagonal());
    const Eigen::LLT<Matrix> chol(system);
    if (chol.info() != Eigen::Success) throw NumericalError("lp: I - alpha P is not SPD", 0);
    const Matrix propagated = (1.0 - alpha) * chol.solve(Gamma.transpose()).transpose();
    return softmax_columns(propagated);
}

} // namespace lesc

#endif // LESC_ENHANCE_HPP
