#ifndef LESC_PROX_HPP
#define LESC_PROX_HPP

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "lesc/errors.hpp"
#include "lesc/svd.hpp"
#include "lesc/types.hpp"

namespace lesc {

inline void require_threshold(double tau, const char* what) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw ArgumentError(std::string(what) + ": threshold must be finite and >= 0");
    }
}

/// Singular value thresholding: the proximal map of tau * nuclear norm.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
svt(const Eigen::MatrixBase<Derived>& a, double tau) {
    require_threshold(tau, "svt");
    const auto f = svd(a);
    Eigen::VectorXd shrunk = (f.S.array() - tau).cwiseMax(0.0).matrix();
    Eigen::Index keep = 0;
    while (keep < shrunk.size() && shrunk(keep) > 0.0) ++keep;
    using Scalar = typename Derived::Scalar;
    if (keep == 0) {
        return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(a.rows(), a.cols());
    }
    return f.U.leftCols(keep) * shrunk.head(keep).template cast<Scalar>().asDiagonal() *
           f.V.leftCols(keep).adjoint();
}

template <typename Derived>
double nuclear_norm(const Eigen::MatrixBase<Derived>& a) {
    if (a.size() == 0) return 0.0;
    return svd(a).S.sum();
}

/// Column-wise group shrinkage: the proximal map of tau * ||.||_{2,1}.
inline Matrix l21_shrink(const Matrix& a, double tau) {
    require_threshold(tau, "l21_shrink");
    Matrix out = Matrix::Zero(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double norm = a.col(j).norm();
        if (norm > tau) {
            out.col(j) = ((norm - tau) / norm) * a.col(j);
        }
    }
    return out;
}

/// Sum of column Euclidean norms.
inline double l21_norm(const Matrix& a) {
    return a.colwise().norm().sum();
}

} // namespace lesc

#endif // LESC_PROX_HPP
