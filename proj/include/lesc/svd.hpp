#ifndef LESC_SVD_HPP
#define LESC_SVD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "lesc/errors.hpp"

namespace lesc {

struct SvdOptions {
    std::size_t max_sweeps = 80;
};

/// Thin SVD A = U * diag(S) * V^H with k = min(m, n) columns in U and V.
/// S is non-negative and sorted in descending order.
template <typename Scalar>
struct SvdResult {
    using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    MatrixType U;
    Eigen::VectorXd S;
    MatrixType V;
    std::size_t sweeps = 0;
};

namespace detail {

template <typename Scalar>
double abs2(const Scalar& x) {
    return std::norm(std::complex<double>(x));
}

// Fills columns of q with unit norm < 0.5 (zero) so that all columns are
// orthonormal, using Gram-Schmidt against canonical basis vectors.
template <typename MatrixType>
void complete_orthonormal(MatrixType& q, const std::vector<bool>& filled) {
    using Scalar = typename MatrixType::Scalar;
    const Eigen::Index m = q.rows();
    Eigen::Index candidate = 0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        if (filled[static_cast<std::size_t>(j)]) continue;
        while (candidate < m) {
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(m);
            v(candidate++) = Scalar(1);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index k = 0; k < q.cols(); ++k) {
                    if (k == j || (!filled[static_cast<std::size_t>(k)] && k > j)) continue;
                    v -= q.col(k).dot(v) * q.col(k);
                }
            }
            const double nv = v.norm();
            if (nv > 1e-6) {
                q.col(j) = v / nv;
                break;
            }
        }
    }
}

// One-sided Jacobi on the columns of work (m >= n). On return the columns of
// work are mutually orthogonal and work = A * v.
template <typename MatrixType>
std::size_t hestenes_sweeps(MatrixType& work, MatrixType& v, std::size_t max_sweeps) {
    using Scalar = typename MatrixType::Scalar;
    using std::abs;
    using std::sqrt;
    const Eigen::Index n = work.cols();
    const double eps = std::numeric_limits<double>::epsilon();
    const double tol = eps * static_cast<double>(std::max<Eigen::Index>(work.rows(), 1));
    // Columns at rounding level relative to ||A|| are treated as zero;
    // rotating pure noise against itself never settles.
    const double floor = eps * eps * work.squaredNorm();

    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = work.col(p).squaredNorm();
                const double beta = work.col(q).squaredNorm();
                if (alpha <= floor || beta <= floor) continue;
                const Scalar gamma = work.col(p).dot(work.col(q));
                const double gabs = abs(gamma);
                if (gabs <= tol * sqrt(alpha * beta)) continue;
                rotated = true;

                const Scalar phase = gamma / gabs;
                const double zeta = (beta - alpha) / (2.0 * gabs);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (abs(zeta) + sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / sqrt(1.0 + t * t);
                const double s = c * t;

                auto rotate = [&](MatrixType& m) {
                    for (Eigen::Index i = 0; i < m.rows(); ++i) {
                        const Scalar up = m(i, p);
                        const Scalar uq = m(i, q);
                        m(i, p) = c * up - s * Eigen::numext::conj(phase) * uq;
                        m(i, q) = s * phase * up + c * uq;
                    }
                };
                rotate(work);
                rotate(v);
            }
        }
        if (!rotated) return sweep;
    }
    throw NumericalError("one-sided Jacobi SVD did not converge", max_sweeps);
}

template <typename MatrixType>
SvdResult<typename MatrixType::Scalar> svd_tall(const MatrixType& a, const SvdOptions& opts) {
    using Scalar = typename MatrixType::Scalar;
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();

    MatrixType work = a;
    MatrixType v = MatrixType::Identity(n, n);
    const std::size_t sweeps = n > 1 ? hestenes_sweeps(work, v, opts.max_sweeps) : 1;

    const double negligible = std::numeric_limits<double>::epsilon() * work.norm();
    Eigen::VectorXd norms(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        norms(j) = work.col(j).norm();
        if (norms(j) <= negligible) norms(j) = 0.0;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return norms(i) > norms(j); });

    SvdResult<Scalar> out;
    out.U = MatrixType::Zero(m, n);
    out.V.resize(n, n);
    out.S.resize(n);
    out.sweeps = sweeps;
    std::vector<bool> filled(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index j = order[static_cast<std::size_t>(k)];
        out.S(k) = norms(j);
        out.V.col(k) = v.col(j);
        if (norms(j) > 0.0) {
            out.U.col(k) = work.col(j) / norms(j);
            filled[static_cast<std::size_t>(k)] = true;
        }
    }
    if (std::find(filled.begin(), filled.end(), false) != filled.end()) {
        complete_orthonormal(out.U, filled);
    }
    return out;
}

} // namespace detail

/// Thin singular value decomposition by one-sided Jacobi rotations.
/// Throws NumericalError (carrying the sweep count) if the rotations do not
/// settle within opts.max_sweeps sweeps.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a, const SvdOptions& opts = {}) {
    using Scalar = typename Derived::Scalar;
    using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (!a.allFinite()) {
        throw ArgumentError("svd: matrix contains non-finite entries");
    }
    if (a.rows() >= a.cols()) {
        return detail::svd_tall(MatrixType(a), opts);
    }
    // A^H = V S U^H
    auto t = detail::svd_tall(MatrixType(a.adjoint()), opts);
    std::swap(t.U, t.V);
    return t;
}

} // namespace lesc

#endif // LESC_SVD_HPP
