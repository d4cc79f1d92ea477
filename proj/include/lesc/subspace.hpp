#ifndef LESC_SUBSPACE_HPP
#define LESC_SUBSPACE_HPP

#include <algorithm>
#include <initializer_list>

#include "lesc/svd.hpp"
#include "lesc/types.hpp"

namespace lesc::detail {

// Orthonormal n x r basis of range([A_1^T, A_2^T, ...]) for matrices whose
// columns are the n instances. Directions with singular value below
// rel_tol * s_max are dropped.
//
// The ALM solvers carry every n x n iterate as B * Z (Z is r x n): all of
// them have their column range in this subspace, which is invariant under
// A_i^T A_i and preserved by singular value thresholding, so the reduced
// iteration is exact.
inline Matrix instance_space_basis(std::initializer_list<const Matrix*> views, double rel_tol = 1e-12) {
    Eigen::Index n = -1;
    Eigen::Index width = 0;
    for (const Matrix* v : views) {
        if (n < 0) n = v->cols();
        if (v->cols() != n) throw ArgumentError("instance_space_basis: views disagree on instance count");
        width += v->rows();
    }
    Matrix stacked(n, width);
    Eigen::Index at = 0;
    for (const Matrix* v : views) {
        stacked.middleCols(at, v->rows()) = v->transpose();
        at += v->rows();
    }
    const auto f = svd(stacked);
    if (f.S.size() == 0 || f.S(0) == 0.0) {
        throw ArgumentError("instance_space_basis: all views are zero");
    }
    Eigen::Index rank = 0;
    while (rank < f.S.size() && f.S(rank) > rel_tol * f.S(0)) ++rank;
    return f.U.leftCols(rank);
}

inline double max_abs(const Matrix& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

// max |(B * z)_{ij}| without keeping the expanded matrix around.
inline double expanded_max_abs(const Matrix& basis, const Matrix& z) {
    double m = 0.0;
    constexpr Eigen::Index block = 256;
    for (Eigen::Index c = 0; c < z.cols(); c += block) {
        const Eigen::Index w = std::min(block, z.cols() - c);
        m = std::max(m, max_abs(basis * z.middleCols(c, w)));
    }
    return m;
}

} // namespace lesc::detail

#endif // LESC_SUBSPACE_HPP
