#ifndef LESC_TYPES_HPP
#define LESC_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lesc/errors.hpp"

namespace lesc {

/// Dense real matrix. Instances are columns everywhere: X is q x n, label
/// matrices are o x n, correlation matrices are n x n.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw ArgumentError(std::string(what) + " contains non-finite entries");
    }
}

inline void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
        throw ArgumentError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    }
}

/// Order-3 tensor stored as frontal slices, each n1 x n2. Shape is fixed at
/// construction.
template <typename Scalar>
class BasicTensor3 {
public:
    using Slice = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    BasicTensor3(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3) {
        if (n1 < 0 || n2 < 0 || n3 < 1) {
            throw ArgumentError("tensor needs n1, n2 >= 0 and n3 >= 1");
        }
        slices_.assign(static_cast<std::size_t>(n3), Slice::Zero(n1, n2));
    }

    explicit BasicTensor3(std::vector<Slice> slices) : slices_(std::move(slices)) {
        if (slices_.empty()) {
            throw ArgumentError("tensor needs at least one frontal slice");
        }
        for (const auto& s : slices_) {
            if (s.rows() != slices_.front().rows() || s.cols() != slices_.front().cols()) {
                throw ArgumentError("frontal slices of a tensor must share one shape");
            }
            if (!s.allFinite()) {
                throw ArgumentError("tensor slice contains non-finite entries");
            }
        }
    }

    [[nodiscard]] Eigen::Index n1() const { return slices_.front().rows(); }
    [[nodiscard]] Eigen::Index n2() const { return slices_.front().cols(); }
    [[nodiscard]] Eigen::Index n3() const { return static_cast<Eigen::Index>(slices_.size()); }

    [[nodiscard]] const Slice& slice(Eigen::Index k) const { return slices_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] Slice& slice(Eigen::Index k) { return slices_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] const std::vector<Slice>& slices() const { return slices_; }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (const auto& s : slices_) {
            if (s.size() > 0) m = std::max(m, s.cwiseAbs().maxCoeff());
        }
        return m;
    }

    [[nodiscard]] double frobenius_norm() const {
        double acc = 0.0;
        for (const auto& s : slices_) acc += s.squaredNorm();
        return std::sqrt(acc);
    }

    BasicTensor3& operator+=(const BasicTensor3& other) {
        check_same_shape(other);
        for (std::size_t k = 0; k < slices_.size(); ++k) slices_[k] += other.slices_[k];
        return *this;
    }
    BasicTensor3& operator-=(const BasicTensor3& other) {
        check_same_shape(other);
        for (std::size_t k = 0; k < slices_.size(); ++k) slices_[k] -= other.slices_[k];
        return *this;
    }
    BasicTensor3& operator*=(Scalar s) {
        for (auto& sl : slices_) sl *= s;
        return *this;
    }

    friend BasicTensor3 operator+(BasicTensor3 a, const BasicTensor3& b) { return a += b; }
    friend BasicTensor3 operator-(BasicTensor3 a, const BasicTensor3& b) { return a -= b; }
    friend BasicTensor3 operator*(Scalar s, BasicTensor3 a) { return a *= s; }

private:
    void check_same_shape(const BasicTensor3& other) const {
        if (n1() != other.n1() || n2() != other.n2() || n3() != other.n3()) {
            throw ArgumentError("tensor shape mismatch");
        }
    }

    std::vector<Slice> slices_;
};

using Tensor3 = BasicTensor3<double>;
using ComplexTensor3 = BasicTensor3<std::complex<double>>;

/// Per-iteration history of an ALM solver.
struct SolverTrace {
    std::size_t iterations = 0;
    /// Max constraint violation (infinity norm) after each iteration.
    std::vector<double> residuals;
    /// Constraint penalty mu used in each iteration.
    std::vector<double> penalties;
    bool converged = false;
};

} // namespace lesc

#endif // LESC_TYPES_HPP
