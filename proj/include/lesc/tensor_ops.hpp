#ifndef LESC_TENSOR_OPS_HPP
#define LESC_TENSOR_OPS_HPP

#include <complex>
#include <numbers>

#include "lesc/prox.hpp"
#include "lesc/types.hpp"

namespace lesc {

namespace detail {

// exp(sign * 2*pi*i * m / n), exact at the quarter turns.
inline std::complex<double> twiddle(Eigen::Index m, Eigen::Index n, double sign) {
    m %= n;
    if (m == 0) return {1.0, 0.0};
    if (2 * m == n) return {-1.0, 0.0};
    if (4 * m == n) return {0.0, sign};
    if (4 * m == 3 * n) return {0.0, -sign};
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

} // namespace detail

/// Unnormalized DFT along the tube (third) dimension.
inline ComplexTensor3 fft_mode3(const Tensor3& t) {
    const Eigen::Index n3 = t.n3();
    ComplexTensor3 out(t.n1(), t.n2(), n3);
    for (Eigen::Index k = 0; k < n3; ++k) {
        auto& acc = out.slice(k);
        for (Eigen::Index s = 0; s < n3; ++s) {
            const auto w = detail::twiddle(k * s, n3, -1.0);
            if (w == std::complex<double>(1.0, 0.0)) {
                acc += t.slice(s).cast<std::complex<double>>();
            } else if (w == std::complex<double>(-1.0, 0.0)) {
                acc -= t.slice(s).cast<std::complex<double>>();
            } else {
                acc += w * t.slice(s).cast<std::complex<double>>();
            }
        }
    }
    return out;
}

/// Inverse of fft_mode3 (divides by n3). The imaginary residue is discarded.
inline Tensor3 ifft_mode3(const ComplexTensor3& f) {
    const Eigen::Index n3 = f.n3();
    Tensor3 out(f.n1(), f.n2(), n3);
    const double scale = 1.0 / static_cast<double>(n3);
    for (Eigen::Index s = 0; s < n3; ++s) {
        ComplexMatrix acc = ComplexMatrix::Zero(f.n1(), f.n2());
        for (Eigen::Index k = 0; k < n3; ++k) {
            const auto w = detail::twiddle(k * s, n3, 1.0);
            if (w == std::complex<double>(1.0, 0.0)) {
                acc += f.slice(k);
            } else if (w == std::complex<double>(-1.0, 0.0)) {
                acc -= f.slice(k);
            } else {
                acc += w * f.slice(k);
            }
        }
        out.slice(s) = scale * acc.real();
    }
    return out;
}

/// t-SVD tensor nuclear norm: sum of the nuclear norms of the Fourier-domain
/// frontal slices (unnormalized forward transform).
inline double tensor_nuclear_norm(const Tensor3& t) {
    const auto f = fft_mode3(t);
    double total = 0.0;
    for (Eigen::Index k = 0; k < f.n3(); ++k) total += nuclear_norm(f.slice(k));
    return total;
}

/// Tubal shrinkage: soft-threshold the singular values of every Fourier
/// slice by tau, then transform back.
inline Tensor3 tubal_shrink(const Tensor3& t, double tau) {
    require_threshold(tau, "tubal_shrink");
    auto f = fft_mode3(t);
    for (Eigen::Index k = 0; k < f.n3(); ++k) {
        const ComplexMatrix& slice = f.slice(k);
        if (slice.size() == 0) {
            continue;
        }
        if (slice.imag().cwiseAbs().maxCoeff() == 0.0) {
            f.slice(k) = svt(Matrix(slice.real()), tau).cast<std::complex<double>>();
        } else {
            f.slice(k) = svt(slice, tau);
        }
    }
    return ifft_mode3(f);
}

} // namespace lesc

#endif // LESC_TENSOR_OPS_HPP
