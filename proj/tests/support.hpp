// Shared generators and independent oracles for the test suites. Nothing in
// here calls into the library's numerical kernels.
#ifndef LESC_TESTS_SUPPORT_HPP
#define LESC_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace lesc::testing {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, scale);
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(gen);
    return m;
}

inline CMat random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist;
    CMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = {dist(gen), dist(gen)};
    return m;
}

/// rank-r product of two Gaussian factors
inline Mat low_rank(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank, std::uint64_t seed) {
    return random_matrix(rows, rank, seed) * random_matrix(rank, cols, seed + 7919);
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// --- proximal oracles -------------------------------------------------------

/// Full SVD, shrink the spectrum, reassemble.
template <typename M>
M oracle_svt(const M& a, double tau) {
    Eigen::JacobiSVD<M> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

/// argmin_c tau ||c|| + 1/2 ||c - a||^2. The minimizer is t a for some
/// t in [0, 1]; bisection on the sign of the derivative in t.
inline Eigen::VectorXd oracle_column_prox(const Eigen::VectorXd& a, double tau) {
    const double norm = a.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(a.size());
    auto slope = [&](double t) { return tau * norm + (t - 1.0) * norm * norm; };
    if (slope(0.0) >= 0.0) return Eigen::VectorXd::Zero(a.size());
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) * a;
}

/// Direct DFT along the third mode with std::polar twiddles.
inline std::vector<CMat> oracle_fft(const std::vector<Mat>& slices) {
    const auto n3 = static_cast<Eigen::Index>(slices.size());
    std::vector<CMat> out;
    for (Eigen::Index k = 0; k < n3; ++k) {
        CMat acc = CMat::Zero(slices[0].rows(), slices[0].cols());
        for (Eigen::Index t = 0; t < n3; ++t) {
            const auto w = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n3));
            acc += slices[static_cast<std::size_t>(t)].cast<std::complex<double>>() * w;
        }
        out.push_back(acc);
    }
    return out;
}

inline std::vector<Mat> oracle_ifft(const std::vector<CMat>& f) {
    const auto n3 = static_cast<Eigen::Index>(f.size());
    std::vector<Mat> out;
    for (Eigen::Index t = 0; t < n3; ++t) {
        CMat acc = CMat::Zero(f[0].rows(), f[0].cols());
        for (Eigen::Index k = 0; k < n3; ++k) {
            const auto w = std::polar(1.0, 2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n3));
            acc += f[static_cast<std::size_t>(k)] * w;
        }
        out.push_back((acc / static_cast<double>(n3)).real());
    }
    return out;
}

inline std::vector<Mat> oracle_tubal_shrink(const std::vector<Mat>& slices, double tau) {
    auto f = oracle_fft(slices);
    for (auto& s : f) s = oracle_svt(s, tau);
    return oracle_ifft(f);
}

inline double oracle_nuclear(const Mat& a) {
    return Eigen::JacobiSVD<Mat>(a).singularValues().sum();
}

// --- dense reference solvers ------------------------------------------------

struct ReferenceLrr {
    Mat C, E;
    std::vector<double> residuals;
    bool converged = false;
};

/// Textbook inexact ALM on the full n x n variables.
inline ReferenceLrr reference_lrr(const Mat& X, double lambda2, double mu0, double mu_max, double scale, double tol,
                                  int max_iter) {
    const Eigen::Index q = X.rows(), n = X.cols();
    Mat J = Mat::Zero(n, n), C = Mat::Zero(n, n), Y2 = Mat::Zero(n, n);
    Mat E = Mat::Zero(q, n), Y1 = Mat::Zero(q, n);
    const Mat xtx = X.transpose() * X;
    const Eigen::LLT<Mat> chol(Mat::Identity(n, n) + xtx);
    ReferenceLrr out;
    double mu = mu0;
    for (int it = 0; it < max_iter; ++it) {
        J = oracle_svt<Mat>(C + Y2 / mu, 1.0 / mu);
        // mu (I + X^T X) C = mu J - Y2 + X^T Y1 + mu (X^T X - X^T E)
        C = chol.solve(J - Y2 / mu + X.transpose() * Y1 / mu + xtx - X.transpose() * E);
        const Mat T = X - X * C + Y1 / mu;
        for (Eigen::Index j = 0; j < n; ++j) E.col(j) = oracle_column_prox(T.col(j), lambda2 / mu);
        const Mat r1 = X - X * C - E, r2 = C - J;
        Y1 += mu * r1;
        Y2 += mu * r2;
        const double res = std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
        out.residuals.push_back(res);
        mu = std::min(scale * mu, mu_max);
        if (res <= tol) {
            out.converged = true;
            break;
        }
    }
    out.C = C;
    out.E = E;
    return out;
}

struct ReferenceTlrr {
    Mat C1, C2, E1, E2;
    std::vector<double> residuals;
    bool converged = false;
};

/// Two-view tensor ALM on the full n x n x 2 variables with an explicit DFT.
inline ReferenceTlrr reference_tlrr(const Mat& X, const Mat& G, double lambda2, double p0, double p_max,
                                    double scale, double tol, int max_iter) {
    const Eigen::Index q = X.rows(), o = G.rows(), n = X.cols();
    Mat C1 = Mat::Zero(n, n), C2 = Mat::Zero(n, n), W1 = Mat::Zero(n, n), W2 = Mat::Zero(n, n);
    Mat E1 = Mat::Zero(q, n), E2 = Mat::Zero(o, n), Y1 = Mat::Zero(q, n), Y2 = Mat::Zero(o, n);
    const Mat xtx = X.transpose() * X, gtg = G.transpose() * G, I = Mat::Identity(n, n);
    ReferenceTlrr out;
    double mu = p0, rho = p0;
    for (int it = 0; it < max_iter; ++it) {
        const auto g = oracle_tubal_shrink({C1 + W1 / rho, C2 + W2 / rho}, 2.0 / rho);
        // ((mu/rho) X^T X + I) C1 = G1 + (mu X^T X - mu X^T E1 + X^T Y1 - W1) / rho
        C1 = ((mu / rho) * xtx + I).llt().solve(g[0] + (mu * xtx - mu * X.transpose() * E1 + X.transpose() * Y1 - W1) / rho);
        C2 = ((mu / rho) * gtg + I).llt().solve(g[1] + (mu * gtg - mu * G.transpose() * E2 + G.transpose() * Y2 - W2) / rho);
        Mat T(q + o, n);
        T.topRows(q) = X - X * C1 + Y1 / mu;
        T.bottomRows(o) = G - G * C2 + Y2 / mu;
        for (Eigen::Index j = 0; j < n; ++j) T.col(j) = oracle_column_prox(T.col(j), lambda2 / mu);
        E1 = T.topRows(q);
        E2 = T.bottomRows(o);
        const Mat r1 = X - X * C1 - E1, r2 = G - G * C2 - E2, d1 = C1 - g[0], d2 = C2 - g[1];
        Y1 += mu * r1;
        Y2 += mu * r2;
        W1 += rho * d1;
        W2 += rho * d2;
        const double res = std::max({r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff(), d1.cwiseAbs().maxCoeff(),
                                     d2.cwiseAbs().maxCoeff()});
        out.residuals.push_back(res);
        mu = std::min(scale * mu, p_max);
        rho = std::min(scale * rho, p_max);
        if (res <= tol) {
            out.converged = true;
            break;
        }
    }
    out.C1 = C1;
    out.C2 = C2;
    out.E1 = E1;
    out.E2 = E2;
    return out;
}

// --- synthetic subspace data -----------------------------------------------

/// `per_block` columns in each of two orthogonal subspaces of an ambient
/// space of dimension `dim`. Subspace 0 is spanned by the first `sub_dim`
/// coordinates, subspace 1 by the next `sub_dim`.
inline Mat two_subspace_data(Eigen::Index dim, Eigen::Index sub_dim, Eigen::Index per_block, std::uint64_t seed) {
    Mat X = Mat::Zero(dim, 2 * per_block);
    const Mat a = random_matrix(sub_dim, per_block, seed);
    const Mat b = random_matrix(sub_dim, per_block, seed + 1);
    X.block(0, 0, sub_dim, per_block) = a;
    X.block(sub_dim, per_block, sub_dim, per_block) = b;
    return X;
}

/// Two-row indicator of the block membership.
inline Mat block_indicator(Eigen::Index per_block) {
    Mat G = Mat::Zero(2, 2 * per_block);
    G.block(0, 0, 1, per_block).setOnes();
    G.block(1, per_block, 1, per_block).setOnes();
    return G;
}

/// Fraction of squared Frobenius mass inside the two diagonal blocks.
inline double block_mass(const Mat& C, Eigen::Index per_block) {
    const double total = C.squaredNorm();
    const double inside = C.block(0, 0, per_block, per_block).squaredNorm() +
                          C.block(per_block, per_block, per_block, per_block).squaredNorm();
    return total > 0.0 ? inside / total : 0.0;
}

// --- recovery objective oracle ---------------------------------------------

inline double oracle_le_objective(const Mat& theta, const Mat& K, const Mat& G, const Mat& C, double lambda1) {
    const Mat s = theta * K;
    const Mat I = Mat::Identity(C.rows(), C.cols());
    return (s - G).squaredNorm() + lambda1 * (s * (I - C)).squaredNorm();
}

/// Central differences of an arbitrary scalar function of a matrix.
template <typename F>
Mat central_difference(F&& f, const Mat& x, double h) {
    Mat g(x.rows(), x.cols());
    Mat probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double keep = probe(k);
        probe(k) = keep + h;
        const double up = f(probe);
        probe(k) = keep - h;
        const double down = f(probe);
        probe(k) = keep;
        g(k) = (up - down) / (2.0 * h);
    }
    return g;
}

/// Direct-summation metric formulas with the 1e-12 clamp.
struct OracleMetrics {
    double cheb = 0, canber = 0, clark = 0, kl = 0, cosine = 0, intersec = 0;
};

inline OracleMetrics oracle_metrics(const Eigen::VectorXd& d, const Eigen::VectorXd& h) {
    constexpr double eps = 1e-12;
    OracleMetrics m;
    double dot = 0, nd = 0, nh = 0, clark2 = 0;
    for (Eigen::Index j = 0; j < d.size(); ++j) {
        m.cheb = std::max(m.cheb, std::abs(d(j) - h(j)));
        const double den = std::max(d(j) + h(j), eps);
        m.canber += std::abs(d(j) - h(j)) / den;
        clark2 += (d(j) - h(j)) * (d(j) - h(j)) / (den * den);
        if (d(j) > 0) m.kl += d(j) * std::log(d(j) / std::max(h(j), eps));
        dot += d(j) * h(j);
        nd += d(j) * d(j);
        nh += h(j) * h(j);
        m.intersec += std::min(d(j), h(j));
    }
    m.clark = std::sqrt(clark2);
    m.cosine = dot / (std::sqrt(nd) * std::sqrt(nh));
    return m;
}

} // namespace lesc::testing

#endif
