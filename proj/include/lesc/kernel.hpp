#ifndef LESC_KERNEL_HPP
#define LESC_KERNEL_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "lesc/types.hpp"

namespace lesc {

/// How the Gaussian kernel width is chosen.
struct KernelConfig {
    enum class Rule { fixed, mean_pairwise_distance };

    Rule rule = Rule::mean_pairwise_distance;
    double value = 1.0; ///< used when rule == fixed
    /// Instances used to estimate the mean pairwise distance.
    std::size_t max_instances = 2000;

    static KernelConfig fixed(double sigma) { return {Rule::fixed, sigma, 2000}; }
    static KernelConfig mean_distance() { return {}; }

    void validate() const {
        if (rule == Rule::fixed && !(value > 0.0)) throw ArgumentError("kernel: fixed sigma must be > 0");
        if (max_instances < 2) throw ArgumentError("kernel: max_instances must be >= 2");
    }
};

/// Mean Euclidean distance over all instance pairs. Above max_instances the
/// instances are thinned to an evenly spaced subset.
inline double mean_pairwise_distance(const Matrix& X, std::size_t max_instances = 2000) {
    const Eigen::Index n = X.cols();
    if (n < 2) throw ArgumentError("mean_pairwise_distance: need at least 2 instances");
    const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(static_cast<std::size_t>(n), max_instances));
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = (i * n) / m;
    double sum = 0.0;
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = a + 1; b < m; ++b) {
            sum += (X.col(idx[static_cast<std::size_t>(a)]) - X.col(idx[static_cast<std::size_t>(b)])).norm();
        }
    }
    return sum / (0.5 * static_cast<double>(m) * static_cast<double>(m - 1));
}

inline double resolve_sigma(const KernelConfig& cfg, const Matrix& X) {
    cfg.validate();
    if (cfg.rule == KernelConfig::Rule::fixed) return cfg.value;
    const double s = mean_pairwise_distance(X, cfg.max_instances);
    if (!(s > 0.0)) throw ArgumentError("kernel: all instances coincide, mean distance is zero");
    return s;
}

/// K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)); symmetric with unit diagonal.
inline Matrix gaussian_gram(const Matrix& X, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("gaussian_gram: sigma must be > 0");
    require_finite(X, "gaussian_gram: X");
    const Eigen::Index n = X.cols();
    const double inv = 1.0 / (2.0 * sigma * sigma);
    Matrix K(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        K(j, j) = 1.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double v = std::exp(-(X.col(i) - X.col(j)).squaredNorm() * inv);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

} // namespace lesc

#endif // LESC_KERNEL_HPP
