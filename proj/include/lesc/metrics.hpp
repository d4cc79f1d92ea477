#ifndef LESC_METRICS_HPP
#define LESC_METRICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "lesc/types.hpp"

namespace lesc {

/// Denominator and KL-argument floor.
inline constexpr double kMetricEpsilon = 1e-12;

enum class Metric { cheb, canber, clark, kl, cosine, intersec };

inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::cheb, Metric::canber, Metric::clark,
                                                      Metric::kl, Metric::cosine, Metric::intersec};

inline std::string_view metric_name(Metric m) {
    switch (m) {
    case Metric::cheb: return "cheb";
    case Metric::canber: return "canber";
    case Metric::clark: return "clark";
    case Metric::kl: return "kl";
    case Metric::cosine: return "cosine";
    case Metric::intersec: return "intersec";
    }
    return "?";
}

/// Distances are better when smaller, similarities when larger.
inline bool lower_is_better(Metric m) {
    return m != Metric::cosine && m != Metric::intersec;
}

struct MetricVector {
    double cheb = 0.0;
    double canber = 0.0;
    double clark = 0.0;
    double kl = 0.0;
    double cosine = 0.0;
    double intersec = 0.0;

    [[nodiscard]] double get(Metric m) const {
        switch (m) {
        case Metric::cheb: return cheb;
        case Metric::canber: return canber;
        case Metric::clark: return clark;
        case Metric::kl: return kl;
        case Metric::cosine: return cosine;
        case Metric::intersec: return intersec;
        }
        return 0.0;
    }

    MetricVector& operator+=(const MetricVector& o) {
        cheb += o.cheb;
        canber += o.canber;
        clark += o.clark;
        kl += o.kl;
        cosine += o.cosine;
        intersec += o.intersec;
        return *this;
    }
    MetricVector& operator/=(double s) {
        cheb /= s;
        canber /= s;
        clark /= s;
        kl /= s;
        cosine /= s;
        intersec /= s;
        return *this;
    }
};

/// Compares a ground-truth distribution `truth` with a recovered one. KL is
/// computed as KL(truth || recovered).
template <typename A, typename B>
MetricVector evaluate_pair(const Eigen::MatrixBase<A>& truth, const Eigen::MatrixBase<B>& recovered) {
    if (truth.size() != recovered.size() || truth.size() == 0) {
        throw ArgumentError("evaluate_pair: distributions must have the same non-zero length");
    }
    MetricVector m;
    double clark_sq = 0.0, dot = 0.0, nt = 0.0, nr = 0.0;
    for (Eigen::Index j = 0; j < truth.size(); ++j) {
        const double d = truth(j);
        const double h = recovered(j);
        if (!(d >= 0.0) || !(h >= 0.0)) throw ArgumentError("evaluate_pair: negative or non-finite entry");
        const double diff = std::abs(d - h);
        const double den = std::max(d + h, kMetricEpsilon);
        m.cheb = std::max(m.cheb, diff);
        m.canber += diff / den;
        clark_sq += (diff / den) * (diff / den);
        if (d > 0.0) m.kl += d * std::log(d / std::max(h, kMetricEpsilon));
        dot += d * h;
        nt += d * d;
        nr += h * h;
        m.intersec += std::min(d, h);
    }
    m.clark = std::sqrt(clark_sq);
    m.cosine = dot / std::max(std::sqrt(nt) * std::sqrt(nr), kMetricEpsilon);
    return m;
}

/// Unweighted mean of per-instance metrics over the columns.
inline MetricVector evaluate_dataset(const Matrix& truth, const Matrix& recovered) {
    if (truth.rows() != recovered.rows() || truth.cols() != recovered.cols() || truth.cols() == 0) {
        throw ArgumentError("evaluate_dataset: shape mismatch");
    }
    MetricVector acc;
    for (Eigen::Index i = 0; i < truth.cols(); ++i) acc += evaluate_pair(truth.col(i), recovered.col(i));
    acc /= static_cast<double>(truth.cols());
    return acc;
}

enum class TiePolicy {
    average, ///< tied methods share the mean of their positions (1, 2 -> 1.5)
    min,     ///< tied methods share the best position (1, 1, 3)
};

/// Ranks one row of scores (1 = best).
inline std::vector<double> rank_scores(const std::vector<double>& scores, bool lower_better,
                                       TiePolicy ties = TiePolicy::average) {
    const std::size_t k = scores.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lower_better ? scores[a] < scores[b] : scores[a] > scores[b];
    });
    std::vector<double> ranks(k);
    for (std::size_t i = 0; i < k;) {
        std::size_t j = i;
        while (j + 1 < k && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double shared = ties == TiePolicy::average ? 0.5 * static_cast<double>(i + j) + 1.0
                                                         : static_cast<double>(i) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

/// dataset -> method -> score
using ScoreTable = std::map<std::string, std::map<std::string, double>>;

/// Mean over datasets of per-dataset ranks. Every dataset must score every
/// method that appears anywhere in the table.
inline std::map<std::string, double> average_ranks(const ScoreTable& table, bool lower_better,
                                                   TiePolicy ties = TiePolicy::average) {
    if (table.empty()) throw ArgumentError("average_ranks: need at least one dataset");
    std::vector<std::string> methods;
    for (const auto& [ds, row] : table) {
        for (const auto& [method, score] : row) {
            if (std::find(methods.begin(), methods.end(), method) == methods.end()) methods.push_back(method);
        }
    }
    if (methods.size() < 2) throw ArgumentError("average_ranks: need at least two methods");
    std::map<std::string, double> total;
    for (const auto& [ds, row] : table) {
        std::vector<double> scores;
        for (const auto& method : methods) {
            const auto it = row.find(method);
            if (it == row.end()) throw ArgumentError("average_ranks: dataset '" + ds + "' has no score for '" + method + "'");
            scores.push_back(it->second);
        }
        const auto ranks = rank_scores(scores, lower_better, ties);
        for (std::size_t i = 0; i < methods.size(); ++i) total[methods[i]] += ranks[i];
    }
    for (auto& [method, sum] : total) sum /= static_cast<double>(table.size());
    return total;
}

/// Mean of ranks that were already assigned per dataset.
inline std::map<std::string, double> average_assigned_ranks(const ScoreTable& ranks) {
    if (ranks.empty()) throw ArgumentError("average_assigned_ranks: need at least one dataset");
    std::map<std::string, double> total;
    std::size_t methods = 0;
    for (const auto& [ds, row] : ranks) {
        if (methods == 0) methods = row.size();
        if (row.size() != methods) throw ArgumentError("average_assigned_ranks: dataset '" + ds + "' is missing a method");
        for (const auto& [method, r] : row) total[method] += r;
    }
    if (total.size() != methods) throw ArgumentError("average_assigned_ranks: method sets differ across datasets");
    for (auto& [method, sum] : total) sum /= static_cast<double>(ranks.size());
    return total;
}

/// Per-dataset metric values plus per-metric average ranks.
struct EvaluationReport {
    std::map<std::string, std::map<std::string, MetricVector>> per_dataset;
    std::map<Metric, std::map<std::string, double>> avg_rank;
    /// dataset -> metric -> method -> rank
    std::map<std::string, std::map<Metric, std::map<std::string, double>>> ranks;
};

/// Fills ranks and avg_rank from per_dataset.
inline void compute_ranks(EvaluationReport& report, TiePolicy ties = TiePolicy::average) {
    report.ranks.clear();
    report.avg_rank.clear();
    for (const Metric m : kAllMetrics) {
        ScoreTable table;
        for (const auto& [ds, row] : report.per_dataset) {
            for (const auto& [method, mv] : row) table[ds][method] = mv.get(m);
        }
        if (table.empty() || table.begin()->second.size() < 2) continue;
        report.avg_rank[m] = average_ranks(table, lower_is_better(m), ties);
        for (const auto& [ds, row] : table) {
            std::vector<double> scores;
            std::vector<std::string> names;
            for (const auto& [method, s] : row) {
                names.push_back(method);
                scores.push_back(s);
            }
            const auto r = rank_scores(scores, lower_is_better(m), ties);
            for (std::size_t i = 0; i < names.size(); ++i) report.ranks[ds][m][names[i]] = r[i];
        }
    }
}

} // namespace lesc

#endif // LESC_METRICS_HPP
