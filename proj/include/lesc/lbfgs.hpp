#ifndef LESC_LBFGS_HPP
#define LESC_LBFGS_HPP

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "lesc/errors.hpp"
#include "lesc/types.hpp"

namespace lesc {

struct LbfgsConfig {
    std::size_t memory = 10;
    double tol = 1e-5;              ///< stop when ||grad||_inf <= tol
    std::size_t max_iter = 200;
    std::size_t max_line_search = 40;
    double armijo = 1e-4;           ///< sufficient decrease constant
    double curvature = 0.9;         ///< strong Wolfe curvature constant

    void validate() const {
        if (memory < 3) throw ArgumentError("lbfgs: memory must be >= 3");
        if (!(tol > 0.0)) throw ArgumentError("lbfgs: tol must be > 0");
        if (max_line_search < 1) throw ArgumentError("lbfgs: max_line_search must be >= 1");
        if (!(armijo > 0.0 && armijo < curvature && curvature < 1.0)) {
            throw ArgumentError("lbfgs: need 0 < armijo < curvature < 1");
        }
    }
};

enum class LbfgsStatus { converged, max_iterations, line_search_failed };

inline std::string_view to_string(LbfgsStatus s) {
    switch (s) {
    case LbfgsStatus::converged: return "converged";
    case LbfgsStatus::max_iterations: return "max_iterations";
    case LbfgsStatus::line_search_failed: return "line_search_failed";
    }
    return "unknown";
}

struct LbfgsResult {
    Vector x;
    double objective = 0.0;
    double grad_inf_norm = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    LbfgsStatus status = LbfgsStatus::max_iterations;
    /// Objective at the start point and after every accepted step.
    std::vector<double> objective_history;
};

namespace detail {

struct LinePoint {
    double step;
    double value;
    double slope;
};

inline double cubic_minimizer(const LinePoint& a, const LinePoint& b) {
    const double lo = std::min(a.step, b.step);
    const double hi = std::max(a.step, b.step);
    const double mid = 0.5 * (a.step + b.step);
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
    const double disc = d1 * d1 - a.slope * b.slope;
    if (!(disc >= 0.0) || !std::isfinite(disc)) return mid;
    const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom == 0.0) return mid;
    const double t = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
    const double margin = 0.1 * (hi - lo);
    if (!std::isfinite(t) || t < lo + margin || t > hi - margin) return mid;
    return t;
}

} // namespace detail

/// Limited-memory BFGS with a strong-Wolfe line search.
/// `fg(x, grad)` returns f(x) and writes the gradient into grad. Accepted
/// steps always satisfy sufficient decrease, so the objective history is
/// non-increasing. If no acceptable step is found the current (best) iterate
/// is returned with status line_search_failed.
template <typename Fn>
LbfgsResult lbfgs_minimize(Fn&& fg, Vector x0, const LbfgsConfig& cfg) {
    cfg.validate();
    LbfgsResult res;
    res.x = std::move(x0);
    Vector g(res.x.size());
    double f = fg(res.x, g);
    res.evaluations = 1;
    if (!std::isfinite(f) || !g.allFinite()) throw ArgumentError("lbfgs: non-finite objective at start point");
    res.objective_history.push_back(f);

    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;
    Vector d(res.x.size()), x_trial(res.x.size()), g_trial(res.x.size());

    auto finish = [&](LbfgsStatus status) {
        res.objective = f;
        res.grad_inf_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
        res.status = status;
        return res;
    };

    if (g.size() == 0 || g.cwiseAbs().maxCoeff() <= cfg.tol) return finish(LbfgsStatus::converged);

    for (std::size_t k = 0; k < cfg.max_iter; ++k) {
        // Two-loop recursion.
        d = -g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(d);
            d -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alpha[i] - beta) * s_hist[i];
        }
        double slope0 = g.dot(d);
        if (!(slope0 < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -g;
            slope0 = -g.squaredNorm();
        }

        const detail::LinePoint origin{0.0, f, slope0};
        auto probe = [&](double step) {
            x_trial = res.x + step * d;
            const double v = fg(x_trial, g_trial);
            ++res.evaluations;
            return detail::LinePoint{step, std::isfinite(v) ? v : std::numeric_limits<double>::infinity(),
                                     g_trial.dot(d)};
        };
        auto sufficient = [&](const detail::LinePoint& p) { return p.value <= f + cfg.armijo * p.step * slope0; };
        auto curvature_ok = [&](const detail::LinePoint& p) { return std::abs(p.slope) <= -cfg.curvature * slope0; };

        // Accepted point; x_trial/g_trial hold the matching state.
        std::optional<detail::LinePoint> accepted;
        std::size_t budget = cfg.max_line_search;

        auto zoom = [&](detail::LinePoint lo, detail::LinePoint hi) -> std::optional<detail::LinePoint> {
            while (budget > 0) {
                --budget;
                const auto p = probe(detail::cubic_minimizer(lo, hi));
                if (!sufficient(p) || p.value >= lo.value) {
                    hi = p;
                } else {
                    if (curvature_ok(p)) return p;
                    if (p.slope * (hi.step - lo.step) >= 0.0) hi = lo;
                    lo = p;
                }
                if (std::abs(hi.step - lo.step) <= 1e-16 * std::max(1.0, lo.step)) break;
            }
            // Fall back to the best sufficient-decrease point seen.
            if (lo.step > 0.0) {
                probe(lo.step);
                return lo;
            }
            return std::nullopt;
        };

        double step = s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
        detail::LinePoint prev = origin;
        for (std::size_t i = 0; budget > 0; ++i) {
            --budget;
            const auto p = probe(step);
            if (!sufficient(p) || (i > 0 && p.value >= prev.value)) {
                accepted = zoom(prev, p);
                break;
            }
            if (curvature_ok(p)) {
                accepted = p;
                break;
            }
            if (p.slope >= 0.0) {
                accepted = zoom(p, prev);
                break;
            }
            prev = p;
            step *= 2.0;
        }
        if (!accepted && prev.step > 0.0) {
            probe(prev.step);
            accepted = prev;
        }
        if (!accepted || !(accepted->value <= f)) return finish(LbfgsStatus::line_search_failed);

        Vector s = x_trial - res.x;
        Vector y = g_trial - g;
        const double sy = s.dot(y);
        res.x = x_trial;
        g = g_trial;
        f = accepted->value;
        ++res.iterations;
        res.objective_history.push_back(f);

        if (sy > std::numeric_limits<double>::epsilon() * y.squaredNorm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > cfg.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        if (g.cwiseAbs().maxCoeff() <= cfg.tol) return finish(LbfgsStatus::converged);
    }
    return finish(LbfgsStatus::max_iterations);
}

} // namespace lesc

#endif // LESC_LBFGS_HPP
