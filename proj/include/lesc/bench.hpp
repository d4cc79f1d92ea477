#ifndef LESC_BENCH_HPP
#define LESC_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lesc/dataset.hpp"
#include "lesc/enhance.hpp"
#include "lesc/metrics.hpp"

namespace lesc::bench {

using json = nlohmann::json;

inline constexpr std::string_view kManifestVersion = "lesc-manifest/1";

enum class ExitCode : int { ok = 0, argument = 2, parse = 3, degraded = 4, numerical = 5 };

enum class Method { lp, lesc, glesc };

inline std::string_view method_name(Method m) {
    switch (m) {
    case Method::lp: return "lp";
    case Method::lesc: return "lesc";
    case Method::glesc: return "glesc";
    }
    return "unknown";
}

/// Table display names.
inline std::string_view method_label(Method m) {
    switch (m) {
    case Method::lp: return "LP";
    case Method::lesc: return "LESC";
    case Method::glesc: return "gLESC";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    if (s == "lp") return Method::lp;
    if (s == "lesc") return Method::lesc;
    if (s == "glesc") return Method::glesc;
    throw ArgumentError("unknown method '" + std::string(s) + "' (expected lp, lesc or glesc)");
}

inline std::vector<Method> parse_methods(std::string_view list) {
    std::vector<Method> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const std::size_t end = std::min(list.find(',', pos), list.size());
        out.push_back(parse_method(list.substr(pos, end - pos)));
        pos = end + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grids: "0.1", "1e-4,1e-2,1", or "logspace:1e-4:10" (inclusive decades).

inline double parse_positive(std::string_view tok, std::string_view what) {
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size() || !std::isfinite(v) || !(v > 0.0)) {
        throw ArgumentError(std::string(what) + ": '" + std::string(tok) + "' is not a positive number");
    }
    return v;
}

inline std::vector<double> parse_grid(std::string_view spec, std::string_view what = "grid") {
    if (spec.empty()) throw ArgumentError(std::string(what) + ": empty grid");
    std::vector<double> out;
    constexpr std::string_view prefix = "logspace:";
    if (spec.substr(0, prefix.size()) == prefix) {
        const auto rest = spec.substr(prefix.size());
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw ArgumentError(std::string(what) + ": expected logspace:LO:HI");
        const double lo = parse_positive(rest.substr(0, colon), what);
        const double hi = parse_positive(rest.substr(colon + 1), what);
        const double a = std::log10(lo), b = std::log10(hi);
        if (std::abs(a - std::round(a)) > 1e-9 || std::abs(b - std::round(b)) > 1e-9 || hi < lo) {
            throw ArgumentError(std::string(what) + ": logspace bounds must be powers of ten with LO <= HI");
        }
        for (long e = std::lround(a); e <= std::lround(b); ++e) {
            // Parse the decimal literal so grid points equal "1e-3" typed by hand.
            const std::string lit = "1e" + std::to_string(e);
            out.push_back(std::strtod(lit.c_str(), nullptr));
        }
        return out;
    }
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t end = std::min(spec.find(',', pos), spec.size());
        out.push_back(parse_positive(spec.substr(pos, end - pos), what));
        pos = end + 1;
    }
    return out;
}

/// Hyper-parameter grid used for tuning: {1e-4, 1e-3, ..., 10}.
inline std::vector<double> default_tuning_grid() { return parse_grid("logspace:1e-4:10"); }

// ---------------------------------------------------------------------------
// Run configuration

struct MethodParams {
    double lambda1 = 1.0;
    double lambda2 = 0.1;
    double alpha = 0.5; ///< lp only
    KernelConfig kernel;
    double mu0 = 1e-4;
    double mu_max = 1e6;
    double scale = 1.1;
    double tol = 1e-6;
    std::size_t max_iter = 500;
    LbfgsConfig lbfgs;
    bool standardize = true;

    /// lp uses a unit kernel width; the LE methods use the mean distance.
    static MethodParams defaults(Method m) {
        MethodParams p;
        if (m == Method::lp) p.kernel = KernelConfig::fixed(1.0);
        return p;
    }

    [[nodiscard]] LrrConfig lrr() const {
        LrrConfig c;
        c.lambda2 = lambda2;
        c.mu0 = mu0;
        c.mu_max = mu_max;
        c.rho_scale = scale;
        c.tol = tol;
        c.max_iter = max_iter;
        return c;
    }

    [[nodiscard]] TlrrConfig tlrr() const {
        TlrrConfig c;
        c.lambda2 = lambda2;
        c.mu0 = c.rho0 = mu0;
        c.mu_max = c.rho_max = mu_max;
        c.scale = scale;
        c.tol = tol;
        c.max_iter = max_iter;
        return c;
    }

    [[nodiscard]] LeConfig le() const {
        LeConfig c;
        c.lambda1 = lambda1;
        c.kernel = kernel;
        c.lbfgs = lbfgs;
        return c;
    }
};

inline json to_json(const KernelConfig& k) {
    return json{{"rule", k.rule == KernelConfig::Rule::fixed ? "fixed" : "mean_pairwise_distance"},
                {"value", k.value},
                {"max_instances", k.max_instances}};
}

inline KernelConfig kernel_from_json(const json& j) {
    KernelConfig k;
    const auto rule = j.at("rule").get<std::string>();
    if (rule == "fixed") {
        k.rule = KernelConfig::Rule::fixed;
    } else if (rule == "mean_pairwise_distance") {
        k.rule = KernelConfig::Rule::mean_pairwise_distance;
    } else {
        throw ArgumentError("manifest: unknown kernel rule '" + rule + "'");
    }
    k.value = j.at("value").get<double>();
    k.max_instances = j.at("max_instances").get<std::size_t>();
    return k;
}

inline json to_json(const MethodParams& p) {
    return json{{"lambda1", p.lambda1},
                {"lambda2", p.lambda2},
                {"alpha", p.alpha},
                {"kernel", to_json(p.kernel)},
                {"alm", {{"mu0", p.mu0}, {"mu_max", p.mu_max}, {"scale", p.scale}, {"tol", p.tol}, {"max_iter", p.max_iter}}},
                {"lbfgs",
                 {{"memory", p.lbfgs.memory},
                  {"tol", p.lbfgs.tol},
                  {"max_iter", p.lbfgs.max_iter},
                  {"max_line_search", p.lbfgs.max_line_search},
                  {"armijo", p.lbfgs.armijo},
                  {"curvature", p.lbfgs.curvature}}},
                {"standardize", p.standardize}};
}

inline MethodParams params_from_json(const json& j) {
    MethodParams p;
    p.lambda1 = j.at("lambda1").get<double>();
    p.lambda2 = j.at("lambda2").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.kernel = kernel_from_json(j.at("kernel"));
    const auto& alm = j.at("alm");
    p.mu0 = alm.at("mu0").get<double>();
    p.mu_max = alm.at("mu_max").get<double>();
    p.scale = alm.at("scale").get<double>();
    p.tol = alm.at("tol").get<double>();
    p.max_iter = alm.at("max_iter").get<std::size_t>();
    const auto& lb = j.at("lbfgs");
    p.lbfgs.memory = lb.at("memory").get<std::size_t>();
    p.lbfgs.tol = lb.at("tol").get<double>();
    p.lbfgs.max_iter = lb.at("max_iter").get<std::size_t>();
    p.lbfgs.max_line_search = lb.at("max_line_search").get<std::size_t>();
    p.lbfgs.armijo = lb.at("armijo").get<double>();
    p.lbfgs.curvature = lb.at("curvature").get<double>();
    p.standardize = j.at("standardize").get<bool>();
    return p;
}

inline std::string_view strategy_name(BinarizeStrategy::Kind k) {
    switch (k) {
    case BinarizeStrategy::Kind::greedy_cumulative: return "greedy";
    case BinarizeStrategy::Kind::mean_threshold: return "mean";
    case BinarizeStrategy::Kind::top_k: return "topk";
    }
    return "unknown";
}

inline BinarizeStrategy parse_strategy(std::string_view name, double threshold, std::size_t k) {
    if (name == "greedy") {
        if (!(threshold > 0.0 && threshold < 1.0)) throw ArgumentError("binarize: threshold must lie in (0, 1)");
        return BinarizeStrategy::greedy(threshold);
    }
    if (name == "mean") return BinarizeStrategy::mean();
    if (name == "topk") {
        if (k < 1) throw ArgumentError("binarize: k must be >= 1");
        return BinarizeStrategy::top(k);
    }
    throw ArgumentError("unknown binarization strategy '" + std::string(name) + "' (expected greedy, mean or topk)");
}

inline json to_json(const BinarizeStrategy& s) {
    return json{{"strategy", strategy_name(s.kind)}, {"threshold", s.threshold}, {"k", s.k}};
}

inline BinarizeStrategy strategy_from_json(const json& j) {
    return parse_strategy(j.at("strategy").get<std::string>(), j.at("threshold").get<double>(),
                          j.at("k").get<std::size_t>());
}

// ---------------------------------------------------------------------------
// Single runs

/// Features after optional standardization, plus the label view.
struct PreparedInput {
    Matrix X;
    Matrix Gamma;
    std::vector<std::string> warnings;
};

inline PreparedInput prepare_input(const Matrix& X, const Matrix& Gamma, bool standardize) {
    PreparedInput in;
    in.Gamma = Gamma;
    if (standardize) {
        std::vector<Eigen::Index> constant;
        in.X = standardize_features(X, &constant);
        for (const auto row : constant) {
            in.warnings.push_back("feature " + std::to_string(row) + " is constant; standardized to zero");
        }
    } else {
        in.X = X;
    }
    return in;
}

struct RunOutcome {
    Matrix distributions;
    double sigma = 0.0;
    SolverTrace solver;
    std::size_t lbfgs_iterations = 0;
    std::size_t lbfgs_evaluations = 0;
    std::string lbfgs_status = "n/a";
    double objective = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
    bool degraded = false;
    std::vector<std::string> warnings;
};

inline void absorb(RunOutcome& out, EnhanceResult&& r) {
    out.degraded = r.degraded();
    out.distributions = std::move(r.distributions);
    out.sigma = r.sigma;
    out.solver = std::move(r.solver_trace);
    out.lbfgs_iterations = r.lbfgs_iterations;
    out.lbfgs_evaluations = r.lbfgs_evaluations;
    out.lbfgs_status = std::string(to_string(r.lbfgs_status));
    out.objective = r.final_objective;
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
}

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline RunOutcome run_method(Method method, const PreparedInput& in, const MethodParams& p) {
    Stopwatch clock;
    RunOutcome out;
    out.warnings = in.warnings;
    switch (method) {
    case Method::lp:
        out.sigma = resolve_sigma(p.kernel, in.X);
        out.distributions = baseline_lp(in.X, in.Gamma, p.alpha, out.sigma, &out.warnings);
        break;
    case Method::lesc: absorb(out, enhance_lesc(in.X, in.Gamma, p.lrr(), p.le())); break;
    case Method::glesc: absorb(out, enhance_glesc(in.X, in.Gamma, p.tlrr(), p.le())); break;
    }
    out.wall_seconds = clock.seconds();
    return out;
}

inline json trace_json(const SolverTrace& t, bool full) {
    json j{{"iterations", t.iterations},
           {"converged", t.converged},
           {"final_residual", t.residuals.empty() ? json(nullptr) : json(t.residuals.back())}};
    if (full) {
        j["residuals"] = t.residuals;
        j["penalties"] = t.penalties;
    }
    return j;
}

inline json outcome_json(const RunOutcome& r, bool full_trace) {
    return json{{"sigma", r.sigma},
                {"solver", trace_json(r.solver, full_trace)},
                {"lbfgs",
                 {{"iterations", r.lbfgs_iterations},
                  {"evaluations", r.lbfgs_evaluations},
                  {"status", r.lbfgs_status},
                  {"objective", std::isfinite(r.objective) ? json(r.objective) : json(nullptr)}}},
                {"wall_seconds", r.wall_seconds},
                {"degraded", r.degraded},
                {"warnings", r.warnings}};
}

// ---------------------------------------------------------------------------
// Worker pool

/// Thread count: explicit value if > 0, else LESC_THREADS, else hardware.
inline std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LESC_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) throw ArgumentError("LESC_THREADS must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count); exceptions are rethrown after all
/// workers stop (lowest failing index wins, so errors are deterministic).
template <typename Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------------------
// Grids of runs

struct GridPoint {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    MetricVector metrics;
    RunOutcome outcome; ///< distributions are dropped unless kept
};

/// Evaluates every (lambda1, lambda2) pair against `truth`. The correlation
/// solve depends only on lambda2 and is shared across the lambda1 axis.
/// lp ignores both grids and yields one point.
inline std::vector<GridPoint> evaluate_grid(Method method, const PreparedInput& in, const Matrix& truth,
                                            const MethodParams& base, const std::vector<double>& grid1,
                                            const std::vector<double>& grid2, std::size_t threads,
                                            bool keep_distributions = false) {
    if (method == Method::lp) {
        GridPoint gp;
        gp.outcome = run_method(method, in, base);
        gp.metrics = evaluate_dataset(truth, gp.outcome.distributions);
        gp.lambda1 = base.lambda1;
        gp.lambda2 = base.lambda2;
        if (!keep_distributions) gp.outcome.distributions.resize(0, 0);
        return {std::move(gp)};
    }
    if (grid1.empty() || grid2.empty()) throw ArgumentError("evaluate_grid: empty grid");
    std::vector<GridPoint> points(grid1.size() * grid2.size());
    parallel_for(grid2.size(), threads, [&](std::size_t b) {
        MethodParams p = base;
        p.lambda2 = grid2[b];
        Stopwatch solve_clock;
        std::optional<LrrSolution> lrr;
        std::optional<TlrrSolution> tlrr;
        if (method == Method::lesc) {
            lrr = solve_lrr(in.X, p.lrr());
        } else {
            tlrr = solve_tensor_lrr(in.X, in.Gamma, p.tlrr());
        }
        const double solve_seconds = solve_clock.seconds();
        for (std::size_t a = 0; a < grid1.size(); ++a) {
            p.lambda1 = grid1[a];
            Stopwatch clock;
            GridPoint gp;
            gp.lambda1 = p.lambda1;
            gp.lambda2 = p.lambda2;
            gp.outcome.warnings = in.warnings;
            absorb(gp.outcome, lrr ? enhance_lesc(*lrr, in.X, in.Gamma, p.le()) : enhance_glesc(*tlrr, in.X, in.Gamma, p.le()));
            gp.outcome.wall_seconds = clock.seconds() + solve_seconds;
            gp.metrics = evaluate_dataset(truth, gp.outcome.distributions);
            if (!keep_distributions) gp.outcome.distributions.resize(0, 0);
            points[b * grid1.size() + a] = std::move(gp);
        }
    });
    // lambda1-major: one block of lambda2 values per lambda1
    std::vector<GridPoint> ordered;
    ordered.reserve(points.size());
    for (std::size_t a = 0; a < grid1.size(); ++a) {
        for (std::size_t b = 0; b < grid2.size(); ++b) ordered.push_back(std::move(points[b * grid1.size() + a]));
    }
    return ordered;
}

/// Index of the lowest-Cheb point; the first one wins ties.
inline std::size_t best_point(const std::vector<GridPoint>& points) {
    if (points.empty()) throw ArgumentError("best_point: no grid points");
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].metrics.get(Metric::cheb) < points[best].metrics.get(Metric::cheb)) best = i;
    }
    return best;
}

inline json grid_point_json(const GridPoint& gp) {
    json m;
    for (const Metric metric : kAllMetrics) m[std::string(metric_name(metric))] = gp.metrics.get(metric);
    return json{{"lambda1", gp.lambda1}, {"lambda2", gp.lambda2}, {"metrics", m}, {"result", outcome_json(gp.outcome, false)}};
}

// ---------------------------------------------------------------------------
// Commands

struct LabelSource {
    std::optional<std::string> path; ///< logical-label file; otherwise binarize D
    BinarizeStrategy strategy;
};

inline json to_json(const LabelSource& s) {
    json j = to_json(s.strategy);
    j["source"] = s.path ? "file" : "binarize";
    if (s.path) j["path"] = *s.path;
    return j;
}

inline LabelSource label_source_from_json(const json& j) {
    LabelSource s;
    s.strategy = strategy_from_json(j);
    if (j.at("source").get<std::string>() == "file") s.path = j.at("path").get<std::string>();
    return s;
}

inline Matrix logical_view(const LdlDataset& ds, const LabelSource& src) {
    if (!src.path) return binarize(ds.distributions(), src.strategy).matrix();
    Matrix L = load_logical(*src.path).matrix();
    if (L.rows() != ds.num_labels() || L.cols() != ds.num_instances()) {
        throw ArgumentError("logical labels '" + *src.path + "' do not match the dataset shape");
    }
    return L;
}

inline json dataset_json(const LdlDataset& ds, const std::string& path) {
    return json{{"path", path},
                {"name", ds.name()},
                {"features", ds.num_features()},
                {"labels", ds.num_labels()},
                {"instances", ds.num_instances()}};
}

struct EnhanceRequest {
    std::string data_path;
    LabelSource labels;
    Method method = Method::lesc;
    MethodParams params = MethodParams::defaults(Method::lesc);
    /// Tuning grids; a single value each means no tuning.
    std::vector<double> lambda1_grid{1.0};
    std::vector<double> lambda2_grid{0.1};
    std::size_t threads = 1;
};

struct EnhanceReport {
    LdlDataset recovered; ///< input features with recovered distributions
    json manifest;
    bool degraded = false;
};

/// Loads, builds the label view, optionally tunes lambda1/lambda2 by Cheb
/// against the ground truth, then runs the chosen configuration.
inline EnhanceReport run_enhance(const EnhanceRequest& req) {
    Stopwatch clock;
    const LdlDataset ds = load_dataset(req.data_path);
    const Matrix Gamma = logical_view(ds, req.labels);
    const PreparedInput in = prepare_input(ds.features(), Gamma, req.params.standardize);

    MethodParams chosen = req.params;
    json tuning = nullptr;
    const bool tune = req.method != Method::lp && (req.lambda1_grid.size() > 1 || req.lambda2_grid.size() > 1);
    if (tune) {
        const auto points = evaluate_grid(req.method, in, ds.distributions(), req.params, req.lambda1_grid,
                                          req.lambda2_grid, req.threads);
        const auto& best = points[best_point(points)];
        chosen.lambda1 = best.lambda1;
        chosen.lambda2 = best.lambda2;
        tuning = json{{"criterion", "cheb"},
                      {"lambda1_grid", req.lambda1_grid},
                      {"lambda2_grid", req.lambda2_grid},
                      {"points", json::array()}};
        for (const auto& gp : points) tuning["points"].push_back(grid_point_json(gp));
    } else if (req.method != Method::lp) {
        chosen.lambda1 = req.lambda1_grid.front();
        chosen.lambda2 = req.lambda2_grid.front();
    }

    RunOutcome run = run_method(req.method, in, chosen);
    EnhanceReport rep{LdlDataset(ds.name() + "-" + std::string(method_name(req.method)), ds.features(),
                                 run.distributions, ds.label_names()),
                      json::object(), run.degraded};
    rep.manifest = json{{"format_version", kManifestVersion},
                        {"command", "enhance"},
                        {"dataset", dataset_json(ds, req.data_path)},
                        {"labels", to_json(req.labels)},
                        {"method", method_name(req.method)},
                        {"params", to_json(chosen)},
                        {"tuning", tuning},
                        {"result", outcome_json(run, true)},
                        {"total_wall_seconds", clock.seconds()}};
    return rep;
}

/// Rebuilds the request that produced a manifest, pinned to its chosen
/// parameters (no tuning).
inline EnhanceRequest request_from_manifest(const json& m) {
    if (!m.is_object() || m.value("format_version", "") != kManifestVersion) {
        throw ArgumentError("manifest: missing or unsupported format_version");
    }
    EnhanceRequest req;
    try {
        req.data_path = m.at("dataset").at("path").get<std::string>();
        req.labels = label_source_from_json(m.at("labels"));
        req.method = parse_method(m.at("method").get<std::string>());
        req.params = params_from_json(m.at("params"));
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("manifest: ") + e.what());
    }
    req.lambda1_grid = {req.params.lambda1};
    req.lambda2_grid = {req.params.lambda2};
    return req;
}

/// Shortest text that round-trips to the same double.
inline std::string csv_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// One header row plus one row per dataset; columns follow the metric order.
inline void write_metric_csv(std::ostream& out, const std::vector<std::pair<std::string, MetricVector>>& rows) {
    out << "dataset";
    for (const Metric m : kAllMetrics) out << ',' << metric_name(m);
    out << '\n';
    for (const auto& [name, mv] : rows) {
        out << name;
        for (const Metric m : kAllMetrics) out << ',' << csv_number(mv.get(m));
        out << '\n';
    }
}

/// Long format: one row per grid point.
inline void write_sweep_csv(std::ostream& out, const std::string& dataset, Method method,
                            const std::vector<GridPoint>& points) {
    out << "dataset,method,lambda1,lambda2";
    for (const Metric m : kAllMetrics) out << ',' << metric_name(m);
    out << ",solver_iterations,solver_converged,lbfgs_iterations,wall_seconds\n";
    for (const auto& gp : points) {
        out << dataset << ',' << method_name(method) << ',' << csv_number(gp.lambda1) << ',' << csv_number(gp.lambda2);
        for (const Metric m : kAllMetrics) out << ',' << csv_number(gp.metrics.get(m));
        out << ',' << gp.outcome.solver.iterations << ',' << (gp.outcome.solver.converged ? 1 : 0) << ','
            << gp.outcome.lbfgs_iterations << ',' << csv_number(gp.outcome.wall_seconds) << '\n';
    }
}

struct BenchmarkRequest {
    std::vector<std::string> data_paths;
    std::vector<Method> methods{Method::lp, Method::lesc, Method::glesc};
    LabelSource labels;
    std::vector<double> lambda1_grid = default_tuning_grid();
    std::vector<double> lambda2_grid = default_tuning_grid();
    /// Parallel to `methods`; empty means each method's defaults.
    std::vector<MethodParams> params;
    std::size_t threads = 1;
};

struct BenchmarkCell {
    MetricVector metrics;
    json manifest;
};

struct BenchmarkReport {
    std::vector<std::string> datasets;     ///< in request order
    std::vector<Method> methods;           ///< in request order
    EvaluationReport evaluation;           ///< keyed by dataset name and method label
    std::map<std::string, std::map<std::string, BenchmarkCell>> cells;
    bool degraded = false;
};

inline BenchmarkReport run_benchmark(const BenchmarkRequest& req) {
    if (req.data_paths.empty()) throw ArgumentError("benchmark: need at least one dataset");
    if (req.methods.empty()) throw ArgumentError("benchmark: need at least one method");
    if (!req.params.empty() && req.params.size() != req.methods.size()) {
        throw ArgumentError("benchmark: params must match methods one to one");
    }
    BenchmarkReport rep;
    rep.methods = req.methods;
    for (const auto& path : req.data_paths) {
        const LdlDataset ds = load_dataset(path);
        if (std::find(rep.datasets.begin(), rep.datasets.end(), ds.name()) != rep.datasets.end()) {
            throw ArgumentError("benchmark: duplicate dataset name '" + ds.name() + "'");
        }
        rep.datasets.push_back(ds.name());
        const Matrix Gamma = logical_view(ds, req.labels);
        for (std::size_t mi = 0; mi < req.methods.size(); ++mi) {
            const Method method = req.methods[mi];
            const MethodParams base = req.params.empty() ? MethodParams::defaults(method) : req.params[mi];
            const PreparedInput in = prepare_input(ds.features(), Gamma, base.standardize);
            const auto points = evaluate_grid(method, in, ds.distributions(), base, req.lambda1_grid,
                                              req.lambda2_grid, req.threads);
            const auto& best = points[best_point(points)];
            MethodParams chosen = base;
            chosen.lambda1 = best.lambda1;
            chosen.lambda2 = best.lambda2;
            BenchmarkCell cell;
            cell.metrics = best.metrics;
            cell.manifest = json{{"format_version", kManifestVersion},
                                 {"command", "benchmark"},
                                 {"dataset", dataset_json(ds, path)},
                                 {"labels", to_json(req.labels)},
                                 {"method", method_name(method)},
                                 {"params", to_json(chosen)},
                                 {"tuning",
                                  {{"criterion", "cheb"},
                                   {"lambda1_grid", method == Method::lp ? json::array() : json(req.lambda1_grid)},
                                   {"lambda2_grid", method == Method::lp ? json::array() : json(req.lambda2_grid)},
                                   {"points", points.size()}}},
                                 {"result", outcome_json(best.outcome, false)}};
            rep.degraded = rep.degraded || best.outcome.degraded;
            const std::string label(method_label(method));
            rep.evaluation.per_dataset[ds.name()][label] = cell.metrics;
            rep.cells[ds.name()][label] = std::move(cell);
        }
    }
    compute_ranks(rep.evaluation, TiePolicy::average);
    return rep;
}

inline std::string format_fixed(double v, int digits) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

/// "value(rank)" CSV: one row per (metric, dataset) plus an Avg.Rank row per metric.
inline void write_benchmark_csv(std::ostream& out, const BenchmarkReport& rep) {
    out << "metric,dataset";
    for (const Method m : rep.methods) out << ',' << method_label(m) << ',' << method_label(m) << "_rank";
    out << '\n';
    for (const Metric metric : kAllMetrics) {
        const bool ranked = rep.evaluation.avg_rank.count(metric) > 0;
        for (const auto& ds : rep.datasets) {
            out << metric_name(metric) << ',' << ds;
            for (const Method m : rep.methods) {
                const std::string label(method_label(m));
                out << ',' << csv_number(rep.evaluation.per_dataset.at(ds).at(label).get(metric)) << ',';
                if (ranked) out << csv_number(rep.evaluation.ranks.at(ds).at(metric).at(label));
            }
            out << '\n';
        }
        out << metric_name(metric) << ",Avg.Rank";
        for (const Method m : rep.methods) {
            out << ",,";
            if (ranked) out << csv_number(rep.evaluation.avg_rank.at(metric).at(std::string(method_label(m))));
        }
        out << '\n';
    }
}

/// Aligned text in the "value(rank)" layout, one block per metric.
inline void write_benchmark_table(std::ostream& out, const BenchmarkReport& rep) {
    std::size_t name_width = std::string("Avg.Rank").size();
    for (const auto& ds : rep.datasets) name_width = std::max(name_width, ds.size());
    constexpr int cell_width = 12;
    for (const Metric metric : kAllMetrics) {
        const bool ranked = rep.evaluation.avg_rank.count(metric) > 0;
        out << metric_name(metric) << (lower_is_better(metric) ? " (lower is better)" : " (higher is better)") << '\n';
        out << std::left << std::setw(static_cast<int>(name_width)) << "Dataset";
        for (const Method m : rep.methods) out << std::right << std::setw(cell_width) << method_label(m);
        out << '\n';
        for (const auto& ds : rep.datasets) {
            out << std::left << std::setw(static_cast<int>(name_width)) << ds;
            for (const Method m : rep.methods) {
                const std::string label(method_label(m));
                std::string cell = format_fixed(rep.evaluation.per_dataset.at(ds).at(label).get(metric), 3);
                if (ranked) {
                    const double r = rep.evaluation.ranks.at(ds).at(metric).at(label);
                    cell += "(" + (r == std::floor(r) ? std::to_string(static_cast<int>(r)) : format_fixed(r, 1)) + ")";
                }
                out << std::right << std::setw(cell_width) << cell;
            }
            out << '\n';
        }
        if (ranked) {
            out << std::left << std::setw(static_cast<int>(name_width)) << "Avg.Rank";
            for (const Method m : rep.methods) {
                out << std::right << std::setw(cell_width)
                    << format_fixed(rep.evaluation.avg_rank.at(metric).at(std::string(method_label(m))), 2);
            }
            out << '\n';
        }
        out << '\n';
    }
}

inline json benchmark_manifests(const BenchmarkReport& rep) {
    json runs = json::array();
    for (const auto& ds : rep.datasets) {
        for (const Method m : rep.methods) runs.push_back(rep.cells.at(ds).at(std::string(method_label(m))).manifest);
    }
    return json{{"format_version", kManifestVersion}, {"command", "benchmark"}, {"runs", runs}};
}

struct SweepRequest {
    std::string data_path;
    Method method = Method::lesc;
    LabelSource labels;
    MethodParams params = MethodParams::defaults(Method::lesc);
    std::vector<double> lambda1_grid = default_tuning_grid();
    std::vector<double> lambda2_grid = parse_grid("logspace:1e-4:1000");
    std::size_t subsample = 0; ///< 0 keeps every instance
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct SweepReport {
    std::string dataset;
    Method method = Method::lesc;
    std::vector<GridPoint> points;
    json manifest;
    bool degraded = false;
};

inline SweepReport run_sweep(const SweepRequest& req) {
    if (req.method == Method::lp) throw ArgumentError("sweep: lp has no lambda parameters");
    Stopwatch clock;
    const LdlDataset full = load_dataset(req.data_path);
    const LdlDataset ds = subsample(full, req.subsample, req.seed);
    if (req.labels.path && req.subsample > 0 && req.subsample < static_cast<std::size_t>(full.num_instances())) {
        throw ArgumentError("sweep: --labels cannot be combined with --subsample");
    }
    const Matrix Gamma = logical_view(ds, req.labels);
    const PreparedInput in = prepare_input(ds.features(), Gamma, req.params.standardize);
    SweepReport rep;
    rep.dataset = ds.name();
    rep.method = req.method;
    rep.points = evaluate_grid(req.method, in, ds.distributions(), req.params, req.lambda1_grid, req.lambda2_grid,
                               req.threads);
    for (const auto& gp : rep.points) rep.degraded = rep.degraded || gp.outcome.degraded;
    rep.manifest = json{{"format_version", kManifestVersion},
                        {"command", "sweep"},
                        {"dataset", dataset_json(ds, req.data_path)},
                        {"subsample", {{"count", req.subsample}, {"seed", req.seed}}},
                        {"labels", to_json(req.labels)},
                        {"method", method_name(req.method)},
                        {"params", to_json(req.params)},
                        {"lambda1_grid", req.lambda1_grid},
                        {"lambda2_grid", req.lambda2_grid},
                        {"points", json::array()},
                        {"total_wall_seconds", clock.seconds()}};
    for (const auto& gp : rep.points) rep.manifest["points"].push_back(grid_point_json(gp));
    return rep;
}

} // namespace lesc::bench

#endif // LESC_BENCH_HPP
