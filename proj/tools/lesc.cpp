// Command-line front end: synth, binarize, enhance, evaluate, benchmark, sweep.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lesc/lesc.hpp"

namespace {

using namespace lesc;
using namespace lesc::bench;

struct CommonOptions {
    std::string method = "lesc";
    std::string lambda1 = "1";
    std::string lambda2 = "0.1";
    std::string sigma;
    std::optional<double> alpha;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::optional<std::size_t> lbfgs_max_iter;
    bool no_standardize = false;
    std::size_t threads = 0;
    std::optional<std::string> labels;
    std::string strategy = "greedy";
    double threshold = 0.5;
    std::size_t k = 1;
};

void add_label_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--labels", o.labels, "Logical-label file (#logical format); default binarizes the distributions");
    cmd->add_option("--strategy", o.strategy, "Binarization: greedy, mean or topk")->capture_default_str();
    cmd->add_option("--threshold", o.threshold, "Greedy cumulative threshold")->capture_default_str();
    cmd->add_option("--k", o.k, "Labels kept by topk")->capture_default_str();
}

void add_param_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--lambda1", o.lambda1, "Value or grid (a,b,c or logspace:LO:HI)")->capture_default_str();
    cmd->add_option("--lambda2", o.lambda2, "Value or grid (a,b,c or logspace:LO:HI)")->capture_default_str();
    cmd->add_option("--sigma", o.sigma, "Kernel width: 'mean' or a positive value (default: mean; lp: 1)");
    cmd->add_option("--alpha", o.alpha, "lp propagation weight in (0, 1) (default 0.5)");
    cmd->add_option("--tol", o.tol, "ALM tolerance (default 1e-6)");
    cmd->add_option("--max-iter", o.max_iter, "ALM iteration cap (default 500)");
    cmd->add_option("--lbfgs-max-iter", o.lbfgs_max_iter, "L-BFGS iteration cap (default 200)");
    cmd->add_flag("--no-standardize", o.no_standardize, "Use raw features");
    cmd->add_option("--threads", o.threads, "Worker threads (default: LESC_THREADS or all cores)");
}

LabelSource label_source(const CommonOptions& o) {
    return LabelSource{o.labels, parse_strategy(o.strategy, o.threshold, o.k)};
}

MethodParams build_params(Method method, const CommonOptions& o) {
    MethodParams p = MethodParams::defaults(method);
    if (!o.sigma.empty()) p.kernel = o.sigma == "mean" ? KernelConfig::mean_distance() : KernelConfig::fixed(parse_positive(o.sigma, "--sigma"));
    if (o.alpha) p.alpha = *o.alpha;
    if (o.tol) p.tol = *o.tol;
    if (o.max_iter) p.max_iter = *o.max_iter;
    if (o.lbfgs_max_iter) p.lbfgs.max_iter = *o.lbfgs_max_iter;
    p.standardize = !o.no_standardize;
    // Validate up front so bad flags surface as argument errors.
    p.kernel.validate();
    p.lbfgs.validate();
    if (method == Method::lp && !(p.alpha > 0.0 && p.alpha < 1.0)) throw ArgumentError("--alpha must lie in (0, 1)");
    if (method == Method::lesc) p.lrr().validate();
    if (method == Method::glesc) p.tlrr().validate();
    return p;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    return out;
}

void write_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

int finish(bool degraded) {
    if (degraded) {
        std::cerr << "lesc: warning: degraded convergence (see manifest)\n";
        return static_cast<int>(ExitCode::degraded);
    }
    return static_cast<int>(ExitCode::ok);
}

int run(int argc, char** argv) {
    CLI::App app{"Label enhancement with sample correlations"};
    app.require_subcommand(1);

    std::string out_path, data_path, manifest_path, truth_path, recovered_path, replay_path, methods = "lp,lesc,glesc";
    std::vector<std::string> data_paths;
    std::size_t subsample_count = 0;
    std::uint64_t seed = 0;
    CommonOptions opts;

    auto* synth = app.add_subcommand("synth", "Write the artificial dataset");
    synth->add_option("--out", out_path, "Output #ldl file")->required();

    auto* bin = app.add_subcommand("binarize", "Derive logical labels from distributions");
    bin->add_option("--data", data_path, "Input #ldl file")->required();
    bin->add_option("--out", out_path, "Output #logical file")->required();
    bin->add_option("--strategy", opts.strategy, "greedy, mean or topk")->capture_default_str();
    bin->add_option("--threshold", opts.threshold, "Greedy cumulative threshold")->capture_default_str();
    bin->add_option("--k", opts.k, "Labels kept by topk")->capture_default_str();

    auto* enh = app.add_subcommand("enhance", "Recover label distributions");
    enh->add_option("--data", data_path, "Input #ldl file");
    enh->add_option("--method", opts.method, "lp, lesc or glesc")->capture_default_str();
    enh->add_option("--out", out_path, "Output #ldl file holding the recovered distributions")->required();
    enh->add_option("--manifest", manifest_path, "Run manifest (JSON)");
    enh->add_option("--replay", replay_path, "Re-run the configuration recorded in a manifest");
    add_param_flags(enh, opts);
    add_label_flags(enh, opts);

    auto* ev = app.add_subcommand("evaluate", "Score recovered distributions against ground truth");
    ev->add_option("--truth", truth_path, "Ground-truth #ldl file")->required();
    ev->add_option("--recovered", recovered_path, "Recovered #ldl file")->required();
    ev->add_option("--out", out_path, "CSV report (default: stdout)");

    auto* bm = app.add_subcommand("benchmark", "Tune and compare methods across datasets");
    bm->add_option("--data", data_paths, "Input #ldl files")->required();
    bm->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
    bm->add_option("--out", out_path, "Output prefix: writes PREFIX.csv and PREFIX.txt")->required();
    bm->add_option("--manifest", manifest_path, "Run manifests (default PREFIX.manifest.json)");
    add_param_flags(bm, opts);
    add_label_flags(bm, opts);
    bm->get_option("--lambda1")->default_str("logspace:1e-4:10");
    bm->get_option("--lambda2")->default_str("logspace:1e-4:10");

    auto* sw = app.add_subcommand("sweep", "Metric values over a lambda1 x lambda2 grid");
    sw->add_option("--data", data_path, "Input #ldl file")->required();
    sw->add_option("--method", opts.method, "lesc or glesc")->capture_default_str();
    sw->add_option("--out", out_path, "Long-format CSV")->required();
    sw->add_option("--manifest", manifest_path, "Run manifest (JSON)");
    sw->add_option("--subsample", subsample_count, "Random instance subset size (0 keeps all)");
    sw->add_option("--seed", seed, "Subsample seed")->capture_default_str();
    add_param_flags(sw, opts);
    add_label_flags(sw, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::argument);
    }

    if (synth->parsed()) {
        save_dataset(generate_artificial(), out_path);
        return 0;
    }
    if (bin->parsed()) {
        const auto ds = load_dataset(data_path);
        auto out = open_out(out_path);
        write_logical(out, binarize(ds.distributions(), parse_strategy(opts.strategy, opts.threshold, opts.k)));
        return 0;
    }
    if (enh->parsed()) {
        EnhanceRequest req;
        if (!replay_path.empty()) {
            std::ifstream in(replay_path);
            if (!in) throw ArgumentError("cannot open manifest '" + replay_path + "'");
            json m;
            try {
                m = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ParseError(std::string("manifest: ") + e.what(), 0);
            }
            req = request_from_manifest(m);
            if (!data_path.empty()) req.data_path = data_path;
        } else {
            if (data_path.empty()) throw ArgumentError("enhance: --data or --replay is required");
            req.data_path = data_path;
            req.method = parse_method(opts.method);
            req.params = build_params(req.method, opts);
            req.labels = label_source(opts);
            req.lambda1_grid = parse_grid(opts.lambda1, "--lambda1");
            req.lambda2_grid = parse_grid(opts.lambda2, "--lambda2");
        }
        req.threads = resolve_threads(opts.threads);
        const auto rep = run_enhance(req);
        save_dataset(rep.recovered, out_path);
        if (!manifest_path.empty()) write_json(manifest_path, rep.manifest);
        return finish(rep.degraded);
    }
    if (ev->parsed()) {
        const auto truth = load_dataset(truth_path);
        const auto rec = load_dataset(recovered_path);
        const auto mv = evaluate_dataset(truth.distributions(), rec.distributions());
        std::vector<std::pair<std::string, MetricVector>> rows{{truth.name(), mv}};
        if (out_path.empty()) {
            write_metric_csv(std::cout, rows);
        } else {
            auto out = open_out(out_path);
            write_metric_csv(out, rows);
        }
        return 0;
    }
    if (bm->parsed()) {
        BenchmarkRequest req;
        req.data_paths = data_paths;
        req.methods = parse_methods(methods);
        req.labels = label_source(opts);
        if (bm->get_option("--lambda1")->count() > 0) req.lambda1_grid = parse_grid(opts.lambda1, "--lambda1");
        if (bm->get_option("--lambda2")->count() > 0) req.lambda2_grid = parse_grid(opts.lambda2, "--lambda2");
        req.threads = resolve_threads(opts.threads);
        for (const Method m : req.methods) req.params.push_back(build_params(m, opts));
        const BenchmarkReport rep = run_benchmark(req);
        {
            auto csv = open_out(out_path + ".csv");
            write_benchmark_csv(csv, rep);
            auto txt = open_out(out_path + ".txt");
            write_benchmark_table(txt, rep);
        }
        write_json(manifest_path.empty() ? out_path + ".manifest.json" : manifest_path, benchmark_manifests(rep));
        write_benchmark_table(std::cout, rep);
        return finish(rep.degraded);
    }
    if (sw->parsed()) {
        SweepRequest req;
        req.data_path = data_path;
        req.method = parse_method(opts.method);
        req.params = build_params(req.method, opts);
        req.labels = label_source(opts);
        req.lambda1_grid = parse_grid(sw->get_option("--lambda1")->count() ? opts.lambda1 : "logspace:1e-4:10", "--lambda1");
        req.lambda2_grid = parse_grid(sw->get_option("--lambda2")->count() ? opts.lambda2 : "logspace:1e-4:1000", "--lambda2");
        req.subsample = subsample_count;
        req.seed = seed;
        req.threads = resolve_threads(opts.threads);
        const auto rep = run_sweep(req);
        {
            auto out = open_out(out_path);
            write_sweep_csv(out, rep.dataset, rep.method, rep.points);
        }
        if (!manifest_path.empty()) write_json(manifest_path, rep.manifest);
        return finish(rep.degraded);
    }
    return static_cast<int>(ExitCode::argument);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const lesc::ParseError& e) {
        std::cerr << "lesc: parse error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::parse);
    } catch (const lesc::ArgumentError& e) {
        std::cerr << "lesc: error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::argument);
    } catch (const lesc::NumericalError& e) {
        std::cerr << "lesc: numerical failure: " << e.what() << '\n';
        return static_cast<int>(ExitCode::numerical);
    } catch (const std::exception& e) {
        std::cerr << "lesc: internal error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::numerical);
    }
}
