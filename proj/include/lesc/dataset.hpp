#ifndef LESC_DATASET_HPP
#define LESC_DATASET_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lesc/types.hpp"

namespace lesc {

inline constexpr double kDistributionSumTolerance = 1e-6;

inline void check_distributions(const Matrix& D, const char* what) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
        for (Eigen::Index i = 0; i < D.rows(); ++i) {
            const double v = D(i, j);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ArgumentError(std::string(what) + ": degree outside [0, 1] at instance " + std::to_string(j));
            }
        }
        const double s = D.col(j).sum();
        if (std::abs(s - 1.0) > kDistributionSumTolerance) {
            throw ArgumentError(std::string(what) + ": instance " + std::to_string(j) + " sums to " + std::to_string(s));
        }
    }
}

/// Features (q x n) with ground-truth label distributions (o x n).
class LdlDataset {
public:
    LdlDataset(std::string name, Matrix X, Matrix D, std::vector<std::string> label_names = {})
        : name_(std::move(name)), X_(std::move(X)), D_(std::move(D)), label_names_(std::move(label_names)) {
        if (X_.cols() != D_.cols()) throw ArgumentError("dataset: features and distributions disagree on instance count");
        if (!label_names_.empty() && static_cast<Eigen::Index>(label_names_.size()) != D_.rows()) {
            throw ArgumentError("dataset: label name count does not match label count");
        }
        require_finite(X_, "dataset: features");
        check_distributions(D_, "dataset");
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const Matrix& features() const { return X_; }
    [[nodiscard]] const Matrix& distributions() const { return D_; }
    [[nodiscard]] const std::vector<std::string>& label_names() const { return label_names_; }
    [[nodiscard]] Eigen::Index num_features() const { return X_.rows(); }
    [[nodiscard]] Eigen::Index num_labels() const { return D_.rows(); }
    [[nodiscard]] Eigen::Index num_instances() const { return X_.cols(); }

private:
    std::string name_;
    Matrix X_;
    Matrix D_;
    std::vector<std::string> label_names_;
};

/// Binary o x n relevance matrix; every instance has at least one label.
class LogicalLabels {
public:
    explicit LogicalLabels(Matrix L) : L_(std::move(L)) {
        for (Eigen::Index j = 0; j < L_.cols(); ++j) {
            bool any = false;
            for (Eigen::Index i = 0; i < L_.rows(); ++i) {
                if (L_(i, j) != 0.0 && L_(i, j) != 1.0) throw ArgumentError("logical labels must be 0 or 1");
                any = any || L_(i, j) == 1.0;
            }
            if (!any) throw ArgumentError("logical labels: instance " + std::to_string(j) + " has no label");
        }
    }
    [[nodiscard]] const Matrix& matrix() const { return L_; }

private:
    Matrix L_;
};

/// 51 x 51 grid over [-1, 1]^2 (step 0.04) with a sine third feature and
/// three labels built from cubic feature responses.
inline LdlDataset generate_artificial() {
    constexpr int steps = 51;
    constexpr double m = 1.0, nq = 0.5, p = 0.2, qc = 1.0, eta1 = 0.01, eta2 = 0.01;
    const Eigen::Vector3d r1(4, 2, 1), r2(1, 2, 4), r3(1, 4, 2);
    const Eigen::Index n = steps * steps;
    Matrix X(3, n), D(3, n);
    Eigen::Index col = 0;
    for (int a = 0; a < steps; ++a) {
        for (int b = 0; b < steps; ++b, ++col) {
            const double x1 = -1.0 + 0.04 * a;
            const double x2 = -1.0 + 0.04 * b;
            const double x3 = std::sin((x1 + x2) * std::numbers::pi);
            const Eigen::Vector3d x(x1, x2, x3);
            const Eigen::Vector3d w = (m * x.array() + nq * x.array().square() + p * x.array().cube() + qc).matrix();
            const double phi1 = std::pow(r1.dot(w), 2);
            const double phi2 = std::pow(r2.dot(w) + eta1 * phi1, 2);
            const double phi3 = std::pow(r3.dot(w) + eta2 * phi2, 2);
            const double total = phi1 + phi2 + phi3;
            X.col(col) = x;
            D.col(col) << phi1 / total, phi2 / total, phi3 / total;
        }
    }
    return LdlDataset("artificial", std::move(X), std::move(D));
}

struct BinarizeStrategy {
    enum class Kind {
        greedy_cumulative, ///< mark labels by descending degree until the sum exceeds threshold
        mean_threshold,    ///< mark labels with degree >= 1/o
        top_k,             ///< mark the k largest degrees
    };
    Kind kind = Kind::greedy_cumulative;
    double threshold = 0.5;
    std::size_t k = 1;

    static BinarizeStrategy greedy(double t = 0.5) { return {Kind::greedy_cumulative, t, 1}; }
    static BinarizeStrategy mean() { return {Kind::mean_threshold, 0.5, 1}; }
    static BinarizeStrategy top(std::size_t k) { return {Kind::top_k, 0.5, k}; }
};

/// Ties in degree are broken toward the lower label index.
inline LogicalLabels binarize(const Matrix& D, const BinarizeStrategy& strategy = {}) {
    if (strategy.kind == BinarizeStrategy::Kind::top_k && strategy.k < 1) throw ArgumentError("binarize: k must be >= 1");
    const Eigen::Index o = D.rows();
    Matrix L = Matrix::Zero(o, D.cols());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(o));
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return D(a, j) > D(b, j); });
        switch (strategy.kind) {
        case BinarizeStrategy::Kind::greedy_cumulative: {
            double cum = 0.0;
            for (const Eigen::Index i : order) {
                L(i, j) = 1.0;
                cum += D(i, j);
                if (cum > strategy.threshold) break;
            }
            break;
        }
        case BinarizeStrategy::Kind::mean_threshold: {
            const double mean = 1.0 / static_cast<double>(o);
            for (Eigen::Index i = 0; i < o; ++i) L(i, j) = D(i, j) >= mean ? 1.0 : 0.0;
            L(order.front(), j) = 1.0;
            break;
        }
        case BinarizeStrategy::Kind::top_k:
            for (std::size_t t = 0; t < std::min<std::size_t>(strategy.k, order.size()); ++t) L(order[t], j) = 1.0;
            break;
        }
    }
    return LogicalLabels(std::move(L));
}

/// Per-feature z-scoring (population variance). Constant features become
/// zero; their row indices are reported through `constant_rows`.
inline Matrix standardize_features(const Matrix& X, std::vector<Eigen::Index>* constant_rows = nullptr) {
    if (X.cols() < 2) throw ArgumentError("standardize_features: need at least 2 instances");
    Matrix out(X.rows(), X.cols());
    const double n = static_cast<double>(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double mean = X.row(i).sum() / n;
        const auto centered = (X.row(i).array() - mean).eval();
        const double sd = std::sqrt(centered.square().sum() / n);
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
            out.row(i).setZero();
            if (constant_rows) constant_rows->push_back(i);
        } else {
            out.row(i) = (centered / sd).matrix();
        }
    }
    return out;
}

/// Instance subset drawn without replacement (order preserved).
inline LdlDataset subsample(const LdlDataset& ds, std::size_t count, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(ds.num_instances());
    if (count == 0 || count >= n) return ds;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates; std::shuffle's output is implementation-defined.
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    Matrix X(ds.num_features(), static_cast<Eigen::Index>(count));
    Matrix D(ds.num_labels(), static_cast<Eigen::Index>(count));
    for (std::size_t c = 0; c < count; ++c) {
        X.col(static_cast<Eigen::Index>(c)) = ds.features().col(static_cast<Eigen::Index>(idx[c]));
        D.col(static_cast<Eigen::Index>(c)) = ds.distributions().col(static_cast<Eigen::Index>(idx[c]));
    }
    return LdlDataset(ds.name() + "-sub" + std::to_string(count), std::move(X), std::move(D), ds.label_names());
}

// ---------------------------------------------------------------------------
// Text formats
//
//   #ldl q o n
//   [#labels name_1 ... name_o]
//   n lines of q feature values
//   <blank line>
//   n lines of o distribution values
//
//   #logical o n
//   n lines of o values in {0, 1}
//
// Values are whitespace separated and written with 17 significant digits.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    [[nodiscard]] std::size_t number() const { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

inline bool blank(std::string_view s) {
    return s.find_first_not_of(" \t") == std::string_view::npos;
}

inline std::vector<double> parse_row(std::string_view line, std::size_t line_no) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
        pos = line.find_first_not_of(" \t", pos);
        if (pos == std::string_view::npos) break;
        const std::size_t end = std::min(line.find_first_of(" \t", pos), line.size());
        double v = 0.0;
        const auto tok = line.substr(pos, end - pos);
        const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (r.ec != std::errc() || r.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
            throw ParseError("invalid number '" + std::string(tok) + "'", line_no);
        }
        out.push_back(v);
        pos = end;
    }
    return out;
}

inline std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream ss{std::string(line)};
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

inline Eigen::Index parse_count(const std::string& word, std::size_t line_no) {
    long long v = 0;
    const auto r = std::from_chars(word.data(), word.data() + word.size(), v);
    if (r.ec != std::errc() || r.ptr != word.data() + word.size() || v < 0) {
        throw ParseError("malformed header count '" + word + "'", line_no);
    }
    return static_cast<Eigen::Index>(v);
}

/// Fills `target` column by column; returns the line number of each row.
/// `pending` is an already-read line that belongs to the block.
inline std::vector<std::size_t> read_block(LineReader& reader, Matrix& target, Eigen::Index width, const char* what,
                                           std::optional<std::string> pending = std::nullopt) {
    std::vector<std::size_t> lines;
    std::string line;
    for (Eigen::Index c = 0; c < target.cols(); ++c) {
        std::size_t line_no = 0;
        if (pending) {
            line = std::move(*pending);
            pending.reset();
            line_no = reader.number();
        } else {
            if (!reader.next(line)) {
                throw ParseError(std::string("unexpected end of file in ") + what + " block", reader.number());
            }
            line_no = reader.number();
        }
        const auto row = parse_row(line, line_no);
        if (static_cast<Eigen::Index>(row.size()) != width) {
            throw ParseError(std::string(what) + " row has " + std::to_string(row.size()) + " values, expected " +
                                 std::to_string(width),
                             line_no);
        }
        for (Eigen::Index i = 0; i < width; ++i) target(i, c) = row[static_cast<std::size_t>(i)];
        lines.push_back(line_no);
    }
    return lines;
}

inline void expect_end(LineReader& reader) {
    std::string line;
    while (reader.next(line)) {
        if (!blank(line)) throw ParseError("trailing content after last block", reader.number());
    }
}

} // namespace detail

inline LdlDataset read_dataset(std::istream& in, std::string name) {
    detail::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty dataset file", 0);
    const auto header = detail::split_words(line);
    if (header.size() != 4 || header[0] != "#ldl") throw ParseError("expected header '#ldl q o n'", reader.number());
    const Eigen::Index q = detail::parse_count(header[1], reader.number());
    const Eigen::Index o = detail::parse_count(header[2], reader.number());
    const Eigen::Index n = detail::parse_count(header[3], reader.number());
    if (q < 1 || o < 1 || n < 1) throw ParseError("header counts must be positive", reader.number());

    std::vector<std::string> labels;
    std::optional<std::string> pending;
    if (reader.next(line)) {
        auto words = detail::split_words(line);
        if (!words.empty() && words[0] == "#labels") {
            words.erase(words.begin());
            if (static_cast<Eigen::Index>(words.size()) != o) {
                throw ParseError("#labels line needs one name per label", reader.number());
            }
            labels = std::move(words);
        } else {
            pending = std::move(line);
        }
    }

    Matrix X(q, n), D(o, n);
    detail::read_block(reader, X, q, "feature", std::move(pending));
    if (!reader.next(line) || !detail::blank(line)) {
        throw ParseError("expected blank line between feature and distribution blocks", reader.number());
    }
    const auto d_lines = detail::read_block(reader, D, o, "distribution");
    detail::expect_end(reader);

    for (Eigen::Index j = 0; j < n; ++j) {
        const std::size_t at = d_lines[static_cast<std::size_t>(j)];
        const double s = D.col(j).sum();
        if (std::abs(s - 1.0) > kDistributionSumTolerance) {
            throw ParseError("distribution sums to " + detail::format_double(s) + ", expected 1", at);
        }
        if (D.col(j).minCoeff() < 0.0 || D.col(j).maxCoeff() > 1.0) {
            throw ParseError("distribution has a degree outside [0, 1]", at);
        }
    }
    return LdlDataset(std::move(name), std::move(X), std::move(D), std::move(labels));
}

inline void write_dataset(std::ostream& out, const LdlDataset& ds) {
    out << "#ldl " << ds.num_features() << ' ' << ds.num_labels() << ' ' << ds.num_instances() << '\n';
    if (!ds.label_names().empty()) {
        out << "#labels";
        for (const auto& l : ds.label_names()) out << ' ' << l;
        out << '\n';
    }
    auto block = [&](const Matrix& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                if (i) out << ' ';
                out << detail::format_double(m(i, c));
            }
            out << '\n';
        }
    };
    block(ds.features());
    out << '\n';
    block(ds.distributions());
}

inline LdlDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
    return read_dataset(in, path.stem().string());
}

inline void save_dataset(const LdlDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_dataset(out, ds);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline LogicalLabels read_logical(std::istream& in) {
    detail::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty logical-label file", 0);
    const auto header = detail::split_words(line);
    if (header.size() != 3 || header[0] != "#logical") throw ParseError("expected header '#logical o n'", reader.number());
    const Eigen::Index o = detail::parse_count(header[1], reader.number());
    const Eigen::Index n = detail::parse_count(header[2], reader.number());
    if (o < 1 || n < 1) throw ParseError("header counts must be positive", reader.number());
    Matrix L(o, n);
    detail::read_block(reader, L, o, "label");
    detail::expect_end(reader);
    try {
        return LogicalLabels(std::move(L));
    } catch (const ArgumentError& e) {
        throw ParseError(e.what(), 0);
    }
}

inline void write_logical(std::ostream& out, const LogicalLabels& labels) {
    const Matrix& L = labels.matrix();
    out << "#logical " << L.rows() << ' ' << L.cols() << '\n';
    for (Eigen::Index c = 0; c < L.cols(); ++c) {
        for (Eigen::Index i = 0; i < L.rows(); ++i) {
            if (i) out << ' ';
            out << (L(i, c) == 1.0 ? '1' : '0');
        }
        out << '\n';
    }
}

inline LogicalLabels load_logical(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
    return read_logical(in);
}

inline void save_logical(const LogicalLabels& labels, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_logical(out, labels);
}

} // namespace lesc

#endif // LESC_DATASET_HPP
