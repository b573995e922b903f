#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mhkelm/error.hpp"
#include "mhkelm/normalize.hpp"
#include "mhkelm/random.hpp"

namespace mhkelm {

struct Dataset {
    std::string name;
    Eigen::MatrixXd features;              // N x D
    std::vector<int> labels;               // indices into label_map
    std::vector<std::string> label_map;    // ordered distinct class labels
    std::vector<std::string> feature_names;

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index attribute_count() const { return features.cols(); }
    int category_count() const { return static_cast<int>(label_map.size()); }

    void validate() const {
        if (static_cast<Eigen::Index>(labels.size()) != features.rows())
            throw ShapeError("dataset '" + name + "': " + std::to_string(labels.size()) + " labels for " +
                             std::to_string(features.rows()) + " rows");
        if (label_map.size() < 2) throw ConfigError("dataset '" + name + "': need at least 2 classes");
        for (int l : labels)
            if (l < 0 || l >= category_count()) throw ConfigError("dataset '" + name + "': label index out of range");
        if (!features.allFinite()) throw ConfigError("dataset '" + name + "': non-finite feature values");
    }

    friend bool operator==(const Dataset& x, const Dataset& y) {
        return x.name == y.name && x.features.rows() == y.features.rows() && x.features.cols() == y.features.cols() &&
               x.features == y.features && x.labels == y.labels && x.label_map == y.label_map &&
               x.feature_names == y.feature_names;
    }
};

// Label column selected by zero-based index or by header name.
struct LabelColumn {
    std::optional<int> index;
    std::string name;

    static LabelColumn at(int i) { return {i, {}}; }
    static LabelColumn named(std::string n) { return {std::nullopt, std::move(n)}; }

    // Digits-only text selects by index.
    static LabelColumn parse(const std::string& text) {
        if (!text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); }))
            return at(std::stoi(text));
        return named(text);
    }
};

struct CsvOptions {
    std::optional<bool> has_header;     // nullopt: header iff the first row has a non-numeric feature cell
    char delimiter = ',';               // ' ' splits on any run of whitespace
    std::vector<int> categorical;       // feature columns encoded as sorted-category ordinals
    std::vector<int> drop;              // columns ignored entirely
    std::vector<double> label_bin_edges; // numeric label -> number of edges below it
    int label_quantile_bins = 0;         // numeric label -> equal-frequency bins
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n\"'");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n\"'");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    if (delim == ' ') {
        std::istringstream is(line);
        std::string tok;
        while (is >> tok) out.push_back(trim(tok));
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Sorted distinct values; numeric order when every value parses as a number.
inline std::vector<std::string> ordered_categories(const std::vector<std::string>& values) {
    std::set<std::string> distinct(values.begin(), values.end());
    std::vector<std::string> cats(distinct.begin(), distinct.end());
    const bool numeric = std::all_of(cats.begin(), cats.end(), [](const std::string& c) { return parse_number(c).has_value(); });
    if (numeric)
        std::stable_sort(cats.begin(), cats.end(),
                         [](const std::string& x, const std::string& y) { return *parse_number(x) < *parse_number(y); });
    return cats;
}

inline std::string location(const std::string& source, std::size_t row, std::size_t col) {
    return source + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

} // namespace detail

inline Dataset parse_csv(std::istream& in, const LabelColumn& label_col, const CsvOptions& opt = {},
                         const std::string& source = "<csv>") {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_no;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (detail::trim(line).empty()) continue;
        rows.push_back(detail::split_fields(line, opt.delimiter));
        line_no.push_back(ln);
    }
    if (rows.empty()) throw ParseError(source + ": empty file");
    const std::size_t ncol = rows.front().size();
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != ncol)
            throw ParseError(source + ": row " + std::to_string(line_no[r]) + " has " + std::to_string(rows[r].size()) +
                             " fields, expected " + std::to_string(ncol));

    auto is_feature = [&](std::size_t c, int label_idx) {
        return static_cast<int>(c) != label_idx &&
               std::find(opt.drop.begin(), opt.drop.end(), static_cast<int>(c)) == opt.drop.end();
    };
    auto is_categorical = [&](std::size_t c) {
        return std::find(opt.categorical.begin(), opt.categorical.end(), static_cast<int>(c)) != opt.categorical.end();
    };

    // Header detection needs a provisional label index.
    bool header = false;
    if (opt.has_header) {
        header = *opt.has_header;
    } else if (!label_col.index) {
        header = true;
    } else {
        for (std::size_t c = 0; c < ncol; ++c)
            if (is_feature(c, *label_col.index) && !is_categorical(c) && !detail::parse_number(rows[0][c])) header = true;
    }

    int label_idx = -1;
    if (label_col.index) {
        label_idx = *label_col.index;
    } else {
        if (!header) throw ParseError(source + ": label column '" + label_col.name + "' requested by name but file has no header");
        const auto it = std::find(rows[0].begin(), rows[0].end(), label_col.name);
        if (it == rows[0].end()) throw ParseError(source + ": unknown label column '" + label_col.name + "'");
        label_idx = static_cast<int>(it - rows[0].begin());
    }
    if (label_idx < 0 || static_cast<std::size_t>(label_idx) >= ncol)
        throw ParseError(source + ": label column " + std::to_string(label_idx) + " out of range (file has " +
                         std::to_string(ncol) + " columns)");

    const std::size_t first = header ? 1 : 0;
    const std::size_t n = rows.size() - first;
    if (n < 2) throw ParseError(source + ": need at least 2 data rows");

    std::vector<std::size_t> feat_cols;
    for (std::size_t c = 0; c < ncol; ++c)
        if (is_feature(c, label_idx)) feat_cols.push_back(c);
    if (feat_cols.empty()) throw ParseError(source + ": no feature columns");

    Dataset ds;
    ds.name = std::filesystem::path(source).stem().string();
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feat_cols.size()));
    for (std::size_t j = 0; j < feat_cols.size(); ++j)
        ds.feature_names.push_back(header ? rows[0][feat_cols[j]] : "f" + std::to_string(feat_cols[j]));

    for (std::size_t j = 0; j < feat_cols.size(); ++j) {
        const std::size_t c = feat_cols[j];
        if (is_categorical(c)) {
            std::vector<std::string> vals;
            for (std::size_t r = first; r < rows.size(); ++r) vals.push_back(rows[r][c]);
            const auto cats = detail::ordered_categories(vals);
            for (std::size_t r = first; r < rows.size(); ++r)
                ds.features(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(j)) =
                    static_cast<double>(std::find(cats.begin(), cats.end(), rows[r][c]) - cats.begin());
            continue;
        }
        for (std::size_t r = first; r < rows.size(); ++r) {
            const auto v = detail::parse_number(rows[r][c]);
            if (!v)
                throw ParseError(detail::location(source, line_no[r], c) + ": non-numeric feature value '" + rows[r][c] + "'");
            ds.features(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(j)) = *v;
        }
    }

    std::vector<std::string> raw_labels;
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r][static_cast<std::size_t>(label_idx)].empty())
            throw ParseError(detail::location(source, line_no[r], static_cast<std::size_t>(label_idx)) + ": empty label");
        raw_labels.push_back(rows[r][static_cast<std::size_t>(label_idx)]);
    }

    if (!opt.label_bin_edges.empty() || opt.label_quantile_bins > 0) {
        std::vector<double> y;
        for (std::size_t i = 0; i < raw_labels.size(); ++i) {
            const auto v = detail::parse_number(raw_labels[i]);
            if (!v)
                throw ParseError(detail::location(source, line_no[i + first], static_cast<std::size_t>(label_idx)) +
                                 ": binned label must be numeric, got '" + raw_labels[i] + "'");
            y.push_back(*v);
        }
        std::vector<double> edges = opt.label_bin_edges;
        if (edges.empty()) {
            std::vector<double> sorted = y;
            std::sort(sorted.begin(), sorted.end());
            for (int k = 1; k < opt.label_quantile_bins; ++k)
                edges.push_back(sorted[sorted.size() * static_cast<std::size_t>(k) / static_cast<std::size_t>(opt.label_quantile_bins)]);
        }
        // Quantile edges are inclusive lower bounds of the next bin.
        const bool inclusive = opt.label_bin_edges.empty();
        for (std::size_t i = 0; i < y.size(); ++i) {
            int bin = 0;
            for (double e : edges) bin += inclusive ? (y[i] >= e) : (y[i] > e);
            raw_labels[i] = "bin" + std::to_string(bin);
        }
    }

    ds.label_map = detail::ordered_categories(raw_labels);
    ds.labels.reserve(n);
    for (const auto& l : raw_labels)
        ds.labels.push_back(static_cast<int>(std::find(ds.label_map.begin(), ds.label_map.end(), l) - ds.label_map.begin()));
    ds.validate();
    return ds;
}

inline Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_col, const CsvOptions& opt = {}) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_csv(in, label_col, opt, path.string());
}

// Header row, features with 17 significant digits, label text last.
inline void write_csv(const Dataset& ds, std::ostream& out) {
    for (const auto& f : ds.feature_names) out << f << ',';
    out << "label\n";
    char buf[40];
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.features(i, j));
            out << buf << ',';
        }
        out << ds.label_map[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])] << '\n';
    }
}

inline Dataset subset(const Dataset& ds, std::span<const std::size_t> rows) {
    Dataset out;
    out.name = ds.name;
    out.label_map = ds.label_map;
    out.feature_names = ds.feature_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(ds.labels[rows[i]]);
    }
    return out;
}

struct SplitPlan {
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::uint64_t seed = 0;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    // FNV-1a over both index lists; equal hashes identify the same split.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xffU;
                h *= 1099511628211ULL;
            }
        };
        for (auto i : train) mix(i);
        mix(~0ULL);
        for (auto i : test) mix(i);
        return h;
    }
};

// Seeded permutation; first train_count indices train, next test_count test.
inline SplitIndices split_indices(std::size_t n, const SplitPlan& plan) {
    if (plan.train_count < 1 || plan.test_count < 1)
        throw ConfigError("split plan needs at least one training and one test row");
    if (plan.train_count + plan.test_count > n)
        throw ConfigError("split plan " + std::to_string(plan.train_count) + "+" + std::to_string(plan.test_count) +
                          " exceeds dataset size " + std::to_string(n));
    const auto perm = random_permutation(n, plan.seed);
    SplitIndices s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(plan.train_count));
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(plan.train_count),
                  perm.begin() + static_cast<std::ptrdiff_t>(plan.train_count + plan.test_count));
    return s;
}

inline std::pair<Dataset, Dataset> random_split(const Dataset& ds, const SplitPlan& plan) {
    const auto idx = split_indices(static_cast<std::size_t>(ds.size()), plan);
    return {subset(ds, idx.train), subset(ds, idx.test)};
}

inline Normalizer fit_normalizer(const Dataset& train) { return Normalizer::fit(train.features); }

inline Eigen::MatrixXd apply_normalizer(const Normalizer& stats, const Eigen::MatrixXd& X) { return stats.apply(X); }

} // namespace mhkelm
