#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "mhkelm/data.hpp"
#include "mhkelm/elm.hpp"
#include "mhkelm/error.hpp"
#include "mhkelm/kelm.hpp"
#include "mhkelm/stats.hpp"

namespace mhkelm {

enum class Algo { MhwKelm, GaussKelm, PolyKelm, OriginalElm };

inline const char* algo_name(Algo a) {
    switch (a) {
    case Algo::MhwKelm: return "MHW-KELM";
    case Algo::GaussKelm: return "Gauss-KELM";
    case Algo::PolyKelm: return "Poly-KELM";
    case Algo::OriginalElm: return "Original-ELM";
    }
    return "?";
}

// Short tag used on the command line.
inline const char* algo_tag(Algo a) {
    switch (a) {
    case Algo::MhwKelm: return "mhw";
    case Algo::GaussKelm: return "gauss";
    case Algo::PolyKelm: return "poly";
    case Algo::OriginalElm: return "elm";
    }
    return "?";
}

inline Algo parse_algo(std::string_view tag) {
    for (Algo a : {Algo::MhwKelm, Algo::GaussKelm, Algo::PolyKelm, Algo::OriginalElm})
        if (tag == algo_tag(a)) return a;
    throw ConfigError("unknown algorithm '" + std::string(tag) + "' (expected mhw, gauss, poly, elm)");
}

struct AlgoConfig {
    Algo algo = Algo::MhwKelm;
    double C = 1.0;
    double width = 1.0; // a for MHW, sigma for Gauss
    int degree = 2;
    double hidden_frac = 1.0; // original ELM: L = hidden_frac * training rows

    bool is_kernel() const { return algo != Algo::OriginalElm; }

    KernelSpec kernel() const {
        switch (algo) {
        case Algo::MhwKelm: return KernelSpec::mexican_hat(width);
        case Algo::GaussKelm: return KernelSpec::gauss(width);
        case Algo::PolyKelm: return KernelSpec::poly(degree);
        case Algo::OriginalElm: break;
        }
        throw UsageError("original ELM has no kernel");
    }

    int hidden_nodes(std::size_t train_rows) const {
        if (!(hidden_frac > 0.0)) throw ConfigError("hidden fraction must be positive");
        return std::max(1, static_cast<int>(std::lround(hidden_frac * static_cast<double>(train_rows))));
    }

    void validate() const {
        check_penalty(C);
        if (is_kernel()) kernel().validate();
        else if (!(hidden_frac > 0.0) || !std::isfinite(hidden_frac)) throw ConfigError("hidden fraction must be positive");
    }

    // e.g. "a=0.5 C=32"
    std::string describe() const {
        char buf[96];
        switch (algo) {
        case Algo::MhwKelm: std::snprintf(buf, sizeof buf, "a=%g C=%g", width, C); break;
        case Algo::GaussKelm: std::snprintf(buf, sizeof buf, "sigma=%g C=%g", width, C); break;
        case Algo::PolyKelm: std::snprintf(buf, sizeof buf, "d=%d C=%g", degree, C); break;
        case Algo::OriginalElm: std::snprintf(buf, sizeof buf, "L=%g*N C=%g", hidden_frac, C); break;
        }
        return buf;
    }
};

struct TrialOutput {
    std::vector<int> predicted; // label indices for the test rows
    double train_seconds = 0.0; // training only; tuning and prediction excluded
    std::string params;         // hyperparameters actually used
};

using TrialFn = std::function<TrialOutput(const Dataset& train, const Dataset& test, std::uint64_t seed)>;

namespace detail {

inline std::vector<int> all_classes(const Dataset& ds) {
    std::vector<int> c(static_cast<std::size_t>(ds.category_count()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<int>(i);
    return c;
}

template <typename F>
double seconds_of(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

inline TrialFn trial_fn(const AlgoConfig& cfg) {
    cfg.validate();
    return [cfg](const Dataset& train, const Dataset& test, std::uint64_t seed) {
        TrialOutput out;
        out.params = cfg.describe();
        if (cfg.is_kernel()) {
            KelmModel model;
            out.train_seconds = detail::seconds_of([&] {
                model = train_kelm_indexed(train.features, train.labels, detail::all_classes(train), cfg.kernel(), cfg.C);
            });
            out.predicted = classify_multiclass(model, test.features);
            return out;
        }
        ElmModel model;
        const int hidden = cfg.hidden_nodes(static_cast<std::size_t>(train.size()));
        out.train_seconds = detail::seconds_of([&] {
            model = train_elm_indexed(train.features, train.labels, detail::all_classes(train), hidden, cfg.C, seed);
        });
        out.predicted = predict_elm(model, test.features);
        return out;
    };
}

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t split_hash = 0;
    bool ok = false;
    double accuracy = 0.0;   // fraction in [0, 1]
    double train_time = 0.0; // seconds
    std::string params;      // hyperparameters used
    std::string error;       // set when !ok
};

inline double accuracy_of(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size() || truth.empty())
        throw ShapeError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(truth.size()) + " rows");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

// Trial k splits with seed base_seed + k and passes the same seed to the
// trainer. Results are stored by trial index, so the output does not depend on
// `jobs`. Library errors mark a trial failed; they are never dropped.
inline std::vector<TrialResult> run_trials(const Dataset& ds, const SplitPlan& plan, const TrialFn& fn, int n_trials,
                                           std::uint64_t base_seed, int jobs = 1) {
    if (n_trials < 2) throw ConfigError("run_trials: need at least 2 trials, got " + std::to_string(n_trials));
    if (jobs < 1) throw ConfigError("run_trials: jobs must be >= 1");
    ds.validate();
    split_indices(static_cast<std::size_t>(ds.size()), {plan.train_count, plan.test_count, base_seed});

    std::vector<TrialResult> results(static_cast<std::size_t>(n_trials));
    auto run_one = [&](int k) {
        TrialResult& r = results[static_cast<std::size_t>(k)];
        r.trial = k;
        r.seed = base_seed + static_cast<std::uint64_t>(k);
        const auto idx = split_indices(static_cast<std::size_t>(ds.size()), {plan.train_count, plan.test_count, r.seed});
        r.split_hash = idx.hash();
        const Dataset train = subset(ds, idx.train);
        const Dataset test = subset(ds, idx.test);
        try {
            const auto out = fn(train, test, r.seed);
            r.train_time = out.train_seconds;
            r.params = out.params;
            r.accuracy = accuracy_of(out.predicted, test.labels);
            r.ok = true;
        } catch (const Error& e) {
            r.ok = false;
            r.error = e.what();
        }
    };

    if (jobs == 1) {
        for (int k = 0; k < n_trials; ++k) run_one(k);
        return results;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, n_trials); ++t) {
        pool.emplace_back([&] {
            for (int k = next++; k < n_trials; k = next++) {
                try {
                    run_one(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

inline std::vector<TrialResult> run_trials(const Dataset& ds, const SplitPlan& plan, const AlgoConfig& cfg, int n_trials,
                                           std::uint64_t base_seed, int jobs = 1) {
    return run_trials(ds, plan, trial_fn(cfg), n_trials, base_seed, jobs);
}

// ---- grid search ----

struct SearchGrids {
    std::vector<double> C;
    std::vector<double> width; // a or sigma
    std::vector<int> degree;
};

// C in 2^-5, 2^-3, ..., 2^19; a and sigma in 2^-3 .. 2^3; d in {1, 2, 3}.
inline SearchGrids default_grids() {
    SearchGrids g;
    for (int e = -5; e <= 20; e += 2) g.C.push_back(std::ldexp(1.0, e));
    for (int e = -3; e <= 3; ++e) g.width.push_back(std::ldexp(1.0, e));
    g.degree = {1, 2, 3};
    return g;
}

struct GridResult {
    AlgoConfig best;
    double score = -1.0;   // mean validation accuracy of `best`
    int points = 0;        // grid points evaluated
    int failed_points = 0; // points whose solve failed on some split
};

inline constexpr int kValidationSplits = 5;
inline constexpr double kValidationTrainFraction = 0.7;

// Mean accuracy over kValidationSplits 70/30 splits of `train` (seeds
// seed + 1000 + v). Ties keep the smallest C, then the smallest width or
// degree. Kernel and hidden-layer matrices are shared across C values.
inline GridResult grid_search(const Dataset& train, const AlgoConfig& base, const SearchGrids& grids, std::uint64_t seed) {
    train.validate();
    if (grids.C.empty()) throw ConfigError("grid_search: empty C grid");
    const bool uses_width = base.algo == Algo::MhwKelm || base.algo == Algo::GaussKelm;
    if (uses_width && grids.width.empty()) throw ConfigError("grid_search: empty width grid");
    if (base.algo == Algo::PolyKelm && grids.degree.empty()) throw ConfigError("grid_search: empty degree grid");
    for (double c : grids.C) check_penalty(c);

    std::vector<double> Cs = grids.C;
    std::sort(Cs.begin(), Cs.end());
    std::vector<AlgoConfig> params; // one per non-C grid point, ascending
    if (uses_width) {
        auto w = grids.width;
        std::sort(w.begin(), w.end());
        for (double v : w) {
            AlgoConfig c = base;
            c.width = v;
            params.push_back(c);
        }
    } else if (base.algo == Algo::PolyKelm) {
        auto d = grids.degree;
        std::sort(d.begin(), d.end());
        for (int v : d) {
            AlgoConfig c = base;
            c.degree = v;
            params.push_back(c);
        }
    } else {
        params.push_back(base);
    }
    for (auto& p : params) p.validate();

    const auto n = static_cast<std::size_t>(train.size());
    const auto n_fit = static_cast<std::size_t>(std::lround(kValidationTrainFraction * static_cast<double>(n)));
    if (n_fit < 1 || n_fit >= n) throw ConfigError("grid_search: training portion too small to split");
    const auto classes = detail::all_classes(train);
    const int M = train.category_count();

    // correct[p][c] = validation hits summed over splits; failed marks any failure
    std::vector<std::vector<double>> correct(params.size(), std::vector<double>(Cs.size(), 0.0));
    std::vector<std::vector<char>> failed(params.size(), std::vector<char>(Cs.size(), 0));
    double total = 0.0;

    for (int v = 0; v < kValidationSplits; ++v) {
        const std::uint64_t vseed = seed + 1000 + static_cast<std::uint64_t>(v);
        const auto idx = split_indices(n, {n_fit, n - n_fit, vseed});
        const Dataset fit = subset(train, idx.train);
        const Dataset val = subset(train, idx.test);
        total += static_cast<double>(val.size());
        const Normalizer norm = Normalizer::fit(fit.features);
        const Eigen::MatrixXd xf = norm.apply(fit.features);
        const Eigen::MatrixXd xv = norm.apply(val.features);
        const Eigen::MatrixXd T = one_hot_targets(fit.labels, M);

        for (std::size_t p = 0; p < params.size(); ++p) {
            Eigen::MatrixXd K, Kq, H, Hq;
            if (params[p].is_kernel()) {
                K = gram_matrix(params[p].kernel(), xf).values;
                Kq = cross_kernel_matrix(params[p].kernel(), xf, xv);
            } else {
                const auto layer = init_hidden_layer(static_cast<int>(xf.cols()), params[p].hidden_nodes(n_fit), vseed);
                H = hidden_output_matrix(layer, xf);
                Hq = hidden_output_matrix(layer, xv);
            }
            for (std::size_t c = 0; c < Cs.size(); ++c) {
                try {
                    Eigen::MatrixXd out;
                    if (params[p].is_kernel()) {
                        auto s = solve_regularized(K, T, Cs[c], params[p].kernel().describe());
                        if (s.relative_residual > kResidualTolerance) throw NumericError("residual");
                        out = Kq * s.solution;
                    } else {
                        auto w = solve_output_weights(H, T, Cs[c]);
                        if (w.relative_residual > kResidualTolerance) throw NumericError("residual");
                        out = Hq * w.beta;
                    }
                    for (Eigen::Index i = 0; i < out.rows(); ++i)
                        correct[p][c] += argmax_lowest(out.row(i)) == val.labels[static_cast<std::size_t>(i)];
                } catch (const Error&) {
                    failed[p][c] = 1;
                }
            }
        }
    }

    GridResult r;
    for (std::size_t c = 0; c < Cs.size(); ++c) {
        for (std::size_t p = 0; p < params.size(); ++p) {
            ++r.points;
            if (failed[p][c]) {
                ++r.failed_points;
                continue;
            }
            const double score = correct[p][c] / total;
            if (score > r.score) {
                r.score = score;
                r.best = params[p];
                r.best.C = Cs[c];
            }
        }
    }
    if (r.score < 0.0) throw NumericError("grid_search: every grid point failed for " + std::string(algo_name(base.algo)));
    return r;
}

// Nested tuning: each trial grid-searches on its own training portion with
// the trial seed, then trains on that whole portion with the winner.
inline TrialFn tuned_trial_fn(const AlgoConfig& base, const SearchGrids& grids) {
    base.validate();
    return [base, grids](const Dataset& train, const Dataset& test, std::uint64_t seed) {
        const auto chosen = grid_search(train, base, grids, seed).best;
        return trial_fn(chosen)(train, test, seed);
    };
}

enum class Tuning {
    None,     // use the given hyperparameters
    Once,     // grid search on the training portion of trial 0, reused by every trial
    PerTrial, // grid search inside every trial
};

inline const char* tuning_name(Tuning t) {
    switch (t) {
    case Tuning::None: return "none";
    case Tuning::Once: return "once";
    case Tuning::PerTrial: return "per-trial";
    }
    return "?";
}

inline Tuning parse_tuning(std::string_view s) {
    for (Tuning t : {Tuning::None, Tuning::Once, Tuning::PerTrial})
        if (s == tuning_name(t)) return t;
    throw ConfigError("unknown tuning mode '" + std::string(s) + "' (expected none, once, per-trial)");
}

// ---- reports ----

struct ReportRow {
    AlgoConfig config; // the tuning base when tuning is PerTrial
    Tuning tuning = Tuning::None;
    std::vector<TrialResult> trials;
    double mean_accuracy = 0.0; // percent, over successful trials
    double std_accuracy = 0.0;  // percent, sample standard deviation
    double p_value = 1.0;       // paired against the best row; NaN if not computable
    double mean_time = 0.0;     // seconds
    int failures = 0;
};

struct BenchmarkReport {
    std::string dataset;
    SplitPlan plan;
    int n_trials = 0;
    std::uint64_t base_seed = 0;
    std::vector<ReportRow> rows;
    std::size_t best = 0;
    bool paired = true; // every algorithm saw the same split at each trial index
};

inline bool pairing_holds(const std::vector<ReportRow>& rows) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].trials.size() != rows[0].trials.size()) return false;
        for (std::size_t k = 0; k < rows[0].trials.size(); ++k)
            if (rows[r].trials[k].split_hash != rows[0].trials[k].split_hash) return false;
    }
    return true;
}

// Fills the aggregate fields of each row, picks the best mean (first on ties)
// and computes paired p-values against it over trials where both succeeded.
inline void summarize(BenchmarkReport& report) {
    if (report.rows.empty()) throw UsageError("benchmark report has no rows");
    for (auto& row : report.rows) {
        std::vector<double> acc, times;
        row.failures = 0;
        for (const auto& t : row.trials) {
            if (!t.ok) {
                ++row.failures;
                continue;
            }
            acc.push_back(100.0 * t.accuracy);
            times.push_back(t.train_time);
        }
        row.mean_accuracy = acc.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(acc);
        row.std_accuracy = acc.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : sample_std(acc);
        row.mean_time = times.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(times);
    }
    report.best = 0;
    for (std::size_t r = 1; r < report.rows.size(); ++r) {
        const double m = report.rows[r].mean_accuracy;
        const double b = report.rows[report.best].mean_accuracy;
        if (std::isnan(b) || (!std::isnan(m) && m > b)) report.best = r;
    }
    report.paired = pairing_holds(report.rows);
    const auto& best = report.rows[report.best];
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        auto& row = report.rows[r];
        if (r == report.best) {
            row.p_value = 1.0;
            continue;
        }
        std::vector<double> a, b;
        for (std::size_t k = 0; k < row.trials.size() && k < best.trials.size(); ++k) {
            if (!row.trials[k].ok || !best.trials[k].ok) continue;
            a.push_back(row.trials[k].accuracy);
            b.push_back(best.trials[k].accuracy);
        }
        row.p_value = a.size() >= 2 ? paired_t_test(a, b) : std::numeric_limits<double>::quiet_NaN();
    }
}

// Every algorithm runs the same seed sequence, so trial k is paired across rows.
inline BenchmarkReport run_benchmark(const Dataset& ds, const SplitPlan& plan, const std::vector<AlgoConfig>& configs,
                                     int n_trials, std::uint64_t base_seed, int jobs = 1, Tuning tuning = Tuning::None,
                                     const SearchGrids& grids = default_grids()) {
    if (configs.empty()) throw UsageError("benchmark needs at least one algorithm");
    BenchmarkReport report;
    report.dataset = ds.name;
    report.plan = plan;
    report.n_trials = n_trials;
    report.base_seed = base_seed;
    std::optional<Dataset> first_train;
    if (tuning == Tuning::Once)
        first_train = subset(ds, split_indices(static_cast<std::size_t>(ds.size()), {plan.train_count, plan.test_count, base_seed}).train);
    for (const auto& cfg : configs) {
        ReportRow row;
        row.tuning = tuning;
        row.config = tuning == Tuning::Once ? grid_search(*first_train, cfg, grids, base_seed).best : cfg;
        const TrialFn fn = tuning == Tuning::PerTrial ? tuned_trial_fn(cfg, grids) : trial_fn(row.config);
        row.trials = run_trials(ds, plan, fn, n_trials, base_seed, jobs);
        report.rows.push_back(std::move(row));
    }
    summarize(report);
    return report;
}

// "1.00" for the best row, two decimals when p >= 0.01, otherwise "7.35e-04".
inline std::string format_p_value(double p, bool is_best) {
    if (is_best) return "1.00";
    if (std::isnan(p)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, p >= 0.01 ? "%.2f" : "%.2e", p);
    return buf;
}

// Fixed-width table. Only the line starting with "Time" depends on the clock.
inline std::string emit_report(const BenchmarkReport& report) {
    if (report.rows.empty()) throw UsageError("benchmark report has no rows");
    constexpr int label_w = 12, col_w = 15;
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "Dataset: %s (train %zu, test %zu, %d trials, base seed %llu)\n", report.dataset.c_str(),
                  report.plan.train_count, report.plan.test_count, report.n_trials,
                  static_cast<unsigned long long>(report.base_seed));
    out += buf;
    auto line = [&](const char* label, auto cell) {
        std::snprintf(buf, sizeof buf, "%-*s", label_w, label);
        std::string s = buf;
        for (std::size_t r = 0; r < report.rows.size(); ++r) {
            const std::string c = cell(r);
            // pad by code points so multi-byte cells stay aligned
            const auto width = std::count_if(c.begin(), c.end(), [](char ch) { return (ch & 0xC0) != 0x80; });
            s += std::string(static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, col_w - width)), ' ') + c;
        }
        out += s + "\n";
    };
    auto fixed = [&](double v, const char* fmt) {
        if (std::isnan(v)) return std::string("n/a");
        char b[48];
        std::snprintf(b, sizeof b, fmt, v);
        return std::string(b);
    };
    line("Algorithm", [&](std::size_t r) { return std::string(algo_name(report.rows[r].config.algo)); });
    line("Mean", [&](std::size_t r) {
        return fixed(report.rows[r].mean_accuracy, "%.2f") + (r == report.best ? "*" : " ");
    });
    line("Std.", [&](std::size_t r) { return "± " + fixed(report.rows[r].std_accuracy, "%.2f") + " "; });
    line("p value", [&](std::size_t r) { return format_p_value(report.rows[r].p_value, r == report.best) + " "; });
    line("Time", [&](std::size_t r) { return fixed(report.rows[r].mean_time, "%.4f") + " "; });
    line("Failed", [&](std::size_t r) { return std::to_string(report.rows[r].failures) + " "; });
    out += "Hyperparameters:\n";
    for (const auto& row : report.rows) {
        out += "  " + std::string(algo_name(row.config.algo)) + ": ";
        if (row.tuning == Tuning::PerTrial) {
            // most frequent choice; the earliest trial's wins a tie
            std::map<std::string, std::pair<int, int>> seen; // params -> (count, first trial)
            for (const auto& t : row.trials)
                if (t.ok) {
                    auto [it, fresh] = seen.try_emplace(t.params, 0, t.trial);
                    ++it->second.first;
                }
            std::string mode;
            std::pair<int, int> top{0, 0};
            for (const auto& [params, cf] : seen)
                if (cf.first > top.first || (cf.first == top.first && cf.second < top.second)) {
                    top = cf;
                    mode = params;
                }
            std::snprintf(buf, sizeof buf, "tuned per trial, most often %s (%d of %zu trials)", mode.c_str(), top.first,
                          row.trials.size());
            out += buf;
        } else {
            out += row.config.describe();
            if (row.tuning == Tuning::Once) out += " (tuned on trial 0)";
        }
        out += "\n";
    }
    out += std::string("Best: ") + algo_name(report.rows[report.best].config.algo) + " (marked *); accuracy in percent, time in seconds of training\n";
    if (!report.paired) out += "WARNING: pairing invariant violated\n";
    return out;
}

// One row per (report, algorithm): training_size,algo,mean_time
inline std::string emit_timing_csv(const std::vector<BenchmarkReport>& reports) {
    std::string out = "training_size,algo,mean_time\n";
    char buf[128];
    for (const auto& rep : reports)
        for (const auto& row : rep.rows) {
            std::snprintf(buf, sizeof buf, "%zu,%s,%.17g\n", rep.plan.train_count, algo_name(row.config.algo), row.mean_time);
            out += buf;
        }
    return out;
}

} // namespace mhkelm
