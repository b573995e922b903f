#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mhkelm/admissibility.hpp"
#include "mhkelm/data.hpp"
#include "mhkelm/error.hpp"
#include "mhkelm/evaluation.hpp"
#include "mhkelm/model_io.hpp"
#include "mhkelm/registry.hpp"

namespace mhkelm {

enum class Command { Train, Predict, Benchmark, VerifyKernel, GridSearch };

// Exit statuses of dispatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;      // a library or I/O error
inline constexpr int kExitUsage = 2;      // bad flags
inline constexpr int kExitInvariant = 3;  // pairing or solve invariant failed, kernel not admissible

struct RunConfig {
    Command command = Command::Train;
    bool help = false;
    std::string help_text;

    // data
    std::string dataset;       // registry name
    std::string registry;      // overrides MHKELM_REGISTRY
    std::string data_path;
    std::string label_col;     // empty: last column
    std::optional<bool> header;
    std::size_t train_count = 0;
    std::size_t test_count = 0;

    // algorithm
    std::string algo = "kelm"; // train: kelm | elm; gridsearch: mhw | gauss | poly | elm
    std::string kernel = "mhw";
    std::optional<double> a;
    double sigma = 1.0;
    int degree = 2;
    double c_translate = 0.0;
    double C = 1.0;
    double hidden_frac = 1.0;

    // runs
    std::uint64_t seed = 0;
    std::vector<std::string> algos{"mhw", "gauss", "poly", "elm"};
    int trials = 100;
    int jobs = 1;
    Tuning tuning = Tuning::PerTrial;
    std::vector<std::size_t> train_sizes; // benchmark: one report per size

    // verification
    double omega_max = 8.0; // in units of 1/a (1/sigma for Gauss)
    int grid = 400;
    int quadrature_points = 2001;

    // outputs
    std::string model_path;
    std::string out;
    std::string timing_csv;
};

namespace detail {

inline void require_positive(double v, const char* flag) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(flag) + " must be positive, got " + std::to_string(v));
}

inline void validate_config(const RunConfig& c) {
    const bool kernel_needed = c.command == Command::VerifyKernel || (c.command == Command::Train && c.algo == "kelm");
    if (kernel_needed) {
        try {
            parse_family(c.kernel);
        } catch (const ConfigError& e) {
            throw UsageError(std::string("--kernel: ") + e.what());
        }
        if ((c.kernel == "mhw" || c.kernel == "mhw-dot") && !c.a) throw UsageError("--a is required for --kernel " + c.kernel);
    }
    if (c.a) require_positive(*c.a, "--a");
    require_positive(c.sigma, "--sigma");
    require_positive(c.C, "--C");
    require_positive(c.hidden_frac, "--hidden-frac");
    if (c.degree < 1) throw UsageError("--degree must be >= 1");
    if (c.command == Command::Train || c.command == Command::Benchmark || c.command == Command::GridSearch) {
        if (c.dataset.empty() == c.data_path.empty()) throw UsageError("give exactly one of --dataset or --data");
    }
    if (c.command == Command::Benchmark) {
        if (c.trials < 2) throw UsageError("--trials must be >= 2");
        if (c.jobs < 1) throw UsageError("--jobs must be >= 1");
        if (!c.data_path.empty() && (c.train_count < 1 || c.test_count < 1))
            throw UsageError("--train and --test are required with --data");
        for (const auto& t : c.algos) {
            try {
                parse_algo(t);
            } catch (const ConfigError& e) {
                throw UsageError(std::string("--algos: ") + e.what());
            }
        }
    }
    if (c.command == Command::GridSearch) {
        try {
            parse_algo(c.algo);
        } catch (const ConfigError& e) {
            throw UsageError(std::string("--algo: ") + e.what());
        }
    }
    if (c.command == Command::VerifyKernel) {
        require_positive(c.omega_max, "--omega-max");
        if (c.grid < 2) throw UsageError("--grid must be >= 2");
        if (c.quadrature_points < 1001 || c.quadrature_points % 2 == 0)
            throw UsageError("--points must be odd and >= 1001");
    }
}

} // namespace detail

// Parses and validates flags. Throws UsageError naming the offending flag.
inline RunConfig parse_args(int argc, const char* const* argv) {
    RunConfig c;
    CLI::App app{"Mexican Hat wavelet kernel ELM: training, prediction, kernel verification and benchmarks", "mhkelm"};
    app.set_config("--config", "", "TOML/INI file of flag values; command-line flags take precedence");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto add_data = [&](CLI::App* s) {
        s->add_option("--dataset", c.dataset, "registered dataset name");
        s->add_option("--registry", c.registry, "dataset registry file (default: $MHKELM_REGISTRY or the bundled one)");
        s->add_option("--data", c.data_path, "CSV file");
        s->add_option("--label-col", c.label_col, "label column: zero-based index or header name (default: last)");
        s->add_flag_function("--header", [&](std::int64_t) { c.header = true; }, "first row is a header");
        s->add_flag_function("--no-header", [&](std::int64_t) { c.header = false; }, "first row is data");
    };
    auto add_kernel = [&](CLI::App* s) {
        s->add_option("--kernel", c.kernel, "mhw | gauss | poly | mhw-dot");
        s->add_option("--a", c.a, "wavelet dilation");
        s->add_option("--sigma", c.sigma, "Gauss width");
        s->add_option("--degree", c.degree, "polynomial degree");
        s->add_option("--c", c.c_translate, "wavelet translation for mhw-dot");
    };

    auto* train = app.add_subcommand("train", "train a model and write it to --out");
    add_data(train);
    add_kernel(train);
    train->add_option("--algo", c.algo, "kelm | elm")->check(CLI::IsMember({"kelm", "elm"}));
    train->add_option("--C", c.C, "penalty factor");
    train->add_option("--hidden-frac", c.hidden_frac, "ELM hidden nodes as a fraction of training rows");
    train->add_option("--seed", c.seed, "ELM hidden-layer seed");
    train->add_option("--out", c.model_path, "model file")->required();

    auto* predict = app.add_subcommand("predict", "predict labels of a CSV with a saved model");
    predict->add_option("--model", c.model_path, "model file")->required();
    predict->add_option("--data", c.data_path, "CSV file")->required();
    predict->add_option("--label-col", c.label_col, "label column (default: last)");
    predict->add_flag_function("--header", [&](std::int64_t) { c.header = true; }, "first row is a header");
    predict->add_flag_function("--no-header", [&](std::int64_t) { c.header = false; }, "first row is data");
    predict->add_option("--out", c.out, "write predicted labels here instead of standard output");

    auto* bench = app.add_subcommand("benchmark", "repeated random-split comparison of algorithms");
    add_data(bench);
    bench->add_option("--train", c.train_count, "training rows per trial (registry default with --dataset)");
    bench->add_option("--test", c.test_count, "test rows per trial (registry default with --dataset)");
    bench->add_option("--train-sizes", c.train_sizes, "run one report per training size (timing curve)")->delimiter(',');
    bench->add_option("--algos", c.algos, "comma list of mhw, gauss, poly, elm")->delimiter(',');
    bench->add_option("--trials", c.trials, "trials per algorithm");
    bench->add_option("--base-seed,--seed", c.seed, "trial k uses seed base + k");
    bench->add_option("--jobs", c.jobs, "parallel trials");
    bench->add_option_function<std::string>(
               "--tune", [&](const std::string& v) { c.tuning = parse_tuning(v); },
               "per-trial (grid search inside every trial), once (on trial 0's training rows) or none")
        ->check(CLI::IsMember({"per-trial", "once", "none"}));
    bench->add_flag_function("--no-tune", [&](std::int64_t) { c.tuning = Tuning::None; }, "same as --tune none: use --a/--sigma/--degree/--C");
    bench->add_option("--a", c.a, "wavelet dilation with --no-tune");
    bench->add_option("--sigma", c.sigma, "Gauss width with --no-tune");
    bench->add_option("--degree", c.degree, "polynomial degree with --no-tune");
    bench->add_option("--C", c.C, "penalty factor with --no-tune");
    bench->add_option("--hidden-frac", c.hidden_frac, "ELM hidden nodes as a fraction of training rows");
    bench->add_option("--out", c.out, "report file");
    bench->add_option("--timing-csv", c.timing_csv, "CSV of training_size,algo,mean_time");

    auto* verify = app.add_subcommand("verify-kernel", "numeric Fourier transform check of a translation-invariant kernel");
    add_kernel(verify);
    verify->add_option("--omega-max", c.omega_max, "largest frequency, in units of 1/a (1/sigma for gauss)");
    verify->add_option("--grid", c.grid, "frequencies on [0, omega-max]");
    verify->add_option("--points", c.quadrature_points, "quadrature points (odd, >= 1001)");
    verify->add_option("--out", c.out, "CSV file (default: standard output)");

    auto* gs = app.add_subcommand("gridsearch", "validation grid search on the training portion of a split");
    add_data(gs);
    gs->add_option("--algo", c.algo, "mhw | gauss | poly | elm")->required();
    gs->add_option("--train", c.train_count, "training rows (registry default with --dataset)");
    gs->add_option("--test", c.test_count, "held-out rows (registry default with --dataset)");
    gs->add_option("--seed", c.seed, "split seed; validation splits use seed + 1000 + v");
    gs->add_option("--hidden-frac", c.hidden_frac, "ELM hidden nodes as a fraction of training rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        c.help = true;
        c.help_text = app.help();
        return c;
    } catch (const CLI::CallForAllHelp&) {
        c.help = true;
        c.help_text = app.help("", CLI::AppFormatMode::All);
        return c;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    for (auto* s : app.get_subcommands()) {
        // help requested on a subcommand surfaces through CallForHelp above
        if (s == train) c.command = Command::Train;
        else if (s == predict) c.command = Command::Predict;
        else if (s == bench) c.command = Command::Benchmark;
        else if (s == verify) c.command = Command::VerifyKernel;
        else if (s == gs) c.command = Command::GridSearch;
    }
    if (c.command == Command::GridSearch && c.algo == "kelm") c.algo = "mhw";
    detail::validate_config(c);
    return c;
}

namespace detail {

// Index of the last field on the first non-blank line.
inline int last_column(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::string line;
    while (std::getline(in, line))
        if (!trim(line).empty()) return static_cast<int>(split_fields(line, ',').size()) - 1;
    throw ParseError(path.string() + ": empty file");
}

struct LoadedData {
    Dataset ds;
    std::optional<SplitPlan> plan; // registry default, if any
};

inline LoadedData load_data(const RunConfig& c) {
    if (!c.dataset.empty()) {
        const auto reg = load_registry(c.registry.empty() ? default_registry_path() : std::filesystem::path(c.registry));
        const auto& entry = reg.at(c.dataset);
        return {reg.load(c.dataset), entry.plan(c.seed)};
    }
    CsvOptions opt;
    opt.has_header = c.header;
    const auto label = c.label_col.empty() ? LabelColumn::at(last_column(c.data_path)) : LabelColumn::parse(c.label_col);
    Dataset ds = load_csv(c.data_path, label, opt);
    return {std::move(ds), std::nullopt};
}

inline SplitPlan plan_for(const RunConfig& c, const LoadedData& d) {
    SplitPlan p = d.plan.value_or(SplitPlan{});
    if (c.train_count) p.train_count = c.train_count;
    if (c.test_count) p.test_count = c.test_count;
    p.seed = c.seed;
    if (p.train_count < 1 || p.test_count < 1) throw UsageError("--train and --test are required");
    return p;
}

inline KernelSpec kernel_of(const RunConfig& c) {
    KernelSpec k;
    k.family = parse_family(c.kernel);
    k.a = c.a.value_or(1.0);
    k.sigma = c.sigma;
    k.degree = c.degree;
    k.c_translate = c.c_translate;
    k.validate();
    return k;
}

inline int run_train(const RunConfig& c, std::ostream& out) {
    const auto d = load_data(c);
    const auto classes = all_classes(d.ds);
    Model model;
    double residual = 0.0;
    if (c.algo == "kelm") {
        auto m = train_kelm_indexed(d.ds.features, d.ds.labels, classes, kernel_of(c), c.C);
        m.class_names = d.ds.label_map;
        residual = m.solve_residual;
        model = std::move(m);
    } else {
        AlgoConfig cfg;
        cfg.algo = Algo::OriginalElm;
        cfg.hidden_frac = c.hidden_frac;
        auto m = train_elm_indexed(d.ds.features, d.ds.labels, classes, cfg.hidden_nodes(static_cast<std::size_t>(d.ds.size())),
                                   c.C, c.seed);
        m.class_names = d.ds.label_map;
        residual = m.solve_residual;
        model = std::move(m);
    }
    save_model(model, c.model_path);
    char buf[256];
    std::snprintf(buf, sizeof buf, "trained %s on %lld rows, %d classes; relative solve residual %.3e; wrote %s\n",
                  c.algo == "kelm" ? kernel_of(c).describe().c_str() : "original ELM", static_cast<long long>(d.ds.size()),
                  d.ds.category_count(), residual, c.model_path.c_str());
    out << buf;
    return kExitOk;
}

inline int run_predict(const RunConfig& c, std::ostream& out) {
    const Model model = load_model(c.model_path);
    CsvOptions opt;
    opt.has_header = c.header;
    const auto label = c.label_col.empty() ? LabelColumn::at(last_column(c.data_path)) : LabelColumn::parse(c.label_col);
    const Dataset ds = load_csv(c.data_path, label, opt);

    std::vector<int> pred;
    const std::vector<std::string>* names = nullptr;
    std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KelmModel>) pred = classify_multiclass(m, ds.features);
            else pred = predict_elm(m, ds.features);
            names = &m.class_names;
        },
        model);
    auto name_of = [&](int cls) { return names->empty() ? std::to_string(cls) : names->at(static_cast<std::size_t>(cls)); };

    std::string labels;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const std::string p = name_of(pred[i]);
        labels += p + "\n";
        hit += p == ds.label_map[static_cast<std::size_t>(ds.labels[i])];
    }
    if (c.out.empty()) out << labels;
    else write_file_atomic(c.out, labels);
    char buf[128];
    std::snprintf(buf, sizeof buf, "accuracy %.4f (%zu/%zu)\n", static_cast<double>(hit) / static_cast<double>(pred.size()), hit,
                  pred.size());
    out << buf;
    return kExitOk;
}

inline AlgoConfig untuned_config(const RunConfig& c, Algo algo) {
    AlgoConfig cfg;
    cfg.algo = algo;
    cfg.C = c.C;
    cfg.width = algo == Algo::GaussKelm ? c.sigma : c.a.value_or(1.0);
    cfg.degree = c.degree;
    cfg.hidden_frac = c.hidden_frac;
    return cfg;
}

inline int run_benchmark_cmd(const RunConfig& c, std::ostream& out) {
    const auto d = load_data(c);
    const SplitPlan base_plan = plan_for(c, d);
    std::vector<std::size_t> sizes = c.train_sizes;
    if (sizes.empty()) sizes.push_back(base_plan.train_count);

    std::vector<BenchmarkReport> reports;
    std::string text;
    bool invariant_ok = true;
    for (std::size_t size : sizes) {
        SplitPlan plan = base_plan;
        plan.train_count = size;
        std::vector<AlgoConfig> configs;
        for (const auto& tag : c.algos) configs.push_back(untuned_config(c, parse_algo(tag)));
        auto report = run_benchmark(d.ds, plan, configs, c.trials, c.seed, c.jobs, c.tuning);
        if (!report.paired) invariant_ok = false;
        for (const auto& row : report.rows)
            if (row.failures > 0) invariant_ok = false;
        text += emit_report(report);
        if (sizes.size() > 1) text += "\n";
        reports.push_back(std::move(report));
    }
    out << text;
    if (!c.out.empty()) write_file_atomic(c.out, text);
    if (!c.timing_csv.empty()) write_file_atomic(c.timing_csv, emit_timing_csv(reports));
    return invariant_ok ? kExitOk : kExitInvariant;
}

inline int run_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const KernelSpec spec = kernel_of(c);
    if (!is_translation_invariant(spec.family))
        throw UsageError("kernel " + spec.describe() + " is not translation-invariant; the Fourier criterion does not apply");
    const double scale = spec.family == KernelFamily::Gauss ? spec.sigma : spec.a;
    const auto omegas = omega_grid(c.omega_max / scale, c.grid);
    const auto rep = verify_admissibility(spec, omegas, c.quadrature_points);

    std::string csv = "omega,numeric_ft\n";
    char buf[160];
    for (std::size_t i = 0; i < rep.omega_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rep.omega_grid[i], rep.numeric_ft[i]);
        csv += buf;
    }
    std::snprintf(buf, sizeof buf, "%s: %s (min FT %.3e, max FT %.3e", spec.describe().c_str(), verdict_name(rep.verdict),
                  rep.min_numeric_ft, rep.max_numeric_ft);
    std::string summary = buf;
    if (!std::isnan(rep.proportionality_ratio)) {
        std::snprintf(buf, sizeof buf, ", numeric/closed-form ratio %.6g", rep.proportionality_ratio);
        summary += buf;
    }
    summary += ")\n";
    if (c.out.empty()) {
        out << csv;
        err << summary;
    } else {
        write_file_atomic(c.out, csv);
        out << summary;
    }
    return rep.verdict == Verdict::Admissible ? kExitOk : kExitInvariant;
}

inline int run_gridsearch(const RunConfig& c, std::ostream& out) {
    const auto d = load_data(c);
    const SplitPlan plan = plan_for(c, d);
    const auto idx = split_indices(static_cast<std::size_t>(d.ds.size()), plan);
    AlgoConfig base = untuned_config(c, parse_algo(c.algo));
    const auto r = grid_search(subset(d.ds, idx.train), base, default_grids(), c.seed);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s on %s (training portion %zu rows, seed %llu): best %s, validation accuracy %.4f (%d points, %d failed)\n",
                  algo_name(base.algo), d.ds.name.empty() ? c.data_path.c_str() : d.ds.name.c_str(), plan.train_count,
                  static_cast<unsigned long long>(c.seed), r.best.describe().c_str(), r.score, r.points, r.failed_points);
    out << buf;
    return kExitOk;
}

} // namespace detail

// Runs a validated configuration. Errors go to `err` with a nonzero status.
inline int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.help) {
        out << c.help_text;
        return kExitOk;
    }
    try {
        switch (c.command) {
        case Command::Train: return detail::run_train(c, out);
        case Command::Predict: return detail::run_predict(c, out);
        case Command::Benchmark: return detail::run_benchmark_cmd(c, out);
        case Command::VerifyKernel: return detail::run_verify(c, out, err);
        case Command::GridSearch: return detail::run_gridsearch(c, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    try {
        c = parse_args(argc, argv);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun with --help for the list of flags\n";
        return kExitUsage;
    }
    return dispatch(c, out, err);
}

} // namespace mhkelm
