// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heact/approx.hpp"
#include "heact/error.hpp"
#include "heact/eval.hpp"
#include "heact/he/ckks.hpp"
#include "heact/he/serialize.hpp"
#include "heact/json_format.hpp"
#include "heact/nn.hpp"

namespace heact::cli {

namespace {

using Clock = std::chrono::steady_clock;

// Written in place of the wall-clock timestamp unless --timing is set, so
// fixed-seed runs produce identical bytes.
constexpr const char* kFixedTimestamp = "1970-01-01T00:00:00Z";

struct Common {
    std::string out_path;
    std::string format;
    std::uint64_t seed = 1;
    bool timing = false;
};

struct OutputSink {
    std::ostream& out;
    const Common& common;

    eval::Format format() const {
        if (common.format == "json") return eval::Format::Json;
        if (common.format == "csv") return eval::Format::Csv;
        return std::filesystem::path(common.out_path).extension() == ".json" ? eval::Format::Json
                                                                              : eval::Format::Csv;
    }

    void write(const std::string& text) const {
        if (common.out_path.empty()) {
            out << text;
            return;
        }
        std::ofstream f(common.out_path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << text) || !f.flush()) throw std::runtime_error("cannot write " + common.out_path);
    }

    void report(const eval::BenchReport& r) const {
        eval::validate_report(r);
        write(format() == eval::Format::Json ? eval::report_to_json(r) : eval::report_to_csv(r));
    }

    // Summary lines only accompany data written to a file.
    std::ostream* summary() const { return common.out_path.empty() ? nullptr : &out; }
};

std::string fmt_g(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

eval::Environment environment(const Common& c, const std::string& digest) {
    return {c.timing ? eval::utc_timestamp() : kFixedTimestamp, eval::platform_string(), digest};
}

std::vector<eval::NamedMethod> resolve_methods(const std::vector<std::string>& names) {
    if (names.empty()) return eval::default_methods();
    std::vector<eval::NamedMethod> out;
    for (const auto& n : names) out.push_back(eval::builtin_method(n));
    return out;
}

he::CkksParams resolve_profile(const std::string& flag) {
    std::string name = flag;
    if (name.empty()) {
        const char* env = std::getenv("HEACT_PROFILE");
        name = env && *env ? env : "fast";
    }
    if (name == "fast") return he::CkksParams::fast();
    if (name == "default") return he::CkksParams::standard();
    throw ParameterError("unknown profile '" + name + "' (expected fast or default)");
}

struct BlobConfig {
    std::size_t n_per_class = 200;
    int classes = 3;
    std::size_t dim = 8;
    double spread = 0.5;

    std::string tag(std::uint64_t seed) const {
        return "blobs(n=" + std::to_string(n_per_class) + " classes=" + std::to_string(classes) +
               " dim=" + std::to_string(dim) + " spread=" + fmt_g(spread) + " seed=" + std::to_string(seed) + ")";
    }
};

void add_common(CLI::App* sub, Common& c, bool with_format = true) {
    sub->add_option("--out", c.out_path, "Output file (stdout when omitted)");
    if (with_format) {
        sub->add_option("--format", c.format, "csv or json (default: from --out extension, else csv)")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    sub->add_option("--seed", c.seed, "Seed recorded in reports and used by every random draw")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--timing", c.timing, "Record wall-clock fields and print measured timings");
}

void add_blob_options(CLI::App* sub, BlobConfig& b) {
    sub->add_option("--n-per-class", b.n_per_class, "Blob points per class")->check(CLI::PositiveNumber);
    sub->add_option("--classes", b.classes, "Number of blob classes")->check(CLI::PositiveNumber);
    sub->add_option("--dim", b.dim, "Blob dimension")->check(CLI::PositiveNumber);
    sub->add_option("--spread", b.spread, "Blob standard deviation")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------
// Subcommands

struct FitArgs {
    std::string train, val;
    int degree = 2;
    double lambda = approx::kDefaultLambda;
};

void cmd_fit(const FitArgs& a, const Common& c, std::ostream& out) {
    const auto train = eval::sample_from_spec(a.train);
    const auto val = eval::sample_from_spec(a.val);
    const auto r = approx::run_pipeline(train.values, val.values, a.degree, a.lambda);
    auto j = approx::fit_report_to_json(r.report, c.timing);
    j["train_source"] = train.tag();
    j["val_source"] = val.tag();
    j["lambda"] = a.lambda;
    j["support_size"] = r.kernel.support_x.size();
    const OutputSink sink{out, c};
    sink.write(dump_fixed(j, 6));
    if (auto* s = sink.summary()) {
        *s << "degree " << a.degree << ": train_mse " << format_fixed(r.report.train_mse, 6) << ", val_mse "
           << format_fixed(r.report.val_mse, 6) << "\n";
        if (c.timing) *s << "fit time " << format_fixed(r.report.fit_seconds, 6) << " s\n";
    }
}

struct DistArgs {
    std::vector<double> sds{0.1, 0.2, 0.5, 0.7, 1.0};
    std::size_t n = 100000;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods;
};

void cmd_bench_dist(const DistArgs& a, const Common& c, std::ostream& out) {
    const auto methods = resolve_methods(a.methods);
    const auto seeds = a.seeds.empty() ? std::vector<std::uint64_t>{c.seed} : a.seeds;
    eval::BenchReport report;
    for (double sd : a.sds) {
        for (std::uint64_t seed : seeds) {
            const auto samples = eval::sample_normal(a.n, 0.0, sd, seed);
            auto part = eval::compare_methods(samples, methods, seed);
            for (auto& row : part.rows) {
                if (!c.timing) row.wall_time_s = 0.0;
                report.rows.push_back(std::move(row));
            }
        }
    }
    report.environment = environment(c, "none");
    const OutputSink sink{out, c};
    sink.report(report);
    if (auto* s = sink.summary()) *s << report.rows.size() << " rows written to " << c.out_path << "\n";
}

struct FileArgs {
    std::string input;
    std::vector<std::string> methods;
};

void cmd_bench_file(const FileArgs& a, const Common& c, std::ostream& out) {
    const auto samples = eval::load_scalars_csv(a.input);
    auto report = eval::compare_methods(samples, resolve_methods(a.methods), c.seed);
    for (auto& row : report.rows) {
        if (!c.timing) row.wall_time_s = 0.0;
    }
    report.environment = environment(c, "none");
    const OutputSink sink{out, c};
    sink.report(report);
    if (auto* s = sink.summary()) {
        const auto best = std::min_element(report.rows.begin(), report.rows.end(),
                                           [](const auto& x, const auto& y) { return x.mse < y.mse; });
        *s << samples.size() << " values; lowest mse: " << best->method << " (" << format_fixed(best->mse, 6)
           << ")\n";
    }
}

struct SweepArgs {
    std::string train = "normal:0,1,2048,7";
    std::string val = "normal:0,1,2048,8";
    std::vector<int> degrees{2, 3, 4, 5};
    double lambda = approx::kDefaultLambda;
    std::string profile;
    int repetitions = 3;
};

void cmd_sweep(const SweepArgs& a, const Common& c, std::ostream& out) {
    const auto params = resolve_profile(a.profile);
    const auto train = eval::sample_from_spec(a.train);
    const auto val = eval::sample_from_spec(a.val);
    approx::SweepOptions opts;
    opts.key_seed = c.seed;
    opts.repetitions = a.repetitions;
    const auto rows = approx::degree_sweep(train.values, val.values, a.degrees, a.lambda, params, opts);
    const OutputSink sink{out, c};
    sink.write(sink.format() == eval::Format::Json ? dump_fixed(approx::sweep_to_json(rows, c.timing), 6)
                                                   : approx::sweep_to_csv(rows, c.timing));
    if (auto* s = sink.summary()) {
        for (const auto& r : rows) {
            *s << "degree " << r.fit.degree << ": levels " << r.cost.levels << ", val_mse "
               << format_fixed(r.fit.val_mse, 6) << ", enc_mse " << format_fixed(r.cost.enc_mse, 6);
            if (c.timing) *s << ", latency " << format_fixed(r.cost.enc_latency_s, 6) << " s";
            *s << (r.selected ? " [selected]" : "") << (r.cost.status == "ok" ? "" : " (" + r.cost.status + ")")
               << "\n";
        }
    }
}

struct NnArgs {
    std::vector<std::string> activations{"relu", "kernel-paper", "x-squared"};
    BlobConfig blobs;
    std::size_t hidden = 32;
    nn::TrainConfig train;
    std::string save_dir;
};

// "kernel-fit-<d>" fits a degree-d surrogate with the standard pipeline
// (N(0,1) train/val, seeds 7 and 8, n = 2048); anything else is a builtin.
nn::Activation resolve_activation(const std::string& name) {
    const std::string prefix = "kernel-fit-";
    if (name.rfind(prefix, 0) != 0) return nn::Activation::from_name(name);
    int degree = 0;
    const auto digits = name.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), degree);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || degree < 1) {
        throw ParameterError("bad activation '" + name + "' (expected kernel-fit-<degree>)");
    }
    const auto train = eval::sample_normal(2048, 0.0, 1.0, 7);
    const auto val = eval::sample_normal(2048, 0.0, 1.0, 8);
    return nn::Activation::poly(approx::run_pipeline(train.values, val.values, degree).polynomial, "kernel-fit");
}

void cmd_bench_nn(const NnArgs& a, const Common& c, std::ostream& out) {
    const auto data = eval::make_blobs(a.blobs.n_per_class, a.blobs.classes, a.blobs.dim, a.blobs.spread, c.seed);
    nn::TrainConfig cfg = a.train;
    cfg.seed = c.seed;
    eval::BenchReport report;
    std::vector<std::string> lines;
    for (const auto& name : a.activations) {
        const auto m0 = nn::init_mlp({a.blobs.dim, a.hidden, static_cast<std::size_t>(a.blobs.classes)},
                                     resolve_activation(name), c.seed);
        const auto t0 = Clock::now();
        const auto trained = nn::train(m0, data.train, cfg);
        const double train_s = seconds_since(t0);
        eval::BenchRow row;
        row.method = trained.model.activation.name;
        row.dataset = a.blobs.tag(c.seed);
        row.mse = nn::brier_score(trained.model, data.test);
        row.accuracy = nn::evaluate(trained.model, data.test);
        if (trained.model.activation.is_polynomial()) row.levels = nn::forward_depth(trained.model);
        row.wall_time_s = c.timing ? train_s : 0.0;
        row.seed = c.seed;
        lines.push_back(name + ": test accuracy " + format_fixed(*row.accuracy, 6) + ", final loss " +
                        format_fixed(trained.history.back(), 6));
        report.rows.push_back(std::move(row));
        if (!a.save_dir.empty()) {
            std::filesystem::create_directories(a.save_dir);
            nn::save_model(trained.model, (std::filesystem::path(a.save_dir) / (name + ".json")).string());
        }
    }
    report.environment = environment(c, "none");
    const OutputSink sink{out, c};
    sink.report(report);
    if (auto* s = sink.summary()) {
        for (const auto& l : lines) *s << l << "\n";
    }
}

struct HeArgs {
    std::vector<std::string> models;
    BlobConfig blobs;
    std::string profile;
    int repetitions = 3;
};

void cmd_bench_he(const HeArgs& a, const Common& c, std::ostream& out) {
    const auto params = resolve_profile(a.profile);
    const auto data = eval::make_blobs(a.blobs.n_per_class, a.blobs.classes, a.blobs.dim, a.blobs.spread, c.seed);
    he::CkksBackend backend(params, c.seed);
    eval::BenchReport report;
    std::vector<std::string> lines;
    for (const auto& path : a.models) {
        const auto model = nn::load_model(path);
        if (model.input_dim() != a.blobs.dim) {
            throw ParameterError(path + ": model expects " + std::to_string(model.input_dim()) +
                                 " features, blobs have " + std::to_string(a.blobs.dim));
        }
        const auto t0 = Clock::now();
        const auto gap = nn::accuracy_gap(backend, model, data.test);
        const double enc_total_s = seconds_since(t0);
        const auto enc_x = nn::encrypt_features(backend, data.test.points, 0, 1);
        const auto logits = nn::encrypted_forward(backend, model, enc_x);

        eval::BenchRow row;
        row.method = model.activation.name;
        row.dataset = a.blobs.tag(c.seed);
        row.mse = gap.logit_mse;
        row.accuracy = gap.enc_acc;
        row.levels = gap.levels;
        row.wall_time_s = c.timing ? enc_total_s : 0.0;
        row.ct_bytes = he::ct_bytes(logits.front());
        row.seed = c.seed;
        report.rows.push_back(std::move(row));

        std::string line = model.activation.name + ": plaintext accuracy " + format_fixed(gap.plain_acc, 6) +
                           ", encrypted accuracy " + format_fixed(gap.enc_acc, 6) + ", gap " +
                           format_fixed(gap.gap, 6) + ", levels " + std::to_string(gap.levels) + "/" +
                           std::to_string(params.max_level()) + ", max logit diff " +
                           format_fixed(gap.max_logit_diff, 9);
        if (c.timing) {
            const auto sd = nn::measure_slowdown(backend, model, data.test.points, std::max(3, a.repetitions));
            line += ", plaintext forward " + format_fixed(sd.plain_s, 9) + " s, encrypted forward " +
                    format_fixed(sd.enc_s, 6) + " s, slowdown " + format_fixed(sd.factor, 1) + "x";
        }
        lines.push_back(line);
    }
    report.environment = environment(c, params.digest());
    const OutputSink sink{out, c};
    sink.report(report);
    if (auto* s = sink.summary()) {
        for (const auto& l : lines) *s << l << "\n";
    }
}

struct SampleArgs {
    std::vector<std::string> sources;
};

void cmd_sample(const SampleArgs& a, const Common& c, std::ostream& out) {
    std::string text = "value\n";
    std::size_t n = 0;
    for (const auto& src : a.sources) {
        for (double v : eval::sample_from_spec(src).values) {
            text += format_fixed(v, 6) + "\n";
            ++n;
        }
    }
    const OutputSink sink{out, c};
    sink.write(text);
    if (auto* s = sink.summary()) *s << n << " values written to " << c.out_path << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"heact: polynomial ReLU surrogates under CKKS encryption", "heact"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Common common;
    FitArgs fit;
    DistArgs dist;
    FileArgs file;
    SweepArgs sweep;
    NnArgs nn_args;
    HeArgs he_args;
    SampleArgs sample;

    auto* fit_cmd = app.add_subcommand("fit", "Kernel-smoothed least-squares fit of a ReLU surrogate");
    fit_cmd->add_option("--train", fit.train, "Training source (normal:mean,sd,n,seed | grid:lo,hi,n | file:path)")
        ->required();
    fit_cmd->add_option("--val", fit.val, "Validation source")->required();
    fit_cmd->add_option("--degree", fit.degree, "Polynomial degree")->required()->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--lambda", fit.lambda, "Ridge parameter")->check(CLI::PositiveNumber);
    add_common(fit_cmd, common, false);

    auto* dist_cmd = app.add_subcommand("bench-dist", "Method MSE against ReLU on normal samples");
    dist_cmd->add_option("--sds", dist.sds, "Standard deviations")->delimiter(',')->check(CLI::PositiveNumber);
    dist_cmd->add_option("--n", dist.n, "Samples per distribution")->check(CLI::PositiveNumber);
    dist_cmd->add_option("--seeds", dist.seeds, "Sample seeds (default: --seed)")->delimiter(',');
    dist_cmd->add_option("--methods", dist.methods, "Comma-separated method names")->delimiter(',');
    add_common(dist_cmd, common);

    auto* file_cmd = app.add_subcommand("bench-file", "Method MSE against ReLU on a scalar CSV file");
    file_cmd->add_option("--input", file.input, "One value per line, optional 'value' header")
        ->required()
        ->check(CLI::ExistingFile);
    file_cmd->add_option("--methods", file.methods, "Comma-separated method names")->delimiter(',');
    add_common(file_cmd, common);

    auto* sweep_cmd = app.add_subcommand("sweep", "Degree sweep with encrypted evaluation and degree selection");
    sweep_cmd->add_option("--train", sweep.train, "Training source");
    sweep_cmd->add_option("--val", sweep.val, "Validation source");
    sweep_cmd->add_option("--degrees", sweep.degrees, "Comma-separated degrees")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--lambda", sweep.lambda, "Ridge parameter")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--profile", sweep.profile, "fast or default (env HEACT_PROFILE)")
        ->check(CLI::IsMember({"fast", "default"}));
    sweep_cmd->add_option("--reps", sweep.repetitions, "Latency repetitions (>= 3)")->check(CLI::Range(3, 1000));
    add_common(sweep_cmd, common);

    auto* nn_cmd = app.add_subcommand("bench-nn", "Train one blob MLP per activation and report test accuracy");
    nn_cmd->add_option("--activations", nn_args.activations, "relu, builtin polynomial names or kernel-fit-<degree>")
        ->delimiter(',');
    add_blob_options(nn_cmd, nn_args.blobs);
    nn_cmd->add_option("--hidden", nn_args.hidden, "Hidden layer width")->check(CLI::PositiveNumber);
    nn_cmd->add_option("--epochs", nn_args.train.epochs, "Training epochs")->check(CLI::PositiveNumber);
    nn_cmd->add_option("--batch", nn_args.train.batch_size, "Minibatch size")->check(CLI::PositiveNumber);
    nn_cmd->add_option("--lr", nn_args.train.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
    nn_cmd->add_option("--save-models", nn_args.save_dir, "Directory for <activation>.json model files");
    add_common(nn_cmd, common);

    auto* he_cmd = app.add_subcommand("bench-he", "Encrypted inference accuracy gap and levels for saved models");
    he_cmd->add_option("--model", he_args.models, "Model JSON from bench-nn --save-models (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    add_blob_options(he_cmd, he_args.blobs);
    he_cmd->add_option("--profile", he_args.profile, "fast or default (env HEACT_PROFILE)")
        ->check(CLI::IsMember({"fast", "default"}));
    he_cmd->add_option("--reps", he_args.repetitions, "Timing repetitions (>= 3)")->check(CLI::Range(3, 1000));
    add_common(he_cmd, common);

    auto* sample_cmd = app.add_subcommand("sample", "Write samples from one or more sources as a scalar CSV");
    sample_cmd->add_option("--source", sample.sources, "Source spec (repeatable; outputs are concatenated)")
        ->required();
    add_common(sample_cmd, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const auto subs = app.get_subcommands();
        err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) cmd_fit(fit, common, out);
        if (dist_cmd->parsed()) cmd_bench_dist(dist, common, out);
        if (file_cmd->parsed()) cmd_bench_file(file, common, out);
        if (sweep_cmd->parsed()) cmd_sweep(sweep, common, out);
        if (nn_cmd->parsed()) cmd_bench_nn(nn_args, common, out);
        if (he_cmd->parsed()) cmd_bench_he(he_args, common, out);
        if (sample_cmd->parsed()) cmd_sample(sample, common, out);
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IncompatibleActivation& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TrainingDiverged& e) {
        err << "error: " << e.what() << " (epoch " << e.epoch() << ")\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace heact::cli
