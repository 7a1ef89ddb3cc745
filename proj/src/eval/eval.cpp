// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "heact/error.hpp"
#include "heact/json_format.hpp"
#include "heact/random.hpp"

namespace heact::eval {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> csv_record(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back().push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back().push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back().push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no);
    return fields;
}

constexpr double kBlobRadius = 2.0;

std::vector<std::string> relu_free_methods() {
    return {"kernel-paper", "x-squared", "fastercryptonets", "chebyshev-3", "chebyshev-5"};
}

}  // namespace

// ============================================================================
// Sample sources
// ============================================================================

std::string SampleSet::tag() const {
    struct Visitor {
        std::string operator()(const NormalSource& s) const {
            return "normal(mean=" + fmt_g(s.mean) + " sd=" + fmt_g(s.sd) + " n=" + std::to_string(s.n) +
                   " seed=" + std::to_string(s.seed) + ")";
        }
        std::string operator()(const FileSource& s) const {
            const auto slash = s.path.find_last_of('/');
            const std::string name = slash == std::string::npos ? s.path : s.path.substr(slash + 1);
            return "file(" + name + " n=" + std::to_string(s.count) + ")";
        }
        std::string operator()(const GridSource& s) const {
            return "grid(lo=" + fmt_g(s.lo) + " hi=" + fmt_g(s.hi) + " n=" + std::to_string(s.n) + ")";
        }
    };
    return std::visit(Visitor{}, provenance);
}

SampleSet sample_normal(std::size_t n, double mean, double sd, std::uint64_t seed) {
    if (n < 1) throw ParameterError("sample_normal: n must be >= 1");
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
        throw ParameterError("sample_normal: need finite mean and sd > 0");
    }
    Prng rng(seed);
    SampleSet s{std::vector<double>(n), NormalSource{mean, sd, seed, n}};
    for (auto& v : s.values) v = rng.normal(mean, sd);
    return s;
}

SampleSet sample_grid(double lo, double hi, std::size_t n) {
    if (n < 1) throw ParameterError("sample_grid: n must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw ParameterError("sample_grid: need lo < hi");
    SampleSet s{std::vector<double>(n), GridSource{lo, hi, n}};
    for (std::size_t i = 0; i < n; ++i) {
        s.values[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return s;
}

SampleSet load_scalars_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::vector<std::string_view> lines = split(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

    SampleSet s{{}, FileSource{path, 0}};
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (i == 0 && line == "value") continue;
        double v = 0.0;
        if (!parse_double(line, v)) {
            throw ParseError("expected one finite number, got '" + std::string(line) + "' in " + path, i + 1);
        }
        s.values.push_back(v);
    }
    if (s.values.empty()) throw ParameterError("no values in " + path);
    std::get<FileSource>(s.provenance).count = s.values.size();
    return s;
}

SampleSet sample_from_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw ParameterError("sample source '" + std::string(spec) + "' must be normal:..., grid:... or file:...");
    }
    const std::string_view kind = spec.substr(0, colon);
    const std::string_view rest = spec.substr(colon + 1);
    if (kind == "file") {
        if (rest.empty()) throw ParameterError("file: source needs a path");
        return load_scalars_csv(std::string(rest));
    }
    const auto args = split(rest, ',');
    if (kind == "normal") {
        double mean = 0.0, sd = 0.0;
        std::size_t n = 0;
        std::uint64_t seed = 0;
        if (args.size() != 4 || !parse_double(args[0], mean) || !parse_double(args[1], sd) ||
            !parse_int(args[2], n) || !parse_int(args[3], seed)) {
            throw ParameterError("expected normal:mean,sd,n,seed, got '" + std::string(spec) + "'");
        }
        return sample_normal(n, mean, sd, seed);
    }
    if (kind == "grid") {
        double lo = 0.0, hi = 0.0;
        std::size_t n = 0;
        if (args.size() != 3 || !parse_double(args[0], lo) || !parse_double(args[1], hi) || !parse_int(args[2], n)) {
            throw ParameterError("expected grid:lo,hi,n, got '" + std::string(spec) + "'");
        }
        return sample_grid(lo, hi, n);
    }
    throw ParameterError("unknown sample source kind '" + std::string(kind) + "'");
}

// ============================================================================
// Metrics
// ============================================================================

double mse(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size() || pred.empty()) {
        throw ParameterError("mse: need equal nonzero lengths, got " + std::to_string(pred.size()) + " and " +
                             std::to_string(truth.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = truth[i] - pred[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size() || pred.empty()) {
        throw ParameterError("accuracy: need equal nonzero lengths, got " + std::to_string(pred.size()) + " and " +
                             std::to_string(truth.size()));
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

// ============================================================================
// Blobs
// ============================================================================

Blobs make_blobs(std::size_t n_per_class, int num_classes, std::size_t dim, double spread, std::uint64_t seed) {
    if (n_per_class < 1 || num_classes < 1 || dim < 1 || !(spread > 0.0)) {
        throw ParameterError("make_blobs: all arguments must be positive");
    }
    Prng rng(seed);
    // Class c sits at +2 e_c, then -2 e_(c-dim): pairwise center distance is
    // at least 2*sqrt(2). Classes beyond 2*dim get seeded centers in [-2, 2]^dim.
    std::vector<std::vector<double>> centers(static_cast<std::size_t>(num_classes), std::vector<double>(dim, 0.0));
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (c < 2 * dim) {
            centers[c][c % dim] = c < dim ? kBlobRadius : -kBlobRadius;
        } else {
            for (auto& v : centers[c]) v = rng.uniform(-kBlobRadius, kBlobRadius);
        }
    }

    Blobs out;
    out.train.split = Split::Train;
    out.test.split = Split::Test;
    for (LabeledSet* s : {&out.train, &out.test}) {
        s->num_classes = num_classes;
        s->dim = dim;
    }
    const std::size_t n_train = n_per_class - n_per_class / 5;
    for (int c = 0; c < num_classes; ++c) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            std::vector<double> p(dim);
            for (std::size_t d = 0; d < dim; ++d) p[d] = centers[static_cast<std::size_t>(c)][d] + spread * rng.normal();
            LabeledSet& dst = i < n_train ? out.train : out.test;
            dst.points.push_back(std::move(p));
            dst.labels.push_back(c);
        }
    }
    for (LabeledSet* s : {&out.train, &out.test}) {
        for (std::size_t i = s->size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.below(i));
            std::swap(s->points[i - 1], s->points[j]);
            std::swap(s->labels[i - 1], s->labels[j]);
        }
    }
    return out;
}

// ============================================================================
// Methods
// ============================================================================

const std::vector<std::string>& registered_methods() {
    static const std::vector<std::string> names = [] {
        auto v = relu_free_methods();
        v.emplace_back("relu");
        v.emplace_back("kernel-fit");
        return v;
    }();
    return names;
}

bool is_registered_method(std::string_view name) {
    const auto& m = registered_methods();
    return std::find(m.begin(), m.end(), name) != m.end();
}

NamedMethod builtin_method(std::string_view name) {
    if (name == "kernel-paper") return {"kernel-paper", poly::make_kernel_paper()};
    if (name == "x-squared") return {"x-squared", poly::make_x_squared()};
    if (name == "fastercryptonets") return {"fastercryptonets", poly::make_fastercryptonets()};
    if (name == "chebyshev-3") return {"chebyshev-3", poly::cheb_to_monomial(poly::chebyshev_relu(3))};
    if (name == "chebyshev-5") return {"chebyshev-5", poly::cheb_to_monomial(poly::chebyshev_relu(5))};
    throw ParameterError("unknown method '" + std::string(name) +
                         "' (expected kernel-paper, x-squared, fastercryptonets, chebyshev-3, chebyshev-5)");
}

std::vector<NamedMethod> default_methods() {
    std::vector<NamedMethod> out;
    for (const auto& name : relu_free_methods()) out.push_back(builtin_method(name));
    return out;
}

BenchReport compare_methods(const SampleSet& samples, const std::vector<NamedMethod>& methods, std::uint64_t seed) {
    if (samples.values.empty()) throw ParameterError("compare_methods: empty sample set");
    if (methods.empty()) throw ParameterError("compare_methods: no methods");
    std::vector<double> truth(samples.size());
    std::transform(samples.values.begin(), samples.values.end(), truth.begin(), poly::relu);
    BenchReport report;
    const std::string tag = samples.tag();
    for (const auto& m : methods) {
        const auto t0 = Clock::now();
        const auto pred = poly::eval_batch(m.polynomial, samples.values);
        const double err = mse(pred, truth);
        BenchRow row;
        row.method = m.name;
        row.dataset = tag;
        row.mse = err;
        row.levels = poly::mult_depth(m.polynomial);
        row.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
        row.seed = seed;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ============================================================================
// Timing
// ============================================================================

Measurement measure(const std::function<void()>& op, int repetitions) {
    if (repetitions < 3) throw ParameterError("measure: repetitions must be >= 3");
    static std::atomic<bool> busy{false};
    if (busy.exchange(true)) throw std::logic_error("measure: another measurement is running");
    struct Release {
        ~Release() { busy.store(false); }
    } release;

    std::vector<double> t(static_cast<std::size_t>(repetitions));
    for (auto& v : t) {
        const auto t0 = Clock::now();
        op();
        v = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    std::sort(t.begin(), t.end());
    const std::size_t mid = t.size() / 2;
    Measurement m;
    m.median_s = t.size() % 2 == 1 ? t[mid] : 0.5 * (t[mid - 1] + t[mid]);
    m.min_s = t.front();
    m.max_s = t.back();
    return m;
}

std::string platform_string() {
    std::string os =
#if defined(__linux__)
        "linux";
#elif defined(__APPLE__)
        "macos";
#elif defined(_WIN32)
        "windows";
#else
        "unknown-os";
#endif
    std::string arch =
#if defined(__x86_64__) || defined(_M_X64)
        "x86_64";
#elif defined(__aarch64__)
        "aarch64";
#else
        "unknown-arch";
#endif
    std::string compiler =
#if defined(__clang__)
        "clang-" + std::to_string(__clang_major__) + "." + std::to_string(__clang_minor__);
#elif defined(__GNUC__)
        "gcc-" + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__);
#else
        "unknown-compiler";
#endif
    return os + "-" + arch + "-" + compiler;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ============================================================================
// Serialization
// ============================================================================

void validate_report(const BenchReport& report) {
    for (const auto& r : report.rows) {
        if (!is_registered_method(r.method)) throw ParameterError("unregistered method '" + r.method + "'");
        const bool bad = !(r.mse >= 0.0) || !(r.wall_time_s >= 0.0) || (r.accuracy && !(*r.accuracy >= 0.0)) ||
                         (r.levels && *r.levels < 0);
        if (bad) throw ParameterError("negative or non-finite metric in row for '" + r.method + "'");
    }
}

std::string report_to_csv(const BenchReport& report) {
    std::string out = kCsvHeader + "\n";
    for (const auto& r : report.rows) {
        out += csv_field(r.method) + "," + csv_field(r.dataset) + "," + format_fixed(r.mse, 6) + ",";
        if (r.accuracy) out += format_fixed(*r.accuracy, 6);
        out += ",";
        if (r.levels) out += std::to_string(*r.levels);
        out += "," + format_fixed(r.wall_time_s, 6) + ",";
        if (r.ct_bytes) out += std::to_string(*r.ct_bytes);
        out += "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string report_to_json(const BenchReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["method"] = r.method;
        row["dataset"] = r.dataset;
        row["mse"] = r.mse;
        row["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
        row["levels"] = r.levels ? nlohmann::json(*r.levels) : nlohmann::json(nullptr);
        row["wall_time_s"] = r.wall_time_s;
        row["ct_bytes"] = r.ct_bytes ? nlohmann::json(*r.ct_bytes) : nlohmann::json(nullptr);
        row["seed"] = r.seed;
        rows.push_back(std::move(row));
    }
    nlohmann::json j;
    j["rows"] = std::move(rows);
    j["environment"] = {{"timestamp", report.environment.timestamp},
                        {"platform", report.environment.platform},
                        {"params_digest", report.environment.params_digest}};
    return dump_fixed(j, 6);
}

BenchReport report_from_csv(std::string_view text) {
    auto lines = split(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty() || trim(lines[0]) != kCsvHeader) throw ParseError("missing report header", 1);
    BenchReport report;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto f = csv_record(trim(lines[i]), line_no);
        if (f.size() != 8) throw ParseError("expected 8 fields, got " + std::to_string(f.size()), line_no);
        BenchRow r;
        r.method = f[0];
        r.dataset = f[1];
        auto need_double = [&](const std::string& s, const char* what) {
            double v = 0.0;
            if (!parse_double(s, v)) throw ParseError(std::string("bad ") + what + " '" + s + "'", line_no);
            return v;
        };
        r.mse = need_double(f[2], "mse");
        if (!f[3].empty()) r.accuracy = need_double(f[3], "accuracy");
        if (!f[4].empty()) {
            int lv = 0;
            if (!parse_int(f[4], lv)) throw ParseError("bad levels '" + f[4] + "'", line_no);
            r.levels = lv;
        }
        r.wall_time_s = need_double(f[5], "wall_time_s");
        if (!f[6].empty()) {
            std::size_t b = 0;
            if (!parse_int(f[6], b)) throw ParseError("bad ct_bytes '" + f[6] + "'", line_no);
            r.ct_bytes = b;
        }
        if (!parse_int(f[7], r.seed)) throw ParseError("bad seed '" + f[7] + "'", line_no);
        report.rows.push_back(std::move(r));
    }
    validate_report(report);
    return report;
}

BenchReport report_from_json(std::string_view text) {
    BenchReport report;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto& row : j.at("rows")) {
            BenchRow r;
            r.method = row.at("method").get<std::string>();
            r.dataset = row.at("dataset").get<std::string>();
            r.mse = row.at("mse").get<double>();
            if (!row.at("accuracy").is_null()) r.accuracy = row.at("accuracy").get<double>();
            if (!row.at("levels").is_null()) r.levels = row.at("levels").get<int>();
            r.wall_time_s = row.at("wall_time_s").get<double>();
            if (!row.at("ct_bytes").is_null()) r.ct_bytes = row.at("ct_bytes").get<std::size_t>();
            r.seed = row.at("seed").get<std::uint64_t>();
            report.rows.push_back(std::move(r));
        }
        const auto& env = j.at("environment");
        report.environment = {env.at("timestamp").get<std::string>(), env.at("platform").get<std::string>(),
                              env.at("params_digest").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what(), 0);
    }
    validate_report(report);
    return report;
}

void emit_report(const BenchReport& report, Format format, const std::string& path) {
    validate_report(report);
    const std::string text = format == Format::Csv ? report_to_csv(report) : report_to_json(report);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace heact::eval
