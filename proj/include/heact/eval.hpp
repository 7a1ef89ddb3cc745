// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_EVAL_HPP
#define HEACT_EVAL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "heact/poly.hpp"

namespace heact::eval {

// ---------------------------------------------------------------------------
// Sample sources

struct NormalSource {
    double mean = 0.0;
    double sd = 1.0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};
struct FileSource {
    std::string path;
    std::size_t count = 0;
};
struct GridSource {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t n = 0;
};
using Provenance = std::variant<NormalSource, FileSource, GridSource>;

/// Scalar samples plus where they came from. |values| equals the declared
/// size in the provenance and every value is finite.
struct SampleSet {
    std::vector<double> values;
    Provenance provenance;

    std::size_t size() const { return values.size(); }
    /// Comma-free dataset tag, e.g. "normal(mean=0 sd=0.5 n=100000 seed=1)".
    std::string tag() const;
};

/// n Box-Muller draws from one splitmix64 stream.
SampleSet sample_normal(std::size_t n, double mean, double sd, std::uint64_t seed);
/// n equispaced points including both ends (n == 1 gives lo).
SampleSet sample_grid(double lo, double hi, std::size_t n);
/// One decimal per line, optional "value" header, blank trailing lines
/// ignored. ParseError carries the 1-based line of the first bad row;
/// ParameterError for an empty file; IoError when the file cannot be read.
SampleSet load_scalars_csv(const std::string& path);
/// Parses `normal:mean,sd,n,seed`, `grid:lo,hi,n` or `file:path`.
SampleSet sample_from_spec(std::string_view spec);

// ---------------------------------------------------------------------------
// Metrics

double mse(std::span<const double> pred, std::span<const double> truth);
double accuracy(std::span<const int> pred, std::span<const int> truth);

// ---------------------------------------------------------------------------
// Labeled data

enum class Split { Train, Test };

struct LabeledSet {
    std::vector<std::vector<double>> points;
    std::vector<int> labels;
    Split split = Split::Train;
    int num_classes = 0;
    std::size_t dim = 0;

    std::size_t size() const { return labels.size(); }
};

struct Blobs {
    LabeledSet train;
    LabeledSet test;
};

/// Isotropic Gaussian clusters of the given spread around centers on the
/// signed coordinate axes at radius 2, split 80/20 per class and shuffled.
/// The seed drives the noise, the shuffles and any centers past 2*dim.
Blobs make_blobs(std::size_t n_per_class, int num_classes, std::size_t dim, double spread,
                 std::uint64_t seed);

// ---------------------------------------------------------------------------
// Methods and reports

/// Every method name a BenchReport row may carry.
const std::vector<std::string>& registered_methods();
bool is_registered_method(std::string_view name);

struct NamedMethod {
    std::string name;
    poly::Polynomial polynomial;
};

/// Polynomial for a fixed registered method: kernel-paper, x-squared,
/// fastercryptonets, chebyshev-3, chebyshev-5 (Chebyshev on (-1, 1)).
NamedMethod builtin_method(std::string_view name);
/// The five comparison methods above, in that order.
std::vector<NamedMethod> default_methods();

struct BenchRow {
    std::string method;
    std::string dataset;
    double mse = 0.0;
    std::optional<double> accuracy;
    std::optional<int> levels;
    double wall_time_s = 0.0;
    std::optional<std::size_t> ct_bytes;
    std::uint64_t seed = 0;
};

struct Environment {
    std::string timestamp;
    std::string platform;
    std::string params_digest;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    Environment environment;
};

/// One row per method: mse of the method against relu over the samples.
BenchReport compare_methods(const SampleSet& samples, const std::vector<NamedMethod>& methods,
                            std::uint64_t seed);

struct Measurement {
    double median_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
    std::optional<std::size_t> bytes;
};

/// Runs op `repetitions` (>= 3) times on the calling thread and reports
/// monotonic-clock statistics. Nested or concurrent calls in one process
/// throw std::logic_error.
Measurement measure(const std::function<void()>& op, int repetitions);

/// Platform string baked in at compile time, for report environments.
std::string platform_string();
/// Current UTC time as ISO-8601.
std::string utc_timestamp();

inline const std::string kCsvHeader = "method,dataset,mse,accuracy,levels,wall_time_s,ct_bytes,seed";

/// Six-decimal floats, LF line endings, optional fields left empty.
std::string report_to_csv(const BenchReport& report);
/// Sorted keys, six-decimal floats, absent optionals written as null.
std::string report_to_json(const BenchReport& report);
/// Inverse of report_to_csv. The environment is not part of the CSV.
BenchReport report_from_csv(std::string_view text);
BenchReport report_from_json(std::string_view text);

enum class Format { Csv, Json };
/// Writes the report; IoError names the path on failure.
void emit_report(const BenchReport& report, Format format, const std::string& path);

/// Rejects negative metrics and unregistered method names.
void validate_report(const BenchReport& report);

}  // namespace heact::eval

#endif  // HEACT_EVAL_HPP
