// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_APPROX_HPP
#define HEACT_APPROX_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "heact/he/params.hpp"
#include "heact/poly.hpp"

namespace heact::approx {

inline constexpr double kDefaultLambda = 1e-3;
/// Largest support set the kernel smoother solves directly; bigger training
/// sets are subsampled with kSupportSeed.
inline constexpr std::size_t kSupportCap = 2048;
inline constexpr std::uint64_t kSupportSeed = 0x5eed5eedULL;

/// tanh(x * xp + 1).
double kernel_value(double x, double xp);

/// Dual form of a kernel ridge regressor over scalar inputs.
struct KernelModel {
    std::vector<double> support_x;
    std::vector<double> dual_weights;
    double ridge_lambda = kDefaultLambda;
    double offset = 1.0;
};

/// Solves (G + lambda I) alpha = y, G[i][j] = kernel_value(x_i, x_j).
///
/// G is indefinite for this kernel, so the solve uses a pivoted LU with
/// iterative refinement rather than a Cholesky factorization. Throws
/// ParameterError on size mismatch, fewer than two points or lambda <= 0, and
/// NumericError when the result is not finite or the relative residual stays
/// above 1e-8.
KernelModel fit_kernel_ridge(std::span<const double> xs, std::span<const double> ys, double lambda);

double kernel_predict(const KernelModel& model, double x);
std::vector<double> kernel_predict(const KernelModel& model, std::span<const double> xs);

struct FitReport {
    int degree = 0;
    poly::Polynomial polynomial{{0.0}};
    double train_mse = 0.0;
    double val_mse = 0.0;
    /// 2-norm condition number of the Vandermonde matrix on the mapped inputs.
    double design_condition = 1.0;
    double fit_seconds = 0.0;
};

/// Least-squares polynomial fit by Householder QR.
///
/// Inputs are mapped affinely onto [-1, 1] before the Vandermonde matrix is
/// formed and the coefficients are expanded back afterwards. train_mse is
/// the achieved mean squared residual; val_mse is left at 0. Throws
/// ParameterError when |xs| != |ys| or |xs| <= degree, NumericError naming
/// the condition estimate when the design is rank deficient.
FitReport polyfit(std::span<const double> xs, std::span<const double> ys, int degree,
                  poly::Interval interval = {});

/// Deterministic subsample of at most `cap` points, kept in input order.
std::vector<double> subsample(std::span<const double> xs, std::size_t cap, std::uint64_t seed);

struct PipelineResult {
    poly::Polynomial polynomial{{0.0}};
    FitReport report;
    KernelModel kernel;
};

/// Kernel smoothing followed by polynomial fitting:
///   1. targets y = relu(x) on train (subsampled to kSupportCap),
///   2. kernel ridge fit,
///   3. kernel predictions on val,
///   4. least-squares polynomial of `degree` through those predictions,
///   5. val_mse measured against relu on val.
PipelineResult run_pipeline(std::span<const double> train, std::span<const double> val, int degree,
                            double lambda = kDefaultLambda);

/// Steps 4-5 of run_pipeline for an already fitted smoother.
PipelineResult fit_on_smoother(const KernelModel& kernel, std::span<const double> val, int degree);

// ---------------------------------------------------------------------------
// Degree sweep

inline constexpr const char* kDepthExceeded = "depth exceeds modulus chain";

struct CostRecord {
    int levels = 0;
    /// MSE vs relu of the decrypted encrypted evaluation on val.
    double enc_mse = 0.0;
    /// Median wall time of one encrypted activation over a full ciphertext.
    double enc_latency_s = 0.0;
    /// Fit plus encrypted evaluation of val, wall time.
    double total_s = 0.0;
    std::size_t ct_bytes = 0;
    /// "ok" or kDepthExceeded.
    std::string status = "ok";
};

struct SweepRow {
    FitReport fit;
    CostRecord cost;
    bool selected = false;
};

struct SweepOptions {
    std::uint64_t key_seed = 1;
    int repetitions = 3;
};

/// Runs the pipeline for every degree against one shared smoother, then
/// evaluates each polynomial under CKKS with `he_params`. A degree whose
/// depth exceeds the chain is reported in-row with status kDepthExceeded.
/// Marks the selected row per select_degree.
std::vector<SweepRow> degree_sweep(std::span<const double> train, std::span<const double> val,
                                   const std::vector<int>& degrees, double lambda,
                                   const he::CkksParams& he_params, const SweepOptions& opts = {});

/// Index of the smallest degree whose val_mse is within 5% of the minimum
/// among rows with status "ok"; -1 when no row qualifies.
int select_degree(const std::vector<SweepRow>& rows);

/// Column order shared by the JSON rows and the CSV export.
const std::vector<std::string>& sweep_columns();
/// One JSON object per row. With include_timing false the wall-clock fields
/// are written as 0 so that repeated runs give identical bytes.
nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows, bool include_timing);
std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool include_timing);

nlohmann::json fit_report_to_json(const FitReport& r, bool include_timing);

}  // namespace heact::approx

#endif  // HEACT_APPROX_HPP
