// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/approx.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/Dense>

#include "heact/error.hpp"
#include "heact/random.hpp"

namespace heact::approx {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double mean_squared(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

// Coefficients of q((x - m) / h) in powers of x, given q's coefficients in u.
std::vector<double> unmap_coefficients(const std::vector<double>& q, double m, double h) {
    const std::size_t n = q.size();
    std::vector<double> out(n, 0.0);
    std::vector<double> pow{1.0};  // ((x - m) / h)^k in powers of x
    const double a = 1.0 / h;
    const double b = -m / h;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < pow.size(); ++i) out[i] += q[k] * pow[i];
        std::vector<double> next(pow.size() + 1, 0.0);
        for (std::size_t i = 0; i < pow.size(); ++i) {
            next[i] += b * pow[i];
            next[i + 1] += a * pow[i];
        }
        pow = std::move(next);
    }
    return out;
}

}  // namespace

double kernel_value(double x, double xp) { return std::tanh(x * xp + 1.0); }

KernelModel fit_kernel_ridge(std::span<const double> xs, std::span<const double> ys, double lambda) {
    if (xs.size() != ys.size()) {
        throw ParameterError("fit_kernel_ridge: " + std::to_string(xs.size()) + " inputs but " +
                             std::to_string(ys.size()) + " targets");
    }
    if (xs.size() < 2) throw ParameterError("fit_kernel_ridge: need at least two points");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("fit_kernel_ridge: lambda must be > 0");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw ParameterError("fit_kernel_ridge: non-finite training value");
        }
    }

    const auto n = static_cast<Eigen::Index>(xs.size());
    KernelModel model;
    model.support_x.assign(xs.begin(), xs.end());
    model.ridge_lambda = lambda;

    const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
    if (y.isZero(0.0)) {
        model.dual_weights.assign(xs.size(), 0.0);
        return model;
    }

    Eigen::MatrixXd a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double k = kernel_value(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]);
            a(i, j) = k;
            a(j, i) = k;
        }
        a(j, j) += lambda;
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd alpha = lu.solve(y);
    const double y_norm = y.norm();
    double rel = 0.0;
    for (int step = 0; step < 3; ++step) {
        const Eigen::VectorXd r = y - a * alpha;
        rel = r.norm() / y_norm;
        if (!std::isfinite(rel)) break;
        if (rel < 1e-12) break;
        alpha += lu.solve(r);
    }
    const Eigen::VectorXd r = y - a * alpha;
    rel = r.norm() / y_norm;
    if (!alpha.allFinite() || !std::isfinite(rel)) throw NumericError("fit_kernel_ridge: solve produced non-finite weights");
    if (rel >= 1e-8) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "fit_kernel_ridge: relative residual %.3e above 1e-8", rel);
        throw NumericError(buf);
    }
    model.dual_weights.assign(alpha.data(), alpha.data() + n);
    return model;
}

double kernel_predict(const KernelModel& model, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.support_x.size(); ++i) {
        acc += model.dual_weights[i] * kernel_value(x, model.support_x[i]);
    }
    return acc;
}

std::vector<double> kernel_predict(const KernelModel& model, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = kernel_predict(model, xs[i]);
    return out;
}

FitReport polyfit(std::span<const double> xs, std::span<const double> ys, int degree, poly::Interval interval) {
    const auto t0 = Clock::now();
    if (degree < 0) throw ParameterError("polyfit: degree must be >= 0");
    if (xs.size() != ys.size()) {
        throw ParameterError("polyfit: " + std::to_string(xs.size()) + " inputs but " +
                             std::to_string(ys.size()) + " targets");
    }
    if (xs.size() <= static_cast<std::size_t>(degree)) {
        throw ParameterError("polyfit: " + std::to_string(xs.size()) + " points cannot determine a degree-" +
                             std::to_string(degree) + " polynomial");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw ParameterError("polyfit: non-finite sample");
    }

    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double mid = 0.5 * (*lo_it + *hi_it);
    const double half = 0.5 * (*hi_it - *lo_it);
    const double h = half > 0.0 ? half : 1.0;

    const auto n = static_cast<Eigen::Index>(xs.size());
    const Eigen::Index cols = degree + 1;
    Eigen::MatrixXd v(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = (xs[static_cast<std::size_t>(i)] - mid) / h;
        double p = 1.0;
        for (Eigen::Index k = 0; k < cols; ++k) {
            v(i, k) = p;
            p *= u;
        }
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(cond < 1e12)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "polyfit: rank-deficient design matrix (condition estimate %.3e)", cond);
        throw NumericError(buf);
    }

    const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
    const Eigen::VectorXd q = v.householderQr().solve(y);
    if (!q.allFinite()) throw NumericError("polyfit: solve produced non-finite coefficients");

    const std::vector<double> in_u(q.data(), q.data() + cols);
    poly::Polynomial p(unmap_coefficients(in_u, mid, h), interval);

    FitReport report;
    report.degree = degree;
    report.polynomial = p;
    report.train_mse = mean_squared(poly::eval_batch(p, xs), ys);
    report.design_condition = cond;
    report.fit_seconds = seconds_since(t0);
    return report;
}

std::vector<double> subsample(std::span<const double> xs, std::size_t cap, std::uint64_t seed) {
    if (xs.size() <= cap) return {xs.begin(), xs.end()};
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Prng rng(seed);
    for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(xs.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    std::vector<double> out(cap);
    for (std::size_t i = 0; i < cap; ++i) out[i] = xs[idx[i]];
    return out;
}

PipelineResult fit_on_smoother(const KernelModel& kernel, std::span<const double> val, int degree) {
    if (val.empty()) throw ParameterError("run_pipeline: empty validation set");
    const auto t0 = Clock::now();
    const auto smoothed = kernel_predict(kernel, val);
    FitReport report = polyfit(val, smoothed, degree);
    std::vector<double> truth(val.size());
    std::transform(val.begin(), val.end(), truth.begin(), poly::relu);
    report.val_mse = mean_squared(poly::eval_batch(report.polynomial, val), truth);
    report.fit_seconds = seconds_since(t0);
    return PipelineResult{report.polynomial, report, kernel};
}

PipelineResult run_pipeline(std::span<const double> train, std::span<const double> val, int degree, double lambda) {
    if (train.empty()) throw ParameterError("run_pipeline: empty training set");
    if (degree < 0) throw ParameterError("run_pipeline: degree must be >= 0");
    const auto t0 = Clock::now();
    const auto support = subsample(train, kSupportCap, kSupportSeed);
    std::vector<double> targets(support.size());
    std::transform(support.begin(), support.end(), targets.begin(), poly::relu);
    const KernelModel kernel = fit_kernel_ridge(support, targets, lambda);
    PipelineResult result = fit_on_smoother(kernel, val, degree);
    result.report.fit_seconds = seconds_since(t0);
    return result;
}

}  // namespace heact::approx
