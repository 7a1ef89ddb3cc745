// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "heact/approx.hpp"
#include "heact/error.hpp"
#include "heact/eval.hpp"
#include "heact/random.hpp"

namespace heact::approx {
namespace {

std::vector<double> relu_of(std::span<const double> xs) {
    std::vector<double> y(xs.size());
    std::transform(xs.begin(), xs.end(), y.begin(), poly::relu);
    return y;
}

// Continuous least-squares optimum of a degree-d fit to relu on [-1, 1] under
// the uniform measure, by Legendre projection with an n-node midpoint rule.
// Returns {coefficients in the Legendre basis, mean squared error}.
std::pair<std::vector<double>, double> legendre_optimum(int d, int nodes) {
    auto legendre = [](int k, double x) {
        double p0 = 1.0, p1 = x;
        if (k == 0) return p0;
        for (int j = 1; j < k; ++j) {
            const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
            p0 = p1;
            p1 = p2;
        }
        return p1;
    };
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    const double h = 2.0 / nodes;
    for (int i = 0; i < nodes; ++i) {
        const double x = -1.0 + (i + 0.5) * h;
        for (int k = 0; k <= d; ++k) c[static_cast<std::size_t>(k)] += poly::relu(x) * legendre(k, x) * h;
    }
    for (int k = 0; k <= d; ++k) c[static_cast<std::size_t>(k)] *= (2.0 * k + 1.0) / 2.0;
    double err = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double x = -1.0 + (i + 0.5) * h;
        double p = 0.0;
        for (int k = 0; k <= d; ++k) p += c[static_cast<std::size_t>(k)] * legendre(k, x);
        err += (p - poly::relu(x)) * (p - poly::relu(x)) * h;
    }
    return {c, err / 2.0};
}

const PipelineResult& normal_pipeline() {
    static const PipelineResult r = [] {
        const auto train = eval::sample_normal(2048, 0.0, 1.0, 7);
        const auto val = eval::sample_normal(2048, 0.0, 1.0, 8);
        return run_pipeline(train.values, val.values, 2, 1e-3);
    }();
    return r;
}

// ---------------------------------------------------------------------------
// Kernel

TEST(Kernel, Values) {
    EXPECT_NEAR(kernel_value(0.0, 3.7), 0.761594, 1e-6);
    EXPECT_EQ(kernel_value(1.0, -1.0), 0.0);
    EXPECT_NEAR(kernel_value(2.0, 2.0), 0.999909, 1e-6);
}

TEST(Kernel, SymmetricExactly) {
    Prng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.uniform(-5.0, 5.0), y = rng.uniform(-5.0, 5.0);
        ASSERT_EQ(kernel_value(x, y), kernel_value(y, x));
    }
}

TEST(KernelRidge, ZeroTargetsGiveZeroWeights) {
    const auto xs = eval::sample_grid(-1.0, 1.0, 64).values;
    const std::vector<double> ys(xs.size(), 0.0);
    const auto m = fit_kernel_ridge(xs, ys, 1e-3);
    for (double a : m.dual_weights) EXPECT_LE(std::fabs(a), 1e-10);
    EXPECT_EQ(kernel_predict(m, 0.3), 0.0);
}

TEST(KernelRidge, Preconditions) {
    const std::vector<double> xs{0.0, 1.0}, ys{0.0};
    EXPECT_THROW(fit_kernel_ridge(xs, ys, 1e-3), ParameterError);
    EXPECT_THROW(fit_kernel_ridge(std::vector<double>{1.0}, std::vector<double>{1.0}, 1e-3), ParameterError);
    EXPECT_THROW(fit_kernel_ridge(xs, std::vector<double>{0.0, 1.0}, 0.0), ParameterError);
    EXPECT_THROW(fit_kernel_ridge(xs, std::vector<double>{0.0, 1.0}, -1.0), ParameterError);
}

TEST(KernelRidge, SolveResidualAndSupportPredictions) {
    const auto xs = eval::sample_normal(400, 0.0, 1.0, 3).values;
    const auto ys = relu_of(xs);
    const auto m = fit_kernel_ridge(xs, ys, 1e-3);
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = std::tanh(xs[i] * xs[j] + 1.0);
    }
    const Eigen::Map<const Eigen::VectorXd> alpha(m.dual_weights.data(), n);
    const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
    const Eigen::VectorXd r = g * alpha + 1e-3 * alpha - y;
    EXPECT_LT(r.norm() / y.norm(), 1e-8);
    const Eigen::VectorXd fitted = g * alpha;
    for (Eigen::Index i = 0; i < n; i += 37) EXPECT_NEAR(kernel_predict(m, xs[i]), fitted(i), 1e-9);
}

TEST(KernelRidge, HeavyRidgeShrinksPredictions) {
    const auto xs = eval::sample_grid(-1.0, 1.0, 128).values;
    const auto ys = relu_of(xs);
    const double lambda = 1e6;
    const auto m = fit_kernel_ridge(xs, ys, lambda);
    double g_max = 0.0;
    for (double a : xs) {
        for (double b : xs) g_max = std::max(g_max, std::fabs(kernel_value(a, b)));
    }
    const double bound = 1.0 * (g_max / lambda) * static_cast<double>(xs.size());
    for (double x : xs) EXPECT_LT(std::fabs(kernel_predict(m, x)), bound);
}

// 512 equispaced points on [-1, 1] with lambda = 1e-3. G + lambda I has an
// eigenvalue near 2.5e-4 whose eigenvector carries part of relu's kink, so
// the ridge penalty leaves training MSE at 1.8334e-3; the value was confirmed
// with an independent float64 solve. The prediction at 0.5 is close.
TEST(KernelRidge, DenseGridFit) {
    const auto xs = eval::sample_grid(-1.0, 1.0, 512).values;
    const auto ys = relu_of(xs);
    const auto m = fit_kernel_ridge(xs, ys, 1e-3);
    const double train_mse = eval::mse(kernel_predict(m, xs), ys);
    EXPECT_NEAR(train_mse, 1.8334e-3, 2e-7);
    EXPECT_NEAR(kernel_predict(m, 0.5), 0.5, 0.05);
}

// ---------------------------------------------------------------------------
// polyfit

TEST(Polyfit, InterpolatesSquare) {
    const std::vector<double> xs{-1.0, 0.0, 1.0}, ys{1.0, 0.0, 1.0};
    const auto r = polyfit(xs, ys, 2);
    const auto& c = r.polynomial.coeffs();
    ASSERT_EQ(c.size(), 3u);
    EXPECT_NEAR(c[0], 0.0, 1e-10);
    EXPECT_NEAR(c[1], 0.0, 1e-10);
    EXPECT_NEAR(c[2], 1.0, 1e-10);
    EXPECT_EQ(r.degree, 2);
}

TEST(Polyfit, RecoversPlantedKernelPolynomial) {
    const auto truth = poly::make_kernel_paper();
    Prng rng(8);
    std::vector<double> xs(100);
    for (auto& x : xs) x = rng.uniform(-1.0, 1.0);
    const auto ys = poly::eval_batch(truth, xs);
    const auto r = polyfit(xs, ys, 2);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.polynomial.coeffs()[k], truth.coeffs()[k], 1e-9);
    EXPECT_LT(r.train_mse, 1e-20);
}

TEST(Polyfit, DenseGridMatchesContinuousOptimum) {
    const auto [legendre, optimum_mse] = legendre_optimum(2, 100000);
    // Closed form: relu ~ 3/32 + x/2 + 15/32 x^2 with MSE 1/768.
    EXPECT_NEAR(optimum_mse, 1.0 / 768.0, 1e-8);
    EXPECT_NEAR(legendre[0] - legendre[2] / 2.0, 3.0 / 32.0, 1e-8);

    const auto xs = eval::sample_grid(-1.0, 1.0, 2048).values;
    const auto r = polyfit(xs, relu_of(xs), 2);
    EXPECT_NEAR(r.train_mse, optimum_mse, 1e-3);
    EXPECT_NEAR(r.train_mse, optimum_mse, 1e-5);
    EXPECT_NEAR(r.polynomial.coeffs()[0], 3.0 / 32.0, 2e-3);
    EXPECT_NEAR(r.polynomial.coeffs()[2], 15.0 / 32.0, 2e-3);
}

TEST(Polyfit, NestedModelsNeverLoseGround) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto xs = eval::sample_normal(500, 0.0, 1.0, seed).values;
        Prng rng(seed + 100);
        std::vector<double> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = poly::relu(xs[i]) + 0.1 * rng.normal();
        double prev = INFINITY;
        for (int d = 0; d <= 7; ++d) {
            const double mse = polyfit(xs, ys, d).train_mse;
            EXPECT_LE(mse, prev + 1e-12) << "degree " << d;
            prev = mse;
        }
    }
}

TEST(Polyfit, ResidualOrthogonalToDesign) {
    const auto xs = eval::sample_normal(1000, 0.0, 1.0, 9).values;
    const auto ys = relu_of(xs);
    for (int d = 1; d <= 5; ++d) {
        const auto r = polyfit(xs, ys, d);
        std::vector<double> res(xs.size());
        double r_norm = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            res[j] = ys[j] - r.polynomial(xs[j]);
            r_norm += res[j] * res[j];
        }
        r_norm = std::sqrt(r_norm);
        for (int k = 0; k <= d; ++k) {
            double dot = 0.0, col = 0.0;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                const double v = std::pow(xs[j], k);
                dot += v * res[j];
                col += v * v;
            }
            EXPECT_LE(std::fabs(dot), 1e-7 * r_norm * std::sqrt(col)) << "degree " << d << " column " << k;
        }
    }
}

TEST(Polyfit, ConditionStaysSmallOnMappedInputs) {
    const auto xs = eval::sample_normal(2048, 0.0, 1.0, 4).values;
    const auto r = polyfit(xs, relu_of(xs), 5);
    EXPECT_LT(r.design_condition, 1e4);
    EXPECT_GE(r.design_condition, 1.0);
}

TEST(Polyfit, Errors) {
    EXPECT_THROW(polyfit(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}, 2), ParameterError);
    EXPECT_THROW(polyfit(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}, 0), ParameterError);
    try {
        polyfit(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<double>{1.0, 2.0, 3.0, 4.0}, 1);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("condition estimate"), std::string::npos);
    }
}

TEST(Polyfit, DegreeZeroIsTheMean) {
    const std::vector<double> xs{0.1, 0.4, 0.9}, ys{1.0, 2.0, 6.0};
    EXPECT_NEAR(polyfit(xs, ys, 0).polynomial.coeffs()[0], 3.0, 1e-14);
}

// ---------------------------------------------------------------------------
// Pipeline

TEST(Pipeline, NormalDegreeTwoQuality) {
    const auto& r = normal_pipeline();
    EXPECT_LE(r.report.val_mse, 0.06);
    EXPECT_EQ(r.polynomial.degree(), 2);
    EXPECT_EQ(r.report.degree, 2);
    EXPECT_EQ(r.kernel.support_x.size(), 2048u);
}

TEST(Pipeline, BitwiseDeterministic) {
    const auto train = eval::sample_normal(600, 0.0, 1.0, 7);
    const auto val = eval::sample_normal(600, 0.0, 1.0, 8);
    const auto a = run_pipeline(train.values, val.values, 3);
    const auto b = run_pipeline(train.values, val.values, 3);
    EXPECT_EQ(a.polynomial.coeffs(), b.polynomial.coeffs());
    EXPECT_EQ(a.report.val_mse, b.report.val_mse);
}

TEST(Pipeline, SmoothingKeepsDegreeTwoFidelity) {
    const auto val = eval::sample_normal(2048, 0.0, 1.0, 8).values;
    const auto direct = polyfit(val, relu_of(val), 2);
    const double direct_val = eval::mse(poly::eval_batch(direct.polynomial, val), relu_of(val));
    EXPECT_LE(normal_pipeline().report.val_mse, direct_val + 0.01);
}

TEST(Pipeline, InterceptOnUnitInterval) {
    const auto train = eval::sample_grid(-1.0, 1.0, 512);
    const auto val = eval::sample_grid(-1.0, 1.0, 2048);
    const auto r = run_pipeline(train.values, val.values, 2);
    const double at_zero = r.polynomial(0.0);
    EXPECT_GE(at_zero, 0.0);
    EXPECT_LE(at_zero, 0.15);
}

TEST(Pipeline, PositiveValidationBeatsSquare) {
    const auto train = eval::sample_normal(1024, 0.0, 1.0, 7);
    const auto val = eval::sample_grid(0.5, 1.0, 256);
    const auto r = run_pipeline(train.values, val.values, 2);
    const auto truth = relu_of(val.values);
    const double square = eval::mse(poly::eval_batch(poly::make_x_squared(), val.values), truth);
    EXPECT_LE(r.report.val_mse, square);
}

TEST(Pipeline, SubsampleIsDeterministicAndOrdered) {
    const auto xs = eval::sample_normal(5000, 0.0, 1.0, 2).values;
    const auto a = subsample(xs, 2048, kSupportSeed);
    EXPECT_EQ(a.size(), 2048u);
    EXPECT_EQ(a, subsample(xs, 2048, kSupportSeed));
    EXPECT_EQ(subsample(std::span<const double>(xs).first(100), 2048, 1).size(), 100u);
}

// ---------------------------------------------------------------------------
// Degree sweep

TEST(Sweep, LevelsAndLatencyOrdering) {
    const auto train = eval::sample_normal(512, 0.0, 1.0, 7);
    const auto val = eval::sample_normal(512, 0.0, 1.0, 8);
    const auto rows = degree_sweep(train.values, val.values, {2, 3, 4, 5}, 1e-3, he::CkksParams::fast());
    ASSERT_EQ(rows.size(), 4u);
    std::vector<int> levels;
    for (const auto& r : rows) {
        levels.push_back(r.cost.levels);
        EXPECT_EQ(r.cost.status, "ok");
        EXPECT_LE(std::fabs(r.cost.enc_mse - r.fit.val_mse), 1e-3);
        EXPECT_GT(r.cost.ct_bytes, 0u);
    }
    EXPECT_EQ(levels, (std::vector<int>{2, 3, 3, 4}));
    EXPECT_LT(rows[0].cost.enc_latency_s, rows[3].cost.enc_latency_s);
    EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.selected; }), 1);
}

TEST(Sweep, DepthExceededIsReportedInRow) {
    const auto chain3 = he::CkksParams::generate(1024, {60, 40, 40, 40}, 61, 40);
    ASSERT_EQ(chain3.max_level(), 3);
    const auto train = eval::sample_normal(128, 0.0, 1.0, 7);
    const auto val = eval::sample_normal(128, 0.0, 1.0, 8);
    const auto rows = degree_sweep(train.values, val.values, {9, 2}, 1e-3, chain3);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].cost.status, kDepthExceeded);
    EXPECT_EQ(rows[0].cost.levels, 5);
    EXPECT_FALSE(rows[0].selected);
    EXPECT_EQ(rows[1].cost.status, "ok");
}

TEST(Sweep, SingleDegreeIsSelected) {
    const auto train = eval::sample_normal(128, 0.0, 1.0, 7);
    const auto val = eval::sample_normal(128, 0.0, 1.0, 8);
    const auto rows = degree_sweep(train.values, val.values, {2}, 1e-3, he::CkksParams::fast());
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].selected);
}

TEST(Sweep, FivePercentRule) {
    auto row = [](int degree, double val_mse, const char* status = "ok") {
        SweepRow r;
        r.fit.degree = degree;
        r.fit.val_mse = val_mse;
        r.cost.status = status;
        return r;
    };
    EXPECT_EQ(select_degree({row(2, 0.0104), row(3, 0.0101), row(4, 0.0100)}), 0);
    EXPECT_EQ(select_degree({row(2, 0.0110), row(3, 0.0101), row(4, 0.0100)}), 1);
    EXPECT_EQ(select_degree({row(5, 0.001, kDepthExceeded), row(2, 0.01)}), 1);
    EXPECT_EQ(select_degree({row(5, 0.001, kDepthExceeded)}), -1);
}

TEST(Sweep, SerializedColumns) {
    SweepRow r;
    r.fit.degree = 2;
    r.fit.polynomial = poly::make_kernel_paper();
    r.cost.levels = 2;
    r.cost.enc_latency_s = 0.5;
    r.selected = true;
    const auto csv = sweep_to_csv({r}, false);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "degree,coeffs,train_mse,val_mse,enc_mse,levels,enc_latency_s,total_s,ct_bytes,selected,status");
    EXPECT_NE(csv.find("0.082261;0.495588;0.444488"), std::string::npos);
    EXPECT_NE(csv.find(",0.000000,0.000000,0,true,ok"), std::string::npos);
    const auto j = sweep_to_json({r}, true);
    EXPECT_EQ(j[0]["enc_latency_s"].get<double>(), 0.5);
    for (const auto& col : sweep_columns()) EXPECT_TRUE(j[0].contains(col)) << col;
}

}  // namespace
}  // namespace heact::approx
