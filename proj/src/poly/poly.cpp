// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "heact/error.hpp"
#include "heact/json_format.hpp"

namespace heact::poly {

namespace {

void check_interval(Interval iv) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
        throw ParameterError("interval must satisfy lo < hi, got [" + std::to_string(iv.lo) +
                             ", " + std::to_string(iv.hi) + "]");
    }
}

void check_finite(const std::vector<double>& c, const char* what) {
    for (double v : c) {
        if (!std::isfinite(v)) throw ParameterError(std::string(what) + ": non-finite coefficient");
    }
}

}  // namespace

// ============================================================================
// Polynomial
// ============================================================================

Polynomial::Polynomial(std::vector<double> coeffs, Interval interval)
    : coeffs_(std::move(coeffs)), interval_(interval) {
    check_interval(interval_);
    check_finite(coeffs_, "polynomial");
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double Polynomial::operator()(double x) const { return eval(*this, x); }

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial({0.0}, interval_);
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d), interval_);
}

// ============================================================================
// ChebyshevSeries
// ============================================================================

ChebyshevSeries::ChebyshevSeries(std::vector<double> cheb_coeffs, Interval interval)
    : coeffs_(std::move(cheb_coeffs)), interval_(interval) {
    check_interval(interval_);
    check_finite(coeffs_, "chebyshev series");
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double ChebyshevSeries::operator()(double x) const {
    const double u = (x - interval_.mid()) / interval_.half_width();
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
        const double b0 = coeffs_[k] + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return coeffs_[0] + u * b1 - b2;
}

// ============================================================================
// Constructors
// ============================================================================

double relu(double x) { return x > 0.0 ? x : 0.0; }

Polynomial make_x_squared() { return Polynomial({0.0, 0.0, 1.0}); }

Polynomial make_fastercryptonets() { return Polynomial({0.25, 0.5, 0.125}); }

Polynomial make_kernel_paper() { return Polynomial({0.082261, 0.495588, 0.444488}); }

ChebyshevSeries chebyshev_series(const std::function<double(double)>& f, int degree,
                                 Interval interval, int quad_nodes) {
    check_interval(interval);
    if (degree < 0) throw ParameterError("chebyshev degree must be >= 0");
    if (quad_nodes < degree + 1) throw ParameterError("quad_nodes must exceed the degree");

    const auto m = static_cast<std::size_t>(quad_nodes);
    std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
    double abs_sum = 0.0;
    // c_j = (2/M) sum_k f(x(u_k)) T_j(u_k), u_k = cos(theta_k); T_j(u_k) = cos(j theta_k).
    for (std::size_t k = 0; k < m; ++k) {
        const double theta = std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(m);
        const double fx = f(interval.mid() + interval.half_width() * std::cos(theta));
        abs_sum += std::fabs(fx);
        for (std::size_t j = 0; j < c.size(); ++j) c[j] += fx * std::cos(static_cast<double>(j) * theta);
    }
    for (double& v : c) v *= 2.0 / static_cast<double>(m);
    c[0] *= 0.5;
    // Coefficients that cancel by symmetry (odd terms past T1 for relu) come
    // out as summation roundoff; zero them so the monomial form keeps its
    // true degree and does not spend a multiplicative level on noise.
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * abs_sum * 2.0 / static_cast<double>(m);
    for (double& v : c) {
        if (std::fabs(v) <= roundoff) v = 0.0;
    }
    return ChebyshevSeries(std::move(c), interval);
}

ChebyshevSeries chebyshev_relu(int degree, Interval interval, int quad_nodes) {
    if (degree < 1) throw ParameterError("chebyshev_relu: degree must be >= 1");
    if (quad_nodes < 4 * degree) throw ParameterError("chebyshev_relu: quad_nodes must be >= 4*degree");
    return chebyshev_series(relu, degree, interval, quad_nodes);
}

Polynomial cheb_to_monomial(const ChebyshevSeries& series) {
    const auto& c = series.cheb_coeffs();
    const std::size_t n = c.size();

    // Monomial coefficients (in u) of T_k via T_{k+1} = 2u T_k - T_{k-1}.
    std::vector<double> in_u(n, 0.0);
    std::vector<double> t_prev(n, 0.0), t_cur(n, 0.0);
    t_prev[0] = 1.0;
    if (n > 1) t_cur[1] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& tk = k == 0 ? t_prev : t_cur;
        for (std::size_t i = 0; i < n; ++i) in_u[i] += c[k] * tk[i];
        if (k >= 1 && k + 1 < n) {
            std::vector<double> t_next(n, 0.0);
            for (std::size_t i = 0; i + 1 < n; ++i) t_next[i + 1] = 2.0 * t_cur[i];
            for (std::size_t i = 0; i < n; ++i) t_next[i] -= t_prev[i];
            t_prev = std::move(t_cur);
            t_cur = std::move(t_next);
        }
    }

    // Substitute u = (x - mid) / h = a x + b and expand each power binomially.
    const Interval iv = series.interval();
    const double a = 1.0 / iv.half_width();
    const double b = -iv.mid() / iv.half_width();
    std::vector<double> in_x(n, 0.0);
    std::vector<double> pow_ab{1.0};  // coefficients of (a x + b)^k
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < pow_ab.size(); ++i) in_x[i] += in_u[k] * pow_ab[i];
        std::vector<double> next(pow_ab.size() + 1, 0.0);
        for (std::size_t i = 0; i < pow_ab.size(); ++i) {
            next[i] += b * pow_ab[i];
            next[i + 1] += a * pow_ab[i];
        }
        pow_ab = std::move(next);
    }
    return Polynomial(std::move(in_x), iv);
}

// ============================================================================
// Evaluation
// ============================================================================

double eval(const Polynomial& p, double x) {
    const auto& c = p.coeffs();
    double acc = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) acc = acc * x + c[k];
    return acc;
}

std::vector<double> eval_batch(const Polynomial& p, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [&](double x) { return eval(p, x); });
    return out;
}

int mult_depth(int degree) {
    if (degree <= 0) return 0;
    return static_cast<int>(std::bit_width(static_cast<unsigned>(degree - 1))) + 1;
}

int mult_depth(const Polynomial& p) { return mult_depth(p.degree()); }

// ============================================================================
// JSON
// ============================================================================

nlohmann::json to_json(const Polynomial& p) {
    return nlohmann::json{{"coeffs", p.coeffs()},
                          {"interval", {p.interval().lo, p.interval().hi}}};
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
    try {
        auto coeffs = j.at("coeffs").get<std::vector<double>>();
        Interval iv;
        if (j.contains("interval")) {
            const auto& r = j.at("interval");
            if (!r.is_array() || r.size() != 2) throw ParameterError("interval must be [lo, hi]");
            iv = {r[0].get<double>(), r[1].get<double>()};
        }
        if (coeffs.empty()) throw ParameterError("polynomial needs at least one coefficient");
        return Polynomial(std::move(coeffs), iv);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("malformed polynomial JSON: ") + e.what());
    }
}

std::string dump_polynomial(const Polynomial& p) { return dump_fixed(to_json(p), 6); }

}  // namespace heact::poly
