// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_POLY_HPP
#define HEACT_POLY_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace heact::poly {

/// Closed interval on which an approximation is meant to be used.
struct Interval {
    double lo = -1.0;
    double hi = 1.0;

    double mid() const { return 0.5 * (lo + hi); }
    double half_width() const { return 0.5 * (hi - lo); }
    bool operator==(const Interval&) const = default;
};

/// Real polynomial in the monomial basis; coeffs()[k] multiplies x^k.
///
/// Canonical form: exact trailing zeros are trimmed, so the zero polynomial
/// is stored as a single 0 coefficient and degree() is well defined.
/// Immutable after construction.
class Polynomial {
public:
    /// Throws ParameterError on non-finite coefficients or lo >= hi.
    explicit Polynomial(std::vector<double> coeffs, Interval interval = {});

    const std::vector<double>& coeffs() const { return coeffs_; }
    Interval interval() const { return interval_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

    double operator()(double x) const;
    Polynomial derivative() const;

    bool operator==(const Polynomial&) const = default;

private:
    std::vector<double> coeffs_;
    Interval interval_;
};

/// Truncated Chebyshev expansion: sum_k c_k T_k(u), u the affine image of x
/// onto [-1, 1].
class ChebyshevSeries {
public:
    explicit ChebyshevSeries(std::vector<double> cheb_coeffs, Interval interval = {});

    const std::vector<double>& cheb_coeffs() const { return coeffs_; }
    Interval interval() const { return interval_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    /// Clenshaw evaluation.
    double operator()(double x) const;

private:
    std::vector<double> coeffs_;
    Interval interval_;
};

double relu(double x);

Polynomial make_x_squared();
Polynomial make_fastercryptonets();
/// 0.082261 + 0.495588 x + 0.444488 x^2, the published kernel polynomial.
Polynomial make_kernel_paper();

inline constexpr int kDefaultQuadNodes = 1 << 16;

/// Degree-truncated Chebyshev series of f on the interval, coefficients
/// from Gauss-Chebyshev quadrature with quad_nodes nodes. Exact for
/// polynomial f of degree < quad_nodes.
ChebyshevSeries chebyshev_series(const std::function<double(double)>& f, int degree,
                                 Interval interval, int quad_nodes);

/// Chebyshev baseline for ReLU. Requires degree >= 1 and
/// quad_nodes >= 4 * degree.
ChebyshevSeries chebyshev_relu(int degree, Interval interval = {},
                               int quad_nodes = kDefaultQuadNodes);

Polynomial cheb_to_monomial(const ChebyshevSeries& series);

/// Horner evaluation.
double eval(const Polynomial& p, double x);
std::vector<double> eval_batch(const Polynomial& p, std::span<const double> xs);

/// Levels consumed by the power-basis encrypted evaluator:
/// 0 for degree <= 0, otherwise ceil(log2(degree)) + 1.
int mult_depth(int degree);
int mult_depth(const Polynomial& p);

// {"coeffs":[...], "interval":[lo,hi]}
nlohmann::json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);
/// Serialized form with coefficients printed to 6 decimal places.
std::string dump_polynomial(const Polynomial& p);

}  // namespace heact::poly

#endif  // HEACT_POLY_HPP
