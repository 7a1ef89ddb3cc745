// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_HE_EVALUATOR_HPP
#define HEACT_HE_EVALUATOR_HPP

#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "heact/error.hpp"
#include "heact/he/params.hpp"
#include "heact/poly.hpp"

namespace heact::he {

/// Interface shared by the CKKS backend and its plaintext reference twin.
template <class B>
concept HeBackend = requires(B& mut, const B& b, const typename B::Ciphertext& c,
                             const typename B::Plaintext& p, std::span<const double> values,
                             std::span<const typename B::Ciphertext> cts, const poly::Polynomial& poly,
                             int level, double scale) {
    { b.params() } -> std::convertible_to<const CkksParams&>;
    { b.encode(values, level, scale) } -> std::same_as<typename B::Plaintext>;
    { b.encode_constant(scale, level, scale) } -> std::same_as<typename B::Plaintext>;
    { b.decode(p) } -> std::same_as<std::vector<double>>;
    { mut.encrypt(p) } -> std::same_as<typename B::Ciphertext>;
    { b.decrypt(c) } -> std::same_as<typename B::Plaintext>;
    { b.add(c, c) } -> std::same_as<typename B::Ciphertext>;
    { b.add_plain(c, p) } -> std::same_as<typename B::Ciphertext>;
    { b.mul(c, c) } -> std::same_as<typename B::Ciphertext>;
    { b.mul_plain(c, p) } -> std::same_as<typename B::Ciphertext>;
    { b.linear_combination(cts, values, scale) } -> std::same_as<typename B::Ciphertext>;
    { b.constant_like(c, scale) } -> std::same_as<typename B::Ciphertext>;
    { b.drop_level(c, level) } -> std::same_as<typename B::Ciphertext>;
    { b.eval_poly(c, poly) } -> std::same_as<typename B::Ciphertext>;
    { c.level } -> std::convertible_to<int>;
    { c.scale } -> std::convertible_to<double>;
    { c.mult_count } -> std::convertible_to<int>;
};

namespace detail {

/// Power-basis polynomial evaluation shared by both backends.
///
/// x^(2^j) comes from repeated squaring; any other x^k is x^(2^j) * x^(k-2^j)
/// with 2^j the largest power of two below k, so x^k sits ceil(log2 k) levels
/// down. All nonconstant terms are then brought to the level of x^d and
/// combined in one plaintext-constant layer, and the constant term is added
/// last. Total: ceil(log2 d) + 1 levels. Fails before any work when the
/// ciphertext has fewer levels left.
template <class B>
typename B::Ciphertext power_basis_eval(const B& b, const typename B::Ciphertext& ct,
                                        const poly::Polynomial& p) {
    using Ct = typename B::Ciphertext;
    const int d = p.degree();
    const int depth = poly::mult_depth(d);
    if (depth > ct.level) {
        throw LevelError("depth exceeds modulus chain: degree-" + std::to_string(d) +
                         " polynomial needs " + std::to_string(depth) + " levels, ciphertext has " +
                         std::to_string(ct.level));
    }
    const auto& c = p.coeffs();
    if (d <= 0) return b.constant_like(ct, c[0]);

    std::vector<Ct> pow(static_cast<std::size_t>(d) + 1);
    pow[1] = ct;
    for (int k = 2; k <= d; ++k) {
        int high = 1;
        while (2 * high < k) high *= 2;
        const Ct& a = pow[static_cast<std::size_t>(high)];
        const Ct& r = pow[static_cast<std::size_t>(k - high)];
        pow[static_cast<std::size_t>(k)] = r.level == a.level ? b.mul(a, r) : b.mul(a, b.drop_level(r, a.level));
    }

    const int common = pow[static_cast<std::size_t>(d)].level;
    std::vector<Ct> terms;
    std::vector<double> weights;
    for (int k = 1; k <= d; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (c[ku] == 0.0) continue;
        terms.push_back(pow[ku].level == common ? pow[ku] : b.drop_level(pow[ku], common));
        weights.push_back(c[ku]);
    }
    Ct out = b.linear_combination(terms, weights, b.params().scale);
    if (c[0] != 0.0) out = b.add_plain(out, b.encode_constant(c[0], out.level, out.scale));
    return out;
}

}  // namespace detail

}  // namespace heact::he

#endif  // HEACT_HE_EVALUATOR_HPP
