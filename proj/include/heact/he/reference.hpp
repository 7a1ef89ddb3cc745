// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_HE_REFERENCE_HPP
#define HEACT_HE_REFERENCE_HPP

#include <span>
#include <vector>

#include "heact/he/params.hpp"
#include "heact/poly.hpp"

namespace heact::he {

/// Plaintext twin of CkksBackend. Slots hold raw doubles and arithmetic is
/// exact up to IEEE rounding, while level, scale and mult_count follow the
/// same rules as the real scheme, including every error condition.
///
/// eval_poly and linear_combination produce exactly what the plaintext
/// Horner evaluation and a left-to-right dot product produce, so code
/// written against the HeBackend interface can be checked bit-for-bit.
class ReferenceBackend {
public:
    struct Plaintext {
        std::vector<double> values;
        int level = 0;
        double scale = 1.0;
    };
    struct Ciphertext {
        std::vector<double> values;
        int level = 0;
        double scale = 1.0;
        int mult_count = 0;
    };

    explicit ReferenceBackend(CkksParams params);

    const CkksParams& params() const { return params_; }

    Plaintext encode(std::span<const double> values, int level) const;
    Plaintext encode(std::span<const double> values, int level, double scale) const;
    Plaintext encode_constant(double value, int level, double scale) const;
    std::vector<double> decode(const Plaintext& pt) const;

    Ciphertext encrypt(const Plaintext& pt);
    Plaintext decrypt(const Ciphertext& ct) const;

    Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
    Ciphertext add_plain(const Ciphertext& a, const Plaintext& p) const;
    Ciphertext mul(const Ciphertext& a, const Ciphertext& b) const;
    Ciphertext mul_plain(const Ciphertext& a, const Plaintext& p) const;
    Ciphertext linear_combination(std::span<const Ciphertext> cts, std::span<const double> weights,
                                  double out_scale) const;
    Ciphertext constant_like(const Ciphertext& like, double value) const;
    Ciphertext drop_level(const Ciphertext& a, int level) const;
    Ciphertext eval_poly(const Ciphertext& ct, const poly::Polynomial& p) const;

private:
    double log2_modulus(int level) const;
    double prime_value(int level) const { return static_cast<double>(params_.modulus_chain[level]); }

    CkksParams params_;
};

}  // namespace heact::he

#endif  // HEACT_HE_REFERENCE_HPP
