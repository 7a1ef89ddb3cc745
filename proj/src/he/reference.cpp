// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/he/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heact/error.hpp"
#include "heact/he/evaluator.hpp"

namespace heact::he {

namespace {

bool same_scale(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(a, b); }

void require_aligned(int la, double sa, int lb, double sb, const char* op) {
    if (la != lb) {
        throw AlignmentError(std::string(op) + ": level mismatch (" + std::to_string(la) + " vs " +
                             std::to_string(lb) + ")");
    }
    if (!same_scale(sa, sb)) throw AlignmentError(std::string(op) + ": scale mismatch");
}

void require_level_left(int level, const char* op) {
    if (level < 1) throw LevelError(std::string(op) + ": no levels remaining in the modulus chain");
}

}  // namespace

ReferenceBackend::ReferenceBackend(CkksParams params) : params_(std::move(params)) { params_.validate(); }

double ReferenceBackend::log2_modulus(int level) const {
    double bits = 0.0;
    for (int i = 0; i <= level; ++i) bits += std::log2(static_cast<double>(params_.modulus_chain[i]));
    return bits;
}

ReferenceBackend::Plaintext ReferenceBackend::encode(std::span<const double> values, int level) const {
    return encode(values, level, params_.scale);
}

ReferenceBackend::Plaintext ReferenceBackend::encode(std::span<const double> values, int level,
                                                     double scale) const {
    if (level < 0 || level > params_.max_level()) throw LevelError("encode: level out of range");
    if (values.size() > params_.slot_count()) throw ParameterError("encode: more values than slots");
    double max_abs = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw ParameterError("encode: non-finite value");
        max_abs = std::max(max_abs, std::fabs(v));
    }
    if (max_abs > 0.0 && std::log2(max_abs) + std::log2(scale) >= log2_modulus(level) - 1.0) {
        throw RangeError("encode: |value| * scale exceeds the coefficient headroom");
    }
    Plaintext pt{std::vector<double>(params_.slot_count(), 0.0), level, scale};
    std::copy(values.begin(), values.end(), pt.values.begin());
    return pt;
}

ReferenceBackend::Plaintext ReferenceBackend::encode_constant(double value, int level, double scale) const {
    std::vector<double> v(params_.slot_count(), value);
    return encode(v, level, scale);
}

std::vector<double> ReferenceBackend::decode(const Plaintext& pt) const { return pt.values; }

ReferenceBackend::Ciphertext ReferenceBackend::encrypt(const Plaintext& pt) {
    if (pt.level < 0 || pt.level > params_.max_level()) throw LevelError("encrypt: level out of range");
    return Ciphertext{pt.values, pt.level, pt.scale, 0};
}

ReferenceBackend::Plaintext ReferenceBackend::decrypt(const Ciphertext& ct) const {
    return Plaintext{ct.values, ct.level, ct.scale};
}

ReferenceBackend::Ciphertext ReferenceBackend::add(const Ciphertext& a, const Ciphertext& b) const {
    require_aligned(a.level, a.scale, b.level, b.scale, "add");
    Ciphertext out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    out.mult_count = std::max(a.mult_count, b.mult_count);
    return out;
}

ReferenceBackend::Ciphertext ReferenceBackend::add_plain(const Ciphertext& a, const Plaintext& p) const {
    require_aligned(a.level, a.scale, p.level, p.scale, "add_plain");
    Ciphertext out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += p.values[i];
    return out;
}

ReferenceBackend::Ciphertext ReferenceBackend::mul(const Ciphertext& a, const Ciphertext& b) const {
    require_level_left(std::min(a.level, b.level), "mul");
    if (a.level != b.level) throw AlignmentError("mul: level mismatch");
    if (std::log2(a.scale) + std::log2(b.scale) >= log2_modulus(a.level) - 1.0) {
        throw RangeError("mul: product scale exceeds the current modulus");
    }
    Ciphertext out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
    out.scale = a.scale * b.scale / prime_value(a.level);
    out.level = a.level - 1;
    out.mult_count = std::max(a.mult_count, b.mult_count) + 1;
    return out;
}

ReferenceBackend::Ciphertext ReferenceBackend::mul_plain(const Ciphertext& a, const Plaintext& p) const {
    require_level_left(a.level, "mul_plain");
    if (a.level != p.level) throw AlignmentError("mul_plain: level mismatch");
    if (std::log2(a.scale) + std::log2(p.scale) >= log2_modulus(a.level) - 1.0) {
        throw RangeError("mul_plain: product scale exceeds the current modulus");
    }
    Ciphertext out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= p.values[i];
    out.scale = a.scale * p.scale / prime_value(a.level);
    out.level = a.level - 1;
    out.mult_count = a.mult_count + 1;
    return out;
}

ReferenceBackend::Ciphertext ReferenceBackend::linear_combination(std::span<const Ciphertext> cts,
                                                                  std::span<const double> weights,
                                                                  double out_scale) const {
    if (cts.empty() || cts.size() != weights.size()) {
        throw ParameterError("linear_combination: need equally many ciphertexts and weights");
    }
    const int level = cts[0].level;
    require_level_left(level, "linear_combination");
    Ciphertext out{std::vector<double>(cts[0].values.size(), 0.0), level - 1, out_scale, 0};
    for (std::size_t t = 0; t < cts.size(); ++t) {
        if (cts[t].level != level) throw AlignmentError("linear_combination: operands at different levels");
        if (!std::isfinite(weights[t])) throw ParameterError("linear_combination: non-finite weight");
        out.mult_count = std::max(out.mult_count, cts[t].mult_count);
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < cts.size(); ++t) acc += weights[t] * cts[t].values[i];
        out.values[i] = acc;
    }
    out.mult_count += 1;
    return out;
}

ReferenceBackend::Ciphertext ReferenceBackend::constant_like(const Ciphertext& like, double value) const {
    Ciphertext out = like;
    std::fill(out.values.begin(), out.values.end(), value);
    return out;
}

ReferenceBackend::Ciphertext ReferenceBackend::drop_level(const Ciphertext& a, int level) const {
    if (level < 0 || level > a.level) throw LevelError("drop_level: target level not below current");
    Ciphertext out = a;
    out.level = level;
    return out;
}

ReferenceBackend::Ciphertext ReferenceBackend::eval_poly(const Ciphertext& ct, const poly::Polynomial& p) const {
    // Accounting runs through the shared evaluator; slot values are replaced
    // by the plaintext Horner result.
    Ciphertext out = detail::power_basis_eval(*this, ct, p);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = poly::eval(p, ct.values[i]);
    return out;
}

static_assert(HeBackend<ReferenceBackend>);

}  // namespace heact::he
