// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/he/ckks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heact/error.hpp"
#include "heact/he/evaluator.hpp"

namespace heact::he {

namespace {

using cplx = std::complex<double>;

void bit_reverse_permute(std::vector<cplx>& vals) {
    const std::size_t size = vals.size();
    for (std::size_t i = 1, j = 0; i < size; ++i) {
        std::size_t bit = size >> 1;
        for (; j >= bit; bit >>= 1) j -= bit;
        j += bit;
        if (i < j) std::swap(vals[i], vals[j]);
    }
}

bool same_scale(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(a, b); }

void require_aligned(int level_a, double scale_a, int level_b, double scale_b, const char* op) {
    if (level_a != level_b) {
        throw AlignmentError(std::string(op) + ": level mismatch (" + std::to_string(level_a) +
                             " vs " + std::to_string(level_b) + ")");
    }
    if (!same_scale(scale_a, scale_b)) {
        throw AlignmentError(std::string(op) + ": scale mismatch (2^" + std::to_string(std::log2(scale_a)) +
                             " vs 2^" + std::to_string(std::log2(scale_b)) + ")");
    }
}

void require_level_left(int level, const char* op) {
    if (level < 1) {
        throw LevelError(std::string(op) + ": no levels remaining in the modulus chain");
    }
}

// Centered representative of c mod big, reduced into small.
u64 centered_reduce(u64 c, const Modulus& big, const Modulus& small) {
    if (c > big.value() / 2) return neg_mod(small.reduce(big.value() - c), small);
    return small.reduce(c);
}

void add_into(RnsPoly& dst, const RnsPoly& src, const CkksContext& ctx) {
    for (std::size_t i = 0; i < dst.limbs(); ++i) {
        const auto& q = ctx.modulus(dst.primes[i]);
        auto d = dst.limb(i);
        auto s = src.limb(i);
        for (std::size_t k = 0; k < dst.n; ++k) d[k] = add_mod(d[k], s[k], q);
    }
}

RnsPoly pointwise_mul(const RnsPoly& a, const RnsPoly& b, const CkksContext& ctx) {
    RnsPoly out(a.n, a.primes);
    for (std::size_t i = 0; i < a.limbs(); ++i) {
        const auto& q = ctx.modulus(a.primes[i]);
        auto o = out.limb(i);
        auto x = a.limb(i);
        auto y = b.limb(i);
        for (std::size_t k = 0; k < a.n; ++k) o[k] = mul_mod(x[k], y[k], q);
    }
    return out;
}

// The limbs of `p` (over a superset basis) whose primes appear in `primes`.
RnsPoly restrict_to(const RnsPoly& p, const std::vector<std::uint32_t>& primes) {
    RnsPoly out(p.n, primes);
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const auto it = std::find(p.primes.begin(), p.primes.end(), primes[i]);
        if (it == p.primes.end()) throw ParameterError("ring element lacks a required prime");
        const auto src = p.limb(static_cast<std::size_t>(it - p.primes.begin()));
        std::copy(src.begin(), src.end(), out.limb(i).begin());
    }
    return out;
}

RnsPoly from_signed(const std::vector<std::int64_t>& coeffs, std::vector<std::uint32_t> primes,
                    const CkksContext& ctx) {
    RnsPoly p(coeffs.size(), std::move(primes));
    for (std::size_t i = 0; i < p.limbs(); ++i) {
        const auto& q = ctx.modulus(p.primes[i]);
        auto l = p.limb(i);
        for (std::size_t k = 0; k < p.n; ++k) l[k] = residue_of(coeffs[k], q);
    }
    return p;
}

std::vector<std::int64_t> sample_ternary(std::size_t n, Prng& rng) {
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = static_cast<std::int64_t>(rng.below(3)) - 1;
    return v;
}

std::vector<std::int64_t> sample_gaussian(std::size_t n, double sd, Prng& rng) {
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = std::llround(rng.normal() * sd);
    return v;
}

RnsPoly sample_uniform(std::size_t n, std::vector<std::uint32_t> primes, const CkksContext& ctx,
                       Prng& rng) {
    RnsPoly p(n, std::move(primes));
    for (std::size_t i = 0; i < p.limbs(); ++i) {
        const u64 q = ctx.modulus(p.primes[i]).value();
        for (auto& x : p.limb(i)) x = rng.below(q);
    }
    return p;
}

// Divides an NTT-form poly over {primes..., drop} by the prime `drop` with
// rounding, returning it over {primes...}. `drop` is the last limb.
RnsPoly divide_and_round_last(const RnsPoly& in, const CkksContext& ctx) {
    const std::size_t keep = in.limbs() - 1;
    const std::uint32_t drop = in.primes.back();
    const Modulus& qd = ctx.modulus(drop);

    std::vector<u64> last(in.limb(keep).begin(), in.limb(keep).end());
    ctx.ntt(drop).inverse(last);

    RnsPoly out(in.n, std::vector<std::uint32_t>(in.primes.begin(), in.primes.end() - 1));
    std::vector<u64> tmp(in.n);
    for (std::size_t i = 0; i < keep; ++i) {
        const std::uint32_t pi = in.primes[i];
        const Modulus& q = ctx.modulus(pi);
        for (std::size_t k = 0; k < in.n; ++k) tmp[k] = centered_reduce(last[k], qd, q);
        ctx.ntt(pi).forward(tmp);
        const u64 inv = ctx.inv_prime_mod(drop, pi);
        const u64 inv_shoup = shoup_companion(inv, q);
        auto src = in.limb(i);
        auto dst = out.limb(i);
        for (std::size_t k = 0; k < in.n; ++k) {
            dst[k] = mul_shoup(sub_mod(src[k], tmp[k], q), inv, inv_shoup, q);
        }
    }
    return out;
}

}  // namespace

// ============================================================================
// CkksContext
// ============================================================================

CkksContext::CkksContext(CkksParams params) : params_(std::move(params)) {
    params_.validate();
    const std::size_t n = params_.ring_degree;
    for (auto q : params_.modulus_chain) moduli_.emplace_back(q);
    moduli_.emplace_back(params_.special_prime);
    for (const auto& q : moduli_) ntt_.emplace_back(n, q);

    inv_table_.assign(moduli_.size(), std::vector<u64>(moduli_.size(), 0));
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        for (std::size_t j = 0; j < moduli_.size(); ++j) {
            if (i != j) inv_table_[i][j] = inv_mod(moduli_[j].reduce(moduli_[i].value()), moduli_[j]);
        }
    }

    const std::size_t m = 2 * n;
    rot_group_.resize(n / 2);
    std::size_t five_pow = 1;
    for (auto& r : rot_group_) {
        r = five_pow;
        five_pow = (five_pow * 5) % m;
    }
    ksi_pows_.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
        ksi_pows_[j] = {std::cos(angle), std::sin(angle)};
    }
}

std::vector<std::uint32_t> CkksContext::level_primes(int level, bool with_special) const {
    std::vector<std::uint32_t> p(static_cast<std::size_t>(level) + 1);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<std::uint32_t>(i);
    if (with_special) p.push_back(special_index());
    return p;
}

double CkksContext::log2_modulus(int level) const {
    double bits = 0.0;
    for (int i = 0; i <= level; ++i) bits += std::log2(static_cast<double>(moduli_[i].value()));
    return bits;
}

// Variant of the FFT evaluating at the primitive roots zeta^(5^j): slot j of a
// coefficient vector m is m(zeta^(5^j)) with zeta = exp(i*pi/N).
void CkksContext::fft_special(std::vector<cplx>& vals) const {
    const std::size_t size = vals.size();
    const std::size_t m = 2 * n();
    bit_reverse_permute(vals);
    for (std::size_t len = 2; len <= size; len <<= 1) {
        const std::size_t lenh = len >> 1;
        const std::size_t lenq = len << 2;
        const std::size_t gap = m / lenq;
        for (std::size_t i = 0; i < size; i += len) {
            for (std::size_t j = 0; j < lenh; ++j) {
                const std::size_t idx = (rot_group_[j] % lenq) * gap;
                const cplx u = vals[i + j];
                const cplx v = vals[i + j + lenh] * ksi_pows_[idx];
                vals[i + j] = u + v;
                vals[i + j + lenh] = u - v;
            }
        }
    }
}

void CkksContext::fft_special_inv(std::vector<cplx>& vals) const {
    const std::size_t size = vals.size();
    const std::size_t m = 2 * n();
    for (std::size_t len = size; len >= 1; len >>= 1) {
        const std::size_t lenh = len >> 1;
        const std::size_t lenq = len << 2;
        const std::size_t gap = m / lenq;
        for (std::size_t i = 0; i < size; i += len) {
            for (std::size_t j = 0; j < lenh; ++j) {
                const std::size_t idx = (lenq - (rot_group_[j] % lenq)) * gap;
                const cplx u = vals[i + j] + vals[i + j + lenh];
                const cplx v = (vals[i + j] - vals[i + j + lenh]) * ksi_pows_[idx];
                vals[i + j] = u;
                vals[i + j + lenh] = v;
            }
        }
    }
    bit_reverse_permute(vals);
    for (auto& v : vals) v /= static_cast<double>(size);
}

std::vector<double> CkksContext::embed_inverse(std::span<const double> slots) const {
    const std::size_t nh = n() / 2;
    if (slots.size() > nh) throw ParameterError("more values than slots");
    std::vector<cplx> u(nh, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < slots.size(); ++i) u[i] = slots[i];
    fft_special_inv(u);
    std::vector<double> coeffs(n());
    for (std::size_t i = 0; i < nh; ++i) {
        coeffs[i] = u[i].real();
        coeffs[i + nh] = u[i].imag();
    }
    return coeffs;
}

std::vector<double> CkksContext::embed_forward(std::span<const double> coeffs) const {
    const std::size_t nh = n() / 2;
    std::vector<cplx> u(nh);
    for (std::size_t i = 0; i < nh; ++i) u[i] = {coeffs[i], coeffs[i + nh]};
    fft_special(u);
    std::vector<double> slots(nh);
    for (std::size_t i = 0; i < nh; ++i) slots[i] = u[i].real();
    return slots;
}

long double CkksContext::lift_centered(const RnsPoly& p, std::size_t k) const {
    // Garner mixed-radix digits: x = a_0 + a_1 q_0 + a_2 q_0 q_1 + ...
    const std::size_t l = p.limbs();
    std::vector<u64> a(l);
    for (std::size_t i = 0; i < l; ++i) {
        const std::uint32_t pi = p.primes[i];
        const Modulus& q = moduli_[pi];
        u64 t = p.limb(i)[k];
        for (std::size_t j = 0; j < i; ++j) {
            t = mul_mod(sub_mod(t, q.reduce(a[j]), q), inv_table_[p.primes[j]][pi], q);
        }
        a[i] = t;
    }
    const u64 top_q = moduli_[p.primes[l - 1]].value();
    const bool negative = a[l - 1] > (top_q - 1) / 2;
    long double v = 0.0L;
    for (std::size_t i = l; i-- > 0;) {
        const u64 qi = moduli_[p.primes[i]].value();
        const u64 digit = negative ? qi - 1 - a[i] : a[i];
        v = v * static_cast<long double>(qi) + static_cast<long double>(digit);
    }
    return negative ? -(v + 1.0L) : v;
}

void CkksContext::to_ntt(RnsPoly& p) const {
    for (std::size_t i = 0; i < p.limbs(); ++i) ntt_[p.primes[i]].forward(p.limb(i));
}

void CkksContext::from_ntt(RnsPoly& p) const {
    for (std::size_t i = 0; i < p.limbs(); ++i) ntt_[p.primes[i]].inverse(p.limb(i));
}

// ============================================================================
// Key generation
// ============================================================================

KeySet keygen(const CkksContext& ctx, std::uint64_t seed) {
    Prng rng(seed);
    const std::size_t n = ctx.n();
    const int top = ctx.max_level();
    const auto all = ctx.level_primes(top, true);
    const auto data = ctx.level_primes(top);
    const double sd = ctx.params().error_stddev;

    KeySet keys;
    keys.seed = seed;
    keys.secret = from_signed(sample_ternary(n, rng), all, ctx);
    ctx.to_ntt(keys.secret);

    {
        const RnsPoly s = restrict_to(keys.secret, data);
        RnsPoly a = sample_uniform(n, data, ctx, rng);
        RnsPoly e = from_signed(sample_gaussian(n, sd, rng), data, ctx);
        ctx.to_ntt(e);
        RnsPoly b = pointwise_mul(a, s, ctx);
        for (std::size_t i = 0; i < b.limbs(); ++i) {
            const auto& q = ctx.modulus(b.primes[i]);
            auto bl = b.limb(i);
            auto el = e.limb(i);
            for (std::size_t k = 0; k < n; ++k) bl[k] = sub_mod(el[k], bl[k], q);
        }
        keys.public_key = {std::move(b), std::move(a)};
    }

    // Relinearization key, one RNS digit per data prime:
    //   b_i = -a_i s + e_i + P * g_i * s^2, with g_i = 1 mod q_i, 0 mod q_j (j != i), 0 mod P.
    const RnsPoly s2 = pointwise_mul(keys.secret, keys.secret, ctx);
    const u64 special = ctx.params().special_prime;
    keys.relin_key.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        RnsPoly a = sample_uniform(n, all, ctx, rng);
        RnsPoly e = from_signed(sample_gaussian(n, sd, rng), all, ctx);
        ctx.to_ntt(e);
        RnsPoly b = pointwise_mul(a, keys.secret, ctx);
        for (std::size_t j = 0; j < b.limbs(); ++j) {
            const auto& q = ctx.modulus(b.primes[j]);
            auto bl = b.limb(j);
            auto el = e.limb(j);
            for (std::size_t k = 0; k < n; ++k) bl[k] = sub_mod(el[k], bl[k], q);
        }
        const auto& qi = ctx.modulus(static_cast<std::uint32_t>(i));
        const u64 p_mod_qi = qi.reduce(special);
        auto bl = b.limb(i);
        auto sl = s2.limb(i);
        for (std::size_t k = 0; k < n; ++k) bl[k] = add_mod(bl[k], mul_mod(p_mod_qi, sl[k], qi), qi);
        keys.relin_key.push_back({std::move(b), std::move(a)});
    }
    return keys;
}

// ============================================================================
// CkksBackend
// ============================================================================

CkksBackend::CkksBackend(const CkksParams& params, std::uint64_t seed)
    : ctx_(std::make_shared<const CkksContext>(params)),
      keys_(keygen(*ctx_, seed)),
      encryption_seed_(seed ^ 0xA5A5A5A5DEADBEEFULL),
      rng_(encryption_seed_) {}

CkksBackend::CkksBackend(std::shared_ptr<const CkksContext> ctx, KeySet keys,
                         std::uint64_t encryption_seed)
    : ctx_(std::move(ctx)), keys_(std::move(keys)), encryption_seed_(encryption_seed), rng_(encryption_seed) {}

Plaintext CkksBackend::encode(std::span<const double> values, int level) const {
    return encode(values, level, params().scale);
}

Plaintext CkksBackend::encode(std::span<const double> values, int level, double scale) const {
    if (level < 0 || level > ctx_->max_level()) throw LevelError("encode: level out of range");
    if (values.size() > params().slot_count()) {
        throw ParameterError("encode: " + std::to_string(values.size()) + " values exceed " +
                             std::to_string(params().slot_count()) + " slots");
    }
    double max_abs = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw ParameterError("encode: non-finite value");
        max_abs = std::max(max_abs, std::fabs(v));
    }
    if (max_abs > 0.0 && std::log2(max_abs) + std::log2(scale) >= ctx_->log2_modulus(level) - 1.0) {
        throw RangeError("encode: |value| * scale exceeds the coefficient headroom at level " +
                         std::to_string(level));
    }
    const auto coeffs = ctx_->embed_inverse(values);
    Plaintext pt{RnsPoly(ctx_->n(), ctx_->level_primes(level)), level, scale};
    std::vector<double> rounded(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) rounded[k] = std::round(coeffs[k] * scale);
    for (std::size_t i = 0; i < pt.poly.limbs(); ++i) {
        const auto& q = ctx_->modulus(pt.poly.primes[i]);
        auto l = pt.poly.limb(i);
        for (std::size_t k = 0; k < l.size(); ++k) l[k] = residue_of(rounded[k], q);
    }
    return pt;
}

Plaintext CkksBackend::encode_constant(double value, int level, double scale) const {
    if (level < 0 || level > ctx_->max_level()) throw LevelError("encode: level out of range");
    if (!std::isfinite(value)) throw ParameterError("encode: non-finite value");
    if (value != 0.0 && std::log2(std::fabs(value)) + std::log2(scale) >= ctx_->log2_modulus(level) - 1.0) {
        throw RangeError("encode: |value| * scale exceeds the coefficient headroom");
    }
    Plaintext pt{RnsPoly(ctx_->n(), ctx_->level_primes(level)), level, scale};
    const double c = std::round(value * scale);
    for (std::size_t i = 0; i < pt.poly.limbs(); ++i) {
        pt.poly.limb(i)[0] = residue_of(c, ctx_->modulus(pt.poly.primes[i]));
    }
    return pt;
}

std::vector<double> CkksBackend::decode(const Plaintext& pt) const {
    std::vector<double> coeffs(ctx_->n());
    const long double inv_scale = 1.0L / static_cast<long double>(pt.scale);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        coeffs[k] = static_cast<double>(ctx_->lift_centered(pt.poly, k) * inv_scale);
    }
    return ctx_->embed_forward(coeffs);
}

Ciphertext CkksBackend::encrypt(const Plaintext& pt) {
    if (pt.level < 0 || pt.level > ctx_->max_level()) throw LevelError("encrypt: level out of range");
    const std::size_t n = ctx_->n();
    const auto primes = ctx_->level_primes(pt.level);
    const double sd = params().error_stddev;

    RnsPoly v = from_signed(sample_ternary(n, rng_), primes, *ctx_);
    ctx_->to_ntt(v);
    RnsPoly e0 = from_signed(sample_gaussian(n, sd, rng_), primes, *ctx_);
    RnsPoly e1 = from_signed(sample_gaussian(n, sd, rng_), primes, *ctx_);
    ctx_->to_ntt(e0);
    ctx_->to_ntt(e1);
    RnsPoly m = pt.poly;
    ctx_->to_ntt(m);

    RnsPoly c0 = pointwise_mul(restrict_to(keys_.public_key[0], primes), v, *ctx_);
    RnsPoly c1 = pointwise_mul(restrict_to(keys_.public_key[1], primes), v, *ctx_);
    add_into(c0, e0, *ctx_);
    add_into(c0, m, *ctx_);
    add_into(c1, e1, *ctx_);
    Ciphertext ct;
    ct.parts.push_back(std::move(c0));
    ct.parts.push_back(std::move(c1));
    ct.level = pt.level;
    ct.scale = pt.scale;
    return ct;
}

Plaintext CkksBackend::decrypt(const Ciphertext& ct) const { return decrypt(ct, keys_); }

Plaintext CkksBackend::decrypt(const Ciphertext& ct, const KeySet& keys) const {
    const auto primes = ctx_->level_primes(ct.level);
    const RnsPoly s = restrict_to(keys.secret, primes);
    RnsPoly m = ct.parts[0];
    RnsPoly s_pow = s;
    for (std::size_t i = 1; i < ct.parts.size(); ++i) {
        add_into(m, pointwise_mul(ct.parts[i], s_pow, *ctx_), *ctx_);
        if (i + 1 < ct.parts.size()) s_pow = pointwise_mul(s_pow, s, *ctx_);
    }
    ctx_->from_ntt(m);
    return Plaintext{std::move(m), ct.level, ct.scale};
}

Ciphertext CkksBackend::add(const Ciphertext& a, const Ciphertext& b) const {
    require_aligned(a.level, a.scale, b.level, b.scale, "add");
    Ciphertext out = a.parts.size() >= b.parts.size() ? a : b;
    const Ciphertext& other = a.parts.size() >= b.parts.size() ? b : a;
    for (std::size_t i = 0; i < other.parts.size(); ++i) add_into(out.parts[i], other.parts[i], *ctx_);
    out.mult_count = std::max(a.mult_count, b.mult_count);
    return out;
}

Ciphertext CkksBackend::add_plain(const Ciphertext& a, const Plaintext& p) const {
    require_aligned(a.level, a.scale, p.level, p.scale, "add_plain");
    RnsPoly m = p.poly;
    ctx_->to_ntt(m);
    Ciphertext out = a;
    add_into(out.parts[0], m, *ctx_);
    return out;
}

Ciphertext CkksBackend::multiply_raw(const Ciphertext& a, const Ciphertext& b) const {
    if (a.level != b.level) {
        throw AlignmentError("mul: level mismatch (" + std::to_string(a.level) + " vs " +
                             std::to_string(b.level) + ")");
    }
    if (a.parts.size() != 2 || b.parts.size() != 2) throw ParameterError("mul: operands must have 2 parts");
    if (std::log2(a.scale) + std::log2(b.scale) >= ctx_->log2_modulus(a.level) - 1.0) {
        throw RangeError("mul: product scale exceeds the current modulus");
    }
    Ciphertext out;
    out.parts.push_back(pointwise_mul(a.parts[0], b.parts[0], *ctx_));
    RnsPoly mid = pointwise_mul(a.parts[0], b.parts[1], *ctx_);
    add_into(mid, pointwise_mul(a.parts[1], b.parts[0], *ctx_), *ctx_);
    out.parts.push_back(std::move(mid));
    out.parts.push_back(pointwise_mul(a.parts[1], b.parts[1], *ctx_));
    out.level = a.level;
    out.scale = a.scale * b.scale;
    out.mult_count = std::max(a.mult_count, b.mult_count);
    return out;
}

Ciphertext CkksBackend::relinearize(const Ciphertext& a) const {
    if (a.parts.size() == 2) return a;
    if (a.parts.size() != 3) throw ParameterError("relinearize: expected 3 parts");
    const std::size_t n = ctx_->n();
    const int level = a.level;
    const auto ext = ctx_->level_primes(level, true);
    const std::size_t special_key_limb = static_cast<std::size_t>(ctx_->max_level()) + 1;

    RnsPoly digits = a.parts[2];
    ctx_->from_ntt(digits);

    RnsPoly acc0(n, ext), acc1(n, ext);
    std::vector<u64> tmp(n);
    for (int i = 0; i <= level; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const auto digit = digits.limb(iu);
        const auto& key = keys_.relin_key[iu];
        for (std::size_t t = 0; t < ext.size(); ++t) {
            const std::uint32_t pt = ext[t];
            const Modulus& q = ctx_->modulus(pt);
            if (pt == static_cast<std::uint32_t>(i)) {
                const auto src = a.parts[2].limb(iu);
                std::copy(src.begin(), src.end(), tmp.begin());
            } else {
                for (std::size_t k = 0; k < n; ++k) tmp[k] = q.reduce(digit[k]);
                ctx_->ntt(pt).forward(tmp);
            }
            const std::size_t key_limb = pt == ctx_->special_index() ? special_key_limb : pt;
            const auto k0 = key[0].limb(key_limb);
            const auto k1 = key[1].limb(key_limb);
            auto a0 = acc0.limb(t);
            auto a1 = acc1.limb(t);
            for (std::size_t k = 0; k < n; ++k) {
                a0[k] = add_mod(a0[k], mul_mod(tmp[k], k0[k], q), q);
                a1[k] = add_mod(a1[k], mul_mod(tmp[k], k1[k], q), q);
            }
        }
    }

    Ciphertext out;
    out.parts.push_back(a.parts[0]);
    out.parts.push_back(a.parts[1]);
    add_into(out.parts[0], divide_and_round_last(acc0, *ctx_), *ctx_);
    add_into(out.parts[1], divide_and_round_last(acc1, *ctx_), *ctx_);
    out.level = a.level;
    out.scale = a.scale;
    out.mult_count = a.mult_count;
    return out;
}

Ciphertext CkksBackend::rescale(const Ciphertext& a) const {
    require_level_left(a.level, "rescale");
    Ciphertext out;
    for (const auto& part : a.parts) out.parts.push_back(divide_and_round_last(part, *ctx_));
    out.level = a.level - 1;
    out.scale = a.scale / ctx_->prime_value(a.level);
    out.mult_count = a.mult_count + 1;
    return out;
}

Ciphertext CkksBackend::mul(const Ciphertext& a, const Ciphertext& b) const {
    require_level_left(std::min(a.level, b.level), "mul");
    return rescale(relinearize(multiply_raw(a, b)));
}

Ciphertext CkksBackend::mul_plain(const Ciphertext& a, const Plaintext& p) const {
    require_level_left(a.level, "mul_plain");
    if (a.level != p.level) {
        throw AlignmentError("mul_plain: level mismatch (" + std::to_string(a.level) + " vs " +
                             std::to_string(p.level) + ")");
    }
    if (std::log2(a.scale) + std::log2(p.scale) >= ctx_->log2_modulus(a.level) - 1.0) {
        throw RangeError("mul_plain: product scale exceeds the current modulus");
    }
    RnsPoly m = p.poly;
    ctx_->to_ntt(m);
    Ciphertext prod;
    for (const auto& part : a.parts) prod.parts.push_back(pointwise_mul(part, m, *ctx_));
    prod.level = a.level;
    prod.scale = a.scale * p.scale;
    prod.mult_count = a.mult_count;
    return rescale(prod);
}

Ciphertext CkksBackend::linear_combination(std::span<const Ciphertext> cts, std::span<const double> weights,
                                           double out_scale) const {
    if (cts.empty() || cts.size() != weights.size()) {
        throw ParameterError("linear_combination: need equally many ciphertexts and weights");
    }
    const int level = cts[0].level;
    require_level_left(level, "linear_combination");
    const double q_top = ctx_->prime_value(level);
    Ciphertext acc;
    acc.level = level;
    acc.mult_count = 0;
    acc.parts.assign(2, RnsPoly(ctx_->n(), ctx_->level_primes(level)));
    for (std::size_t t = 0; t < cts.size(); ++t) {
        const Ciphertext& ct = cts[t];
        if (ct.level != level) throw AlignmentError("linear_combination: operands at different levels");
        if (ct.parts.size() != 2) throw ParameterError("linear_combination: operands must have 2 parts");
        if (!std::isfinite(weights[t])) throw ParameterError("linear_combination: non-finite weight");
        // Per-term plaintext scale so every product lands on out_scale * q_top.
        const double multiplier = std::round(weights[t] * (out_scale * q_top / ct.scale));
        if (multiplier != 0.0 &&
            std::log2(std::fabs(multiplier)) + std::log2(ct.scale) >= ctx_->log2_modulus(level) - 1.0) {
            throw RangeError("linear_combination: weight too large for the current modulus");
        }
        for (std::size_t i = 0; i <= static_cast<std::size_t>(level); ++i) {
            const Modulus& q = ctx_->modulus(static_cast<std::uint32_t>(i));
            const u64 w = residue_of(multiplier, q);
            const u64 ws = shoup_companion(w, q);
            for (std::size_t part = 0; part < 2; ++part) {
                auto dst = acc.parts[part].limb(i);
                auto src = ct.parts[part].limb(i);
                for (std::size_t k = 0; k < dst.size(); ++k) {
                    dst[k] = add_mod(dst[k], mul_shoup(src[k], w, ws, q), q);
                }
            }
        }
        acc.mult_count = std::max(acc.mult_count, ct.mult_count);
    }
    acc.scale = out_scale * q_top;
    Ciphertext out = rescale(acc);
    out.scale = out_scale;
    return out;
}

Ciphertext CkksBackend::constant_like(const Ciphertext& like, double value) const {
    RnsPoly m = encode_constant(value, like.level, like.scale).poly;
    ctx_->to_ntt(m);
    Ciphertext out;
    out.parts.push_back(std::move(m));
    out.parts.emplace_back(ctx_->n(), ctx_->level_primes(like.level));
    out.level = like.level;
    out.scale = like.scale;
    out.mult_count = like.mult_count;
    return out;
}

Ciphertext CkksBackend::drop_level(const Ciphertext& a, int level) const {
    if (level < 0 || level > a.level) {
        throw LevelError("drop_level: target level " + std::to_string(level) + " not below " +
                         std::to_string(a.level));
    }
    Ciphertext out;
    const auto primes = ctx_->level_primes(level);
    for (const auto& part : a.parts) out.parts.push_back(restrict_to(part, primes));
    out.level = level;
    out.scale = a.scale;
    out.mult_count = a.mult_count;
    return out;
}

Ciphertext CkksBackend::eval_poly(const Ciphertext& ct, const poly::Polynomial& p) const {
    return detail::power_basis_eval(*this, ct, p);
}

static_assert(HeBackend<CkksBackend>);

}  // namespace heact::he
