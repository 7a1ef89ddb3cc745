// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_HE_CKKS_HPP
#define HEACT_HE_CKKS_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "heact/he/modarith.hpp"
#include "heact/he/ntt.hpp"
#include "heact/he/params.hpp"
#include "heact/poly.hpp"
#include "heact/random.hpp"

namespace heact::he {

/// Ring element in residue-number-system form: one limb of N words per prime.
/// `primes` holds indices into the context prime table (data primes first,
/// the special prime last).
struct RnsPoly {
    std::size_t n = 0;
    std::vector<std::uint32_t> primes;
    std::vector<u64> data;

    RnsPoly() = default;
    RnsPoly(std::size_t n_, std::vector<std::uint32_t> primes_)
        : n(n_), primes(std::move(primes_)), data(n * primes.size(), 0) {}

    std::size_t limbs() const { return primes.size(); }
    std::span<u64> limb(std::size_t i) { return {data.data() + i * n, n}; }
    std::span<const u64> limb(std::size_t i) const { return {data.data() + i * n, n}; }

    bool operator==(const RnsPoly&) const = default;
};

/// Coefficient-form plaintext defined modulo q_0*...*q_level.
struct Plaintext {
    RnsPoly poly;
    int level = 0;
    double scale = 1.0;
};

/// NTT-form ciphertext. parts has 2 entries, or 3 between a raw product and
/// relinearization. mult_count counts rescales on the deepest input path.
struct Ciphertext {
    std::vector<RnsPoly> parts;
    int level = 0;
    double scale = 1.0;
    int mult_count = 0;
};

/// Key material derived from a single seed. All polynomials in NTT form.
struct KeySet {
    RnsPoly secret;                               // ternary; data primes + special prime
    std::array<RnsPoly, 2> public_key;            // (-a s + e, a) over the data primes
    std::vector<std::array<RnsPoly, 2>> relin_key;  // one pair per data prime, + special prime
    std::uint64_t seed = 0;
};

/// Precomputed tables shared by everything that touches one parameter set.
/// Immutable after construction and safe to share across threads.
class CkksContext {
public:
    explicit CkksContext(CkksParams params);

    const CkksParams& params() const { return params_; }
    std::size_t n() const { return params_.ring_degree; }
    int max_level() const { return params_.max_level(); }
    std::uint32_t special_index() const { return static_cast<std::uint32_t>(moduli_.size() - 1); }

    const Modulus& modulus(std::uint32_t i) const { return moduli_[i]; }
    const NttTables& ntt(std::uint32_t i) const { return ntt_[i]; }

    /// Prime indices 0..level, optionally followed by the special prime.
    std::vector<std::uint32_t> level_primes(int level, bool with_special = false) const;
    /// log2 of q_0*...*q_level.
    double log2_modulus(int level) const;
    double prime_value(int level) const { return static_cast<double>(moduli_[level].value()); }

    // Canonical embedding (slot vector <-> real coefficients).
    std::vector<double> embed_inverse(std::span<const double> slots) const;
    std::vector<double> embed_forward(std::span<const double> coeffs) const;

    /// Centered lift of coefficient k of a coefficient-form poly over primes
    /// 0..level, as a long double.
    long double lift_centered(const RnsPoly& p, std::size_t k) const;

    void to_ntt(RnsPoly& p) const;
    void from_ntt(RnsPoly& p) const;

    /// q_i^{-1} mod q_j and P^{-1} mod q_j.
    u64 inv_prime_mod(std::uint32_t i, std::uint32_t j) const { return inv_table_[i][j]; }

private:
    void fft_special(std::vector<std::complex<double>>& vals) const;
    void fft_special_inv(std::vector<std::complex<double>>& vals) const;

    CkksParams params_;
    std::vector<Modulus> moduli_;
    std::vector<NttTables> ntt_;
    std::vector<std::vector<u64>> inv_table_;
    std::vector<std::size_t> rot_group_;
    std::vector<std::complex<double>> ksi_pows_;
};

/// Deterministic key generation: the same (context, seed) always yields the
/// same KeySet.
KeySet keygen(const CkksContext& ctx, std::uint64_t seed);

/// Leveled CKKS evaluator holding one KeySet.
///
/// Levels are never aligned automatically: add() requires equal level and
/// scale and throws AlignmentError otherwise; callers use drop_level().
/// Every multiplication (ciphertext or plaintext) rescales, so it consumes
/// exactly one level.
class CkksBackend {
public:
    using Ciphertext = he::Ciphertext;
    using Plaintext = he::Plaintext;

    /// Builds the context and runs keygen(seed).
    CkksBackend(const CkksParams& params, std::uint64_t seed);
    CkksBackend(std::shared_ptr<const CkksContext> ctx, KeySet keys, std::uint64_t encryption_seed);

    const CkksParams& params() const { return ctx_->params(); }
    const CkksContext& context() const { return *ctx_; }
    std::shared_ptr<const CkksContext> context_ptr() const { return ctx_; }
    const KeySet& keys() const { return keys_; }
    std::uint64_t encryption_seed() const { return encryption_seed_; }

    Plaintext encode(std::span<const double> values, int level) const;
    Plaintext encode(std::span<const double> values, int level, double scale) const;
    /// Constant slot vector; encodes to the constant polynomial round(value*scale).
    Plaintext encode_constant(double value, int level, double scale) const;
    std::vector<double> decode(const Plaintext& pt) const;

    Ciphertext encrypt(const Plaintext& pt);
    Plaintext decrypt(const Ciphertext& ct) const;
    Plaintext decrypt(const Ciphertext& ct, const KeySet& keys) const;

    Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
    Ciphertext add_plain(const Ciphertext& a, const Plaintext& p) const;
    /// Product, relinearized and rescaled.
    Ciphertext mul(const Ciphertext& a, const Ciphertext& b) const;
    /// Product with a plaintext at the same level, rescaled.
    Ciphertext mul_plain(const Ciphertext& a, const Plaintext& p) const;
    /// sum_k w_k * cts[k] for ciphertexts at one level, rescaled once; the
    /// result has scale exactly out_scale.
    Ciphertext linear_combination(std::span<const Ciphertext> cts, std::span<const double> weights,
                                  double out_scale) const;
    /// Trivial encryption of a constant at the level and scale of `like`.
    Ciphertext constant_like(const Ciphertext& like, double value) const;
    /// Discards primes down to `level` without changing the scale.
    Ciphertext drop_level(const Ciphertext& a, int level) const;

    Ciphertext eval_poly(const Ciphertext& ct, const poly::Polynomial& p) const;

    // Building blocks of mul().
    Ciphertext multiply_raw(const Ciphertext& a, const Ciphertext& b) const;
    Ciphertext relinearize(const Ciphertext& a) const;
    Ciphertext rescale(const Ciphertext& a) const;

private:
    std::shared_ptr<const CkksContext> ctx_;
    KeySet keys_;
    std::uint64_t encryption_seed_;
    Prng rng_;
};

}  // namespace heact::he

#endif  // HEACT_HE_CKKS_HPP
