// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/he/ntt.hpp"

#include <bit>

#include "heact/error.hpp"

namespace heact::he {

namespace {

std::size_t bit_reverse(std::size_t x, int bits) {
    std::size_t r = 0;
    for (int i = 0; i < bits; ++i) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

u64 find_primitive_2n_root(std::size_t n, const Modulus& q) {
    const u64 order = 2 * static_cast<u64>(n);
    if ((q.value() - 1) % order != 0) throw ParameterError("modulus is not 1 mod 2N");
    for (u64 g = 2; g < q.value(); ++g) {
        const u64 psi = pow_mod(g, (q.value() - 1) / order, q);
        // psi has order exactly 2N iff psi^N = -1.
        if (pow_mod(psi, n, q) == q.value() - 1) return psi;
    }
    throw ParameterError("no primitive 2N-th root of unity");
}

}  // namespace

NttTables::NttTables(std::size_t n, Modulus q) : n_(n), q_(q) {
    if (!std::has_single_bit(n) || n < 2) throw ParameterError("NTT size must be a power of two");
    const int log_n = std::countr_zero(n);
    psi_ = find_primitive_2n_root(n, q_);
    const u64 psi_inv = inv_mod(psi_, q_);

    psi_rev_.resize(n);
    psi_inv_rev_.resize(n);
    u64 p = 1, pi = 1;
    std::vector<u64> pow(n), pow_inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        pow[i] = p;
        pow_inv[i] = pi;
        p = mul_mod(p, psi_, q_);
        pi = mul_mod(pi, psi_inv, q_);
    }
    for (std::size_t i = 0; i < n; ++i) {
        psi_rev_[i] = pow[bit_reverse(i, log_n)];
        psi_inv_rev_[i] = pow_inv[bit_reverse(i, log_n)];
    }
    psi_rev_shoup_.resize(n);
    psi_inv_rev_shoup_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        psi_rev_shoup_[i] = shoup_companion(psi_rev_[i], q_);
        psi_inv_rev_shoup_[i] = shoup_companion(psi_inv_rev_[i], q_);
    }
    n_inv_ = inv_mod(static_cast<u64>(n), q_);
    n_inv_shoup_ = shoup_companion(n_inv_, q_);
}

void NttTables::forward(std::span<u64> a) const {
    // Cooley-Tukey butterflies, natural order in, bit-reversed out.
    std::size_t t = n_;
    for (std::size_t m = 1; m < n_; m <<= 1) {
        t >>= 1;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j1 = 2 * i * t;
            const u64 w = psi_rev_[m + i];
            const u64 ws = psi_rev_shoup_[m + i];
            for (std::size_t j = j1; j < j1 + t; ++j) {
                const u64 u = a[j];
                const u64 v = mul_shoup(a[j + t], w, ws, q_);
                a[j] = add_mod(u, v, q_);
                a[j + t] = sub_mod(u, v, q_);
            }
        }
    }
}

void NttTables::inverse(std::span<u64> a) const {
    // Gentleman-Sande butterflies, bit-reversed in, natural order out.
    std::size_t t = 1;
    for (std::size_t m = n_; m > 1; m >>= 1) {
        const std::size_t h = m >> 1;
        std::size_t j1 = 0;
        for (std::size_t i = 0; i < h; ++i) {
            const u64 w = psi_inv_rev_[h + i];
            const u64 ws = psi_inv_rev_shoup_[h + i];
            for (std::size_t j = j1; j < j1 + t; ++j) {
                const u64 u = a[j];
                const u64 v = a[j + t];
                a[j] = add_mod(u, v, q_);
                a[j + t] = mul_shoup(sub_mod(u, v, q_), w, ws, q_);
            }
            j1 += 2 * t;
        }
        t <<= 1;
    }
    for (auto& x : a) x = mul_shoup(x, n_inv_, n_inv_shoup_, q_);
}

std::vector<u64> negacyclic_schoolbook(std::span<const u64> a, std::span<const u64> b,
                                       const Modulus& q) {
    const std::size_t n = a.size();
    std::vector<u64> c(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const u64 prod = mul_mod(a[i], b[j], q);
            const std::size_t k = i + j;
            if (k < n) {
                c[k] = add_mod(c[k], prod, q);
            } else {
                c[k - n] = sub_mod(c[k - n], prod, q);  // X^N = -1
            }
        }
    }
    return c;
}

}  // namespace heact::he
