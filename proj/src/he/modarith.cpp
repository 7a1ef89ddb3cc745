// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/he/modarith.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>

namespace heact::he {

u64 pow_mod(u64 base, u64 exp, const Modulus& q) {
    u64 result = 1 % q.value();
    base = q.reduce(base);
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, q);
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    return result;
}

u64 inv_mod(u64 a, const Modulus& q) { return pow_mod(a, q.value() - 2, q); }

namespace {

u64 mulmod_plain(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod_plain(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod_plain(r, b, m);
        b = mulmod_plain(b, b, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This witness set is exact for all n < 2^64.
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        const u64 aa = a % n;
        if (aa == 0) continue;
        u64 x = powmod_plain(aa, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_plain(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 residue_of(double v, const Modulus& q) {
    if (std::fabs(v) < 0x1.0p62) return residue_of(static_cast<std::int64_t>(v), q);
    // |v| >= 2^62: v = mantissa * 2^e exactly, with an integral 53-bit mantissa.
    int e = 0;
    const double frac = std::frexp(v, &e);
    const auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
    const u64 m = residue_of(mantissa, q);
    return mul_mod(m, pow_mod(2, static_cast<u64>(e - 53), q), q);
}

}  // namespace heact::he
