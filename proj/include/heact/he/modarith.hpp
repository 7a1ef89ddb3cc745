// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_HE_MODARITH_HPP
#define HEACT_HE_MODARITH_HPP

#include <cstdint>

namespace heact::he {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Word-sized prime modulus (< 2^62) with its Barrett constant floor(2^128/q).
class Modulus {
public:
    Modulus() = default;
    explicit Modulus(u64 value)
        : value_(value) {
        const u128 ratio = ~u128{0} / value;  // q odd, so equals floor(2^128 / q)
        ratio_lo_ = static_cast<u64>(ratio);
        ratio_hi_ = static_cast<u64>(ratio >> 64);
    }

    u64 value() const { return value_; }

    /// x mod q for any 128-bit x.
    u64 reduce(u128 x) const {
        const u64 in_lo = static_cast<u64>(x);
        const u64 in_hi = static_cast<u64>(x >> 64);
        // Upper 64 bits of the 256-bit product x * ratio, i.e. floor(x / q) mod 2^64.
        const u128 p0 = static_cast<u128>(in_lo) * ratio_lo_;
        const u128 p1 = static_cast<u128>(in_lo) * ratio_hi_;
        const u128 p2 = static_cast<u128>(in_hi) * ratio_lo_;
        const u128 mid = (p0 >> 64) + static_cast<u64>(p1) + static_cast<u64>(p2);
        const u64 quot = in_hi * ratio_hi_ + static_cast<u64>(p1 >> 64) +
                         static_cast<u64>(p2 >> 64) + static_cast<u64>(mid >> 64);
        // The estimate undershoots floor(x / q) by at most 2.
        u64 r = in_lo - quot * value_;
        while (r >= value_) r -= value_;
        return r;
    }

    u64 reduce(u64 x) const { return x % value_; }

    bool operator==(const Modulus& o) const { return value_ == o.value_; }

private:
    u64 value_ = 0;
    u64 ratio_lo_ = 0;
    u64 ratio_hi_ = 0;
};

inline u64 add_mod(u64 a, u64 b, const Modulus& q) {
    const u64 s = a + b;
    return s >= q.value() ? s - q.value() : s;
}

inline u64 sub_mod(u64 a, u64 b, const Modulus& q) { return a >= b ? a - b : a + q.value() - b; }

inline u64 neg_mod(u64 a, const Modulus& q) { return a == 0 ? 0 : q.value() - a; }

inline u64 mul_mod(u64 a, u64 b, const Modulus& q) { return q.reduce(static_cast<u128>(a) * b); }

/// Shoup companion of a fixed multiplicand w: floor(w * 2^64 / q).
inline u64 shoup_companion(u64 w, const Modulus& q) {
    return static_cast<u64>((static_cast<u128>(w) << 64) / q.value());
}

/// a * w mod q given w's Shoup companion; a < 2^64.
inline u64 mul_shoup(u64 a, u64 w, u64 w_shoup, const Modulus& q) {
    const u64 hi = static_cast<u64>((static_cast<u128>(a) * w_shoup) >> 64);
    const u64 r = a * w - hi * q.value();
    return r >= q.value() ? r - q.value() : r;
}

u64 pow_mod(u64 base, u64 exp, const Modulus& q);
/// Inverse modulo a prime q.
u64 inv_mod(u64 a, const Modulus& q);
/// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime(u64 n);
/// Residue of a signed integer given as a double (any magnitude, already rounded).
u64 residue_of(double integral_value, const Modulus& q);
/// Residue of a signed 64-bit integer.
inline u64 residue_of(std::int64_t v, const Modulus& q) {
    if (v >= 0) return static_cast<u64>(v) % q.value();
    const u64 r = static_cast<u64>(-(v + 1)) % q.value();  // avoids overflow at INT64_MIN
    return q.value() - 1 - r;
}

}  // namespace heact::he

#endif  // HEACT_HE_MODARITH_HPP
