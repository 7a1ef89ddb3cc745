// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/he/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "heact/error.hpp"
#include "heact/he/modarith.hpp"

namespace heact::he {

void CkksParams::validate() const {
    static constexpr std::size_t kAllowed[] = {1024, 2048, 4096, 8192};
    if (std::find(std::begin(kAllowed), std::end(kAllowed), ring_degree) == std::end(kAllowed)) {
        throw ParameterError("ring_degree must be one of 1024, 2048, 4096, 8192");
    }
    if (modulus_chain.size() < 2) throw ParameterError("modulus chain needs at least two primes");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("scale must be positive");
    int exp = 0;
    if (std::frexp(scale, &exp) != 0.5) throw ParameterError("scale must be a power of two");
    if (!(error_stddev >= 0.0)) throw ParameterError("error_stddev must be nonnegative");

    std::set<std::uint64_t> seen;
    auto check_prime = [&](std::uint64_t q) {
        if (q >= (1ULL << 62)) throw ParameterError("primes must be below 2^62");
        if (!is_prime(q)) throw ParameterError("modulus " + std::to_string(q) + " is not prime");
        if (q % (2 * ring_degree) != 1) {
            throw ParameterError("modulus " + std::to_string(q) + " is not 1 mod 2N");
        }
        if (!seen.insert(q).second) throw ParameterError("moduli must be distinct");
    };
    for (auto q : modulus_chain) check_prime(q);
    check_prime(special_prime);

    const auto smallest = *std::min_element(modulus_chain.begin(), modulus_chain.end());
    if (!(scale < static_cast<double>(smallest))) {
        throw ParameterError("scale must be smaller than every chain prime");
    }
}

std::string CkksParams::digest() const {
    // FNV-1a over the defining fields.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    mix(ring_degree);
    for (auto q : modulus_chain) mix(q);
    mix(special_prime);
    mix(static_cast<std::uint64_t>(std::llround(std::log2(scale) * 1000)));
    mix(static_cast<std::uint64_t>(std::llround(error_stddev * 1000)));
    char buf[40];
    std::snprintf(buf, sizeof(buf), "N%zu-L%d-%016llx", ring_degree, max_level(),
                  static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::uint64_t> find_ntt_primes(int bits, std::size_t ring_degree, std::size_t count,
                                           const std::vector<std::uint64_t>& exclude, bool above_only) {
    if (bits < 20 || bits > 61) throw ParameterError("prime size must be in [20, 61] bits");
    const std::uint64_t step = 2 * ring_degree;
    const std::uint64_t base = 1ULL << bits;
    std::vector<std::uint64_t> out;
    auto take = [&](std::uint64_t q) {
        if (out.size() < count && is_prime(q) &&
            std::find(exclude.begin(), exclude.end(), q) == exclude.end()) {
            out.push_back(q);
        }
    };
    for (std::uint64_t k = 0; out.size() < count; ++k) {
        take(base + 1 + k * step);
        if (!above_only && k > 0 && k * step < base) take(base + 1 - k * step);
        if (k * step > base / 2) throw ParameterError("ran out of NTT-friendly primes");
    }
    return out;
}

CkksParams CkksParams::generate(std::size_t ring_degree, const std::vector<int>& chain_bits,
                                int special_bits, int log_scale) {
    CkksParams p;
    p.ring_degree = ring_degree;
    std::vector<std::uint64_t> used;
    // Each entry takes the nearest unused prime of its size. Primes of the
    // scale's size sit above 2^log_scale so the scale stays below all of them.
    for (std::size_t i = 0; i < chain_bits.size(); ++i) {
        const auto q = find_ntt_primes(chain_bits[i], ring_degree, 1, used, chain_bits[i] == log_scale);
        used.push_back(q.front());
    }
    // Rescaling consumes the chain from the top, so the scale-sized primes
    // closest to the scale go last in the chain and are divided out first.
    std::vector<std::size_t> at_scale;
    for (std::size_t i = 0; i < chain_bits.size(); ++i) {
        if (chain_bits[i] == log_scale) at_scale.push_back(i);
    }
    for (std::size_t a = 0, b = at_scale.size(); a + 1 < b; ++a, --b) {
        std::swap(used[at_scale[a]], used[at_scale[b - 1]]);
    }
    p.modulus_chain = used;
    p.special_prime = find_ntt_primes(special_bits, ring_degree, 1, used).front();
    p.scale = std::ldexp(1.0, log_scale);
    p.validate();
    return p;
}

CkksParams CkksParams::fast() {
    static const CkksParams p = generate(1024, {60, 40, 40, 40, 40, 40, 40}, 61, 40);
    return p;
}

CkksParams CkksParams::standard() {
    static const CkksParams p = generate(4096, {60, 40, 40, 40, 40, 40, 40}, 61, 40);
    return p;
}

CkksParams params_for_profile(std::string_view profile) {
    if (profile == "fast") return CkksParams::fast();
    if (profile == "default") return CkksParams::standard();
    throw ParameterError("unknown parameter profile '" + std::string(profile) +
                         "' (expected fast or default)");
}

}  // namespace heact::he
