// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_HE_PARAMS_HPP
#define HEACT_HE_PARAMS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace heact::he {

enum class SecurityNote { DemoInsecure, Toy };

/// Leveled CKKS parameters.
///
/// modulus_chain holds the data primes q_0..q_L. A ciphertext at level l is
/// defined modulo q_0*...*q_l and each rescale drops the last prime, so L
/// multiplicative levels are available. special_prime is the extra key-switching
/// prime used only inside relinearization.
///
/// NOT cryptographically secure at any preset; these parameters exist to study
/// numerics and depth.
struct CkksParams {
    std::size_t ring_degree = 0;
    std::vector<std::uint64_t> modulus_chain;
    std::uint64_t special_prime = 0;
    double scale = 0.0;
    double error_stddev = 3.2;
    SecurityNote security_note = SecurityNote::DemoInsecure;

    int max_level() const { return static_cast<int>(modulus_chain.size()) - 1; }
    std::size_t slot_count() const { return ring_degree / 2; }

    /// Throws ParameterError when an invariant does not hold.
    void validate() const;

    /// Short stable fingerprint of the parameter set, for reports.
    std::string digest() const;

    /// Picks NTT-friendly primes (q = 1 mod 2N) closest to 2^bits.
    static CkksParams generate(std::size_t ring_degree, const std::vector<int>& chain_bits,
                               int special_bits, int log_scale);

    /// N=1024, chain 60 + 6x40 bits, special 61 bits, scale 2^40.
    static CkksParams fast();
    /// N=4096, chain 60 + 6x40 bits, special 61 bits, scale 2^40.
    static CkksParams standard();
};

/// "fast" or "default". Throws ParameterError otherwise.
CkksParams params_for_profile(std::string_view profile);

/// Primes p = 1 mod 2N nearest to 2^bits, alternating above and below
/// (or only above), skipping anything in `exclude`.
std::vector<std::uint64_t> find_ntt_primes(int bits, std::size_t ring_degree, std::size_t count,
                                           const std::vector<std::uint64_t>& exclude = {},
                                           bool above_only = false);

}  // namespace heact::he

#endif  // HEACT_HE_PARAMS_HPP
