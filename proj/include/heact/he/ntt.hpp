// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_HE_NTT_HPP
#define HEACT_HE_NTT_HPP

#include <span>
#include <vector>

#include "heact/he/modarith.hpp"

namespace heact::he {

/// Negacyclic number-theoretic transform over Z_q[X]/(X^N + 1).
///
/// forward() maps coefficients (natural order) to evaluations at the odd
/// powers of a primitive 2N-th root psi, in bit-reversed order; pointwise
/// products in that domain are negacyclic convolutions. inverse() undoes it,
/// including the 1/N factor.
class NttTables {
public:
    NttTables(std::size_t n, Modulus q);

    std::size_t size() const { return n_; }
    const Modulus& modulus() const { return q_; }
    u64 root() const { return psi_; }

    void forward(std::span<u64> a) const;
    void inverse(std::span<u64> a) const;

private:
    std::size_t n_;
    Modulus q_;
    u64 psi_ = 0;
    std::vector<u64> psi_rev_, psi_rev_shoup_;
    std::vector<u64> psi_inv_rev_, psi_inv_rev_shoup_;
    u64 n_inv_ = 0, n_inv_shoup_ = 0;
};

/// Reference O(N^2) negacyclic product, for tests.
std::vector<u64> negacyclic_schoolbook(std::span<const u64> a, std::span<const u64> b,
                                       const Modulus& q);

}  // namespace heact::he

#endif  // HEACT_HE_NTT_HPP
