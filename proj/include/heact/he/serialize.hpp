// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_HE_SERIALIZE_HPP
#define HEACT_HE_SERIALIZE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "heact/he/ckks.hpp"

namespace heact::he {

// Binary layout, all integers little-endian:
//
//   Ciphertext: "CKT1" | u32 N | u32 level | u32 round(log2 scale)
//               | f64 scale | u32 mult_count | u32 part count
//               | per part: u64 word count, then the u64 NTT-form words
//   KeySet:     "KEY1" | u32 N | u32 max level | u32 relin digits | u64 seed
//               | per polynomial: u32 limb count, u32 prime index per limb,
//                 u64 word count, then the words
//
// The format exists for size reporting and fixture replay only.

std::vector<std::uint8_t> serialize(const Ciphertext& ct);
/// Throws ParseError on a malformed buffer or one that does not fit `ctx`.
Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> bytes, const CkksContext& ctx);

std::vector<std::uint8_t> serialize(const KeySet& keys, const CkksContext& ctx);
KeySet deserialize_keyset(std::span<const std::uint8_t> bytes, const CkksContext& ctx);

/// Serialized size of a ciphertext in bytes.
std::size_t ct_bytes(const Ciphertext& ct);

}  // namespace heact::he

#endif  // HEACT_HE_SERIALIZE_HPP
