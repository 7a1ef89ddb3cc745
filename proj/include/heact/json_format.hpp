// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_JSON_FORMAT_HPP
#define HEACT_JSON_FORMAT_HPP

#include <string>

#include <json.hpp>

namespace heact {

/// Serializes j with every floating-point number printed in fixed notation
/// with `decimals` digits. Object keys come out sorted (nlohmann::json keeps
/// objects in a std::map). Output ends with '\n'; the same value always
/// yields the same bytes.
std::string dump_fixed(const nlohmann::json& j, int decimals, int indent = 2);

/// Fixed-notation rendering used by every CSV and JSON emitter.
std::string format_fixed(double v, int decimals);

}  // namespace heact

#endif  // HEACT_JSON_FORMAT_HPP
