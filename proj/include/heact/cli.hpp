// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_CLI_HPP
#define HEACT_CLI_HPP

#include <ostream>

namespace heact::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // numeric or runtime failure
inline constexpr int kExitUsage = 2;    // bad flags, unreadable inputs

/// Runs one subcommand. Data goes to --out (or `out` when absent), the
/// human summary to `out` when --out is given, diagnostics to `err`.
/// Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heact::cli

#endif  // HEACT_CLI_HPP
