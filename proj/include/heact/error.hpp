// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_ERROR_HPP
#define HEACT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace heact {

/// Invalid arguments or violated preconditions.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numeric routine produced non-finite or ill-conditioned output.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input. line() is the offending 1-based line of a text input,
/// 0 for binary buffers.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A file could not be read or written; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The modulus chain has too few levels left for the requested operation.
class LevelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands disagree on level or scale.
class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Encoded value would exceed the coefficient headroom of the modulus.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Non-polynomial activation handed to an encrypted evaluator.
class IncompatibleActivation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Training produced a non-finite loss.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(const std::string& what, int epoch)
        : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace heact

#endif  // HEACT_ERROR_HPP
