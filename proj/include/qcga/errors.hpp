#pragma once

/// @file errors.hpp
/// @brief Exception hierarchy shared by every qcga module.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace qcga {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (seed out of range, length mismatch, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Procedure text could not be parsed. `position()` is a 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), reason_(message), position_(position) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    /// The message without the position suffix.
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
    std::size_t position_;
};

/// A rule parsed correctly but lies outside what the four generic rule classes can express.
class UnsupportedRule : public Error {
public:
    using Error::Error;
};

/// The assay parameters admit no critical error solving the exceedance equation.
class InfeasibleAssay : public Error {
public:
    using Error::Error;
};

/// Job configuration is invalid. `field()` names the offending key path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace qcga
