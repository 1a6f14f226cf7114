#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tailscope {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV row, JSON line). Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Caller passed arguments outside an operation's precondition.
class UsageError : public Error {
public:
    using Error::Error;
};

// Inconsistent parameters (shape mismatch, non-positive sigma, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tailscope
