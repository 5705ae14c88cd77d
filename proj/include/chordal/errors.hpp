#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chordal {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidVertexError : public Error {
public:
    using Error::Error;
};

class EmptyGraphError : public Error {
public:
    EmptyGraphError() : Error("graph has no active vertices") {}
    using Error::Error;
};

class InvalidOrderingError : public Error {
public:
    using Error::Error;
};

/// A policy produced a distribution that does not cover the active vertices.
class PolicyContractError : public Error {
public:
    using Error::Error;
};

/// Parameters, gradients or a forward tape with inconsistent shapes.
class ParamsContractError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class VersionError : public Error {
public:
    using Error::Error;
};

class NormalizationError : public Error {
public:
    using Error::Error;
};

} // namespace chordal
