#pragma once

#include <stdexcept>
#include <string>

namespace evdenoise {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input record. `location` is a 1-based line number for text
// formats and a byte offset for binary formats.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t location)
        : Error(what + " (at " + std::to_string(location) + ")"), location_(location) {}

    std::size_t location() const noexcept { return location_; }

private:
    std::size_t location_;
};

// A value falls outside the domain it must live in (coordinates, labels).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Timestamps went backwards in something that must be sorted.
class OrderingError : public Error {
public:
    using Error::Error;
};

// Invalid configuration or shape mismatch between collaborating objects.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace evdenoise
