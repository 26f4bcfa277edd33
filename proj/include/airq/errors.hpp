#pragma once
#include <stdexcept>
#include <string>

namespace airq {

// Input files that do not conform to their schema.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated preconditions or invariants on otherwise well-formed data.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad run configuration (unknown keys, missing paths, type mismatches).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / serialization failures.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Query outside a grid's spatial or temporal extent.
struct OutOfDomainError : ValidationError {
    explicit OutOfDomainError(const std::string& msg) : ValidationError(msg) {}
};

// All contributing grid cells carry the missing sentinel.
struct MissingDataError : ValidationError {
    explicit MissingDataError(const std::string& msg) : ValidationError(msg) {}
};

}  // namespace airq
