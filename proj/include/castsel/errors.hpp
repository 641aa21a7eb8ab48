#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace castsel {

/// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, unknown ids, out-of-range arguments.
class InputError : public Error {
public:
    using Error::Error;
};

/// Malformed tree text. Carries the byte offset where parsing stopped.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : InputError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// An internal consistency check failed (corrupt index, broken invariant).
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace castsel
