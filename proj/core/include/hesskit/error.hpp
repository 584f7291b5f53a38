#pragma once

#include <stdexcept>
#include <string>

namespace hesskit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a meaningful value.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An input file does not match its schema. `pointer()` is a JSON pointer
/// (RFC 6901) to the offending element, or empty when the whole document is
/// malformed.
class SchemaError : public Error {
public:
    SchemaError(std::string pointer, const std::string& what)
        : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

} // namespace hesskit
