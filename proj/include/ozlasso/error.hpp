#pragma once

#include <stdexcept>
#include <string>

namespace ozlasso {

// Base of every error raised by the library. Commands map any Error to a
// nonzero exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

// Raised when XᵀX (or XᵀX + nλI) has a numerically zero pivot.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(std::size_t pivot, const std::string& what)
        : Error(what), pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class DegenerateTargetError : public Error {
public:
    using Error::Error;
};

}  // namespace ozlasso
