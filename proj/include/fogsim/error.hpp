#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fogsim {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (bad header, wrong channel count, bad CSV line).
class FormatError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A raster contained pixels that violate a per-pixel precondition
/// (non-finite values, non-positive depth). Carries the offending count.
class InvalidPixels : public Error {
public:
    InvalidPixels(const std::string& what, std::size_t count)
        : Error(what), count_(count) {}

    std::size_t count() const noexcept { return count_; }

private:
    std::size_t count_;
};

}  // namespace fogsim
