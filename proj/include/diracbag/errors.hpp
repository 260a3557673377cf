#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diracbag {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: violated preconditions, malformed configuration.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::size_t size = 0)
        : Error(what), size_(size) {}
    std::size_t size() const noexcept { return size_; }

private:
    std::size_t size_;
};

/// No sign change could be located for a root search.
class BracketError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// A discretization is too coarse for the requested tolerance.
class RefinementNeeded : public ConvergenceError {
public:
    RefinementNeeded(const std::string& what, double coarse, double fine)
        : ConvergenceError(what), coarse_(coarse), fine_(fine) {}
    double coarse() const noexcept { return coarse_; }
    double fine() const noexcept { return fine_; }

private:
    double coarse_;
    double fine_;
};

}  // namespace diracbag
