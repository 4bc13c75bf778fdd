#pragma once

#include <stdexcept>
#include <string>

namespace fkpp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied data was violated (bad axis, NaN fitness, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative solver failed to reach its tolerance, or produced a result
/// that breaks a structural guarantee (e.g. a non-positive Perron vector).
class SolverError : public Error {
public:
    SolverError(const std::string& what, long iterations)
        : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    long iterations() const noexcept { return iterations_; }

private:
    long iterations_;
};

}  // namespace fkpp
