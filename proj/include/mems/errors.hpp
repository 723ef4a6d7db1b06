#pragma once

#include <stdexcept>
#include <string>

namespace mems {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two fields (or a field and a grid) do not share the same discretization.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// The untruncated reaction was evaluated at max(u) >= 1.
class SingularityError : public Error {
public:
    explicit SingularityError(double max_u)
        : Error("nonlocal term is singular: max(u) = " + std::to_string(max_u) + " >= 1"),
          max_u_(max_u) {}
    double max_u() const noexcept { return max_u_; }

private:
    double max_u_;
};

/// An iterative linear solve stopped short of its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (relative residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A fit or search was given too little usable data.
class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace mems
