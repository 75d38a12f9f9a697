#pragma once

#include <stdexcept>
#include <string>

namespace fdebvm {

/// Input outside the mathematical domain of an operation (e.g. alpha not in (1,2),
/// negative diffusion coefficient).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller misuse: dimension mismatch, index out of range, size too small.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Valid input that this implementation does not support (e.g. variable
/// coefficients where a constant-coefficient operator is required).
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A circulant or preconditioner spectrum contains a (numerically) zero eigenvalue.
class SingularError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative or factorization kernel failed to produce a result.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fdebvm
