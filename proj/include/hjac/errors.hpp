#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hjac {

/// Base of every error raised by the solver suite.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched or unsupported dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input outside the domain of an operation (e.g. a non-cyclic ordering).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A zero column (or zero diagonal of R) in a factor that must have full column rank.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

/// A pivot of the indefinite factorization fell below the singularity threshold.
class NumericalSingularityError : public Error {
public:
    using Error::Error;
};

/// A hyperbolic rotation was requested for a pivot block with |tanh 2phi| >= 1,
/// i.e. the pair (A, J) is not definite.
class DefinitenessLostError : public Error {
public:
    explicit DefinitenessLostError(const std::string& what, std::size_t block = 0,
                                   std::size_t i = 0, std::size_t j = 0)
        : Error(what), block_(block), i_(i), j_(j) {}

    std::size_t block() const noexcept { return block_; }
    std::size_t i() const noexcept { return i_; }
    std::size_t j() const noexcept { return j_; }

private:
    std::size_t block_;
    std::size_t i_;
    std::size_t j_;
};

/// File could not be read or written, or has a malformed layout.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hjac
