#pragma once

#include <stdexcept>
#include <string>

namespace adiacheck {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad sizes, bad parameters, unnormalized states).
class InvalidInput : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class NonHermitian : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// The degeneracy structure of the spectrum changed along the time grid
/// (a level crossing, a splitting, or a gap closing below the grouping tolerance).
class MultiplicityChange : public Error {
public:
    MultiplicityChange(const std::string& what, double t_lo, double t_hi)
        : Error(what), t_lo_(t_lo), t_hi_(t_hi) {}

    double interval_start() const noexcept { return t_lo_; }
    double interval_end() const noexcept { return t_hi_; }

private:
    double t_lo_;
    double t_hi_;
};

/// Parameters at which a closed-form expression is singular.
class SingularParameter : public Error {
public:
    using Error::Error;
};

/// Consecutive eigenframes are too far apart to be aligned; the grid must be refined.
class GridTooCoarse : public Error {
public:
    using Error::Error;
};

} // namespace adiacheck
