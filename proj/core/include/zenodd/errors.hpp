#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zenodd {

// Shapes or subsystem dimensions that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An input failed a structural precondition (Hermitian, unitary, projection,
// density operator, Kraus condition, trace preservation ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The polar unitary of a singular matrix is not unique.
class RankDeficientError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An internal identity that must hold algebraically did not hold numerically.
// This always indicates a bug (for instance a subsystem-ordering mistake).
class IdentityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Exhaustive trajectory enumeration would exceed the configured cap.
class EnumerationCapError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Malformed text input (matrix fixtures, sequences, config files).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A per-trajectory statistic failed; `ordinal` identifies the trajectory.
class StatisticError : public std::runtime_error {
public:
    StatisticError(const std::string& what, std::uint64_t ordinal)
        : std::runtime_error(what), ordinal_(ordinal) {}
    std::uint64_t ordinal() const noexcept { return ordinal_; }

private:
    std::uint64_t ordinal_;
};

}  // namespace zenodd
