#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace salm {

/// Operand shapes or matrix dimensions do not conform.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A mode index outside [0, N).
class ModeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A scalar parameter outside its admissible range (tau <= 0, sr outside (0,1], ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input value outside the operator's domain (e.g. negative entries for vector shrinkage).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A problem specification that cannot be realized (rank exceeding extent, ...).
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A metric whose definition does not apply to the given data.
class MetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The decomposition routine failed to converge or received non-finite input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed file. Carries the byte offset at which parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace salm
