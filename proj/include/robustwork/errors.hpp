#pragma once

#include <stdexcept>

namespace robustwork {

/// Thrown when a scenario or argument is malformed.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Not enough observations to estimate something.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace robustwork
