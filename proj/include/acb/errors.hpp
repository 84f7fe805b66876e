#pragma once

#include <stdexcept>
#include <string>

namespace acb {

// Base of every error raised by the library. The CLI maps the two families
// below onto its exit codes (2 for configuration problems, 3 for numerical
// failures).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters, unknown identifiers, unresolvable truth ids.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Sequence lengths that do not match the expected layout.
class ShapeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Arguments outside the mathematical domain of a formula.
class DomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// The local design matrix stayed singular after regularization.
class BandwidthTooSmall : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace acb
