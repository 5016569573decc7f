#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

/// Numeric or physical-domain failure (out-of-band frequency, degenerate input).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid model parameter (non-monotone structure, bad count, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or invalid run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File system failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace spdc
