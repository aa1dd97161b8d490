#pragma once

#include <stdexcept>
#include <string>

namespace dsparse {

/// Operand shapes do not conform for the requested operation.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity reached a library entry point.
class NonFiniteError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid user configuration. `key()` names the offending setting when known.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& message, std::string key = {})
        : std::invalid_argument(message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Checkpoint written by an incompatible format version.
class VersionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dsparse
