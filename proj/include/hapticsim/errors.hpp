#pragma once

#include <stdexcept>
#include <string>

namespace hapticsim {

/// Invalid parameters, unknown names, malformed config files.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Spatial contract violations: sensor outside the field, grids too small, degenerate point sets.
class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Factorization failures and non-finite data.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by action selection when the percept carries no stimulus.
class LostStimulus : public std::runtime_error {
public:
    explicit LostStimulus(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hapticsim
