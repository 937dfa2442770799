#pragma once

#include <stdexcept>
#include <string>

namespace quenchlab {

// Invalid user-facing configuration (bad N, empty window, malformed flag...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical guard tripped: positivity violation, lost normalization, no
// sign change in a bracket.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace quenchlab
