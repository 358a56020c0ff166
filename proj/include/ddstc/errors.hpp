#pragma once

#include <stdexcept>

namespace ddstc {

/// Rejected simulation setup (e.g. cyclic prefix too short for the delay).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace ddstc
