#pragma once

#include <stdexcept>
#include <string>

namespace rnlab {

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MonotonicityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QueryOutsideRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct MassDriftExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace rnlab
