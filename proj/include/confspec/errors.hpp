#pragma once

#include <stdexcept>
#include <string>

namespace confspec {

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnivalenceViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExponentMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateCurve : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace confspec
