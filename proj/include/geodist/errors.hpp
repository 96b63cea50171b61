#pragma once

#include <stdexcept>
#include <string>

namespace geodist {

struct InvalidDiscriminantError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotReducedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MixedDiscriminantsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParityViolationError : std::logic_error {
    using std::logic_error::logic_error;
};

struct EmptySubcollectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepTooCoarseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RadiusTooLargeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalDegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace geodist
