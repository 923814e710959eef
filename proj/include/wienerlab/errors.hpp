#pragma once

#include <stdexcept>
#include <string>

namespace wienerlab {

// Argument validation failures (bad grids, mismatched dimensions, ...).
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A caller broke a declared contract (non-adapted process, missing pairing).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Numerical failure: blow-up, overflow, singular regression.
struct NumericalError : std::runtime_error {
    NumericalError(const std::string& what, int step = -1)
        : std::runtime_error(what), step_index(step) {}
    int step_index;
};

}  // namespace wienerlab
