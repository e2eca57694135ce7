#pragma once

#include <stdexcept>
#include <string>

namespace mkdv {

/// Thrown when a computation is not resolved by the grid or time sampling
/// it was handed. The message names the quantity that must grow.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by the solver when a monitored invariant drifts past tolerance.
class DriftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mkdv
