#pragma once

#include <stdexcept>
#include <string>

namespace hodgelab {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf or otherwise unusable numeric input.
struct numeric_error : error { using error::error; };

// Incompatible shapes or ambient dimensions.
struct dim_error : error { using error::error; };

// Gram/metric data that is not Hermitian positive-definite.
struct metric_error : error { using error::error; };

// Operator fails a required (self-)adjointness check.
struct symmetry_error : error { using error::error; };

// Any other violated operation precondition.
struct precondition_error : error { using error::error; };

// Malformed model files, config, or CLI input.
struct input_error : error { using error::error; };

// Structure equations whose induced differential fails d^2 = 0, or a
// foliation split that breaks integrability.
struct integrability_error : input_error { using input_error::input_error; };

// A guaranteed mathematical identity failed on actual data; the CLI maps
// this to exit code 2.
struct theorem_violation : error { using error::error; };

} // namespace hodgelab
