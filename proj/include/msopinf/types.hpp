#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace msopinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Invalid or inconsistent configuration / preconditions (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Failure in a numerical procedure, e.g. a singular step matrix or a
/// non-finite loss (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace msopinf
