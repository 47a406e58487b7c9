#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "curirl/network.hpp"

namespace curirl {

/// Builds a scalar loss on the tape from bound model parameters.
using RecordedLoss = std::function<Var(Tape&, const ModelVars&)>;

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::string worst_parameter;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t samples = 0;
};

/// |a - n| / max(1e-8, |a| + |n|)
double gradient_relative_error(double analytic, double numeric) noexcept;

/// Compares reverse-mode gradients of `loss` against central differences
/// (L(theta + eps) - L(theta - eps)) / (2 eps) on `samples` distinct parameters
/// drawn with Rng(seed). eps must lie in [1e-7, 1e-3].
GradientCheckResult gradient_check(const PolicyModel& model, const RecordedLoss& loss, double eps,
                                   std::size_t samples, std::uint64_t seed = 0);

} // namespace curirl
