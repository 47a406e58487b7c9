#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "curirl/network.hpp"

namespace curirl {

/// Bias-corrected Adam moments over a flat parameter vector.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit AdamState(std::size_t parameter_count = 0) : m(parameter_count, 0.0), v(parameter_count, 0.0) {}
    static AdamState for_model(const PolicyModel& model) { return AdamState(model.params.total_size()); }
};

/// One update in place:
///   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
///   theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr);

/// Same update applied block by block to a model; parameters are re-checked for finiteness.
void adam_step(AdamState& state, PolicyModel& model, const Gradients& grads, double lr);

} // namespace curirl
