#include "curirl/adam.hpp"

#include <cmath>

#include "curirl/error.hpp"

namespace curirl {

namespace {

void update_range(AdamState& s, std::span<double> params, std::span<const double> grads, std::size_t offset,
                  double lr, double c1, double c2) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        double& m = s.m[offset + i];
        double& v = s.v[offset + i];
        m = s.beta1 * m + (1.0 - s.beta1) * g;
        v = s.beta2 * v + (1.0 - s.beta2) * g * g;
        const double m_hat = m / c1;
        const double v_hat = v / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
}

void check_grads(std::span<const double> grads) {
    for (double g : grads) require(std::isfinite(g), ErrorKind::numeric, "non-finite gradient passed to adam_step");
}

} // namespace

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr) {
    require(lr > 0.0 && std::isfinite(lr), ErrorKind::invalid_argument, "learning rate must be positive");
    require(params.size() == grads.size() && params.size() == state.m.size() && state.v.size() == state.m.size(),
            ErrorKind::contract, "adam_step shape mismatch");
    check_grads(grads);
    ++state.t;
    const double t = static_cast<double>(state.t);
    update_range(state, params, grads, 0, lr, 1.0 - std::pow(state.beta1, t), 1.0 - std::pow(state.beta2, t));
}

void adam_step(AdamState& state, PolicyModel& model, const Gradients& grads, double lr) {
    require(lr > 0.0 && std::isfinite(lr), ErrorKind::invalid_argument, "learning rate must be positive");
    require(model.params.same_shape(grads.blocks), ErrorKind::contract, "gradient shapes do not match the model");
    require(state.m.size() == model.params.total_size() && state.v.size() == state.m.size(), ErrorKind::contract,
            "optimizer state does not match the model");
    for (const auto& b : grads.blocks.blocks) check_grads(b.data);

    ++state.t;
    const double t = static_cast<double>(state.t);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < ParameterTensors::count; ++i) {
        auto& block = model.params.blocks[i].data;
        update_range(state, block, grads.blocks.blocks[i].data, offset, lr, c1, c2);
        offset += block.size();
    }
    require(model.params.all_finite(), ErrorKind::numeric, "non-finite parameter after adam_step");
}

} // namespace curirl
