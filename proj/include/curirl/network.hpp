#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "curirl/autodiff.hpp"
#include "curirl/domain.hpp"
#include "curirl/tensor.hpp"

namespace curirl {

/// Fixed affine map from room coordinates to network input:
/// input = (state - offset) * scale. Not trained.
struct InputNormalization {
    double offset_x = 0.0;
    double offset_z = 0.0;
    double scale = 1.0;

    /// Maps [0, size]^2 onto [-1, 1]^2.
    static InputNormalization for_room(double environment_size);
    bool operator==(const InputNormalization&) const = default;
};

/// Two hidden ReLU layers and a linear head producing one preference per action:
///   h1 = ReLU(W1 x + b1), h2 = ReLU(W2 h1 + b2), y = W3 h2 + b3.
struct PolicyModel {
    ParameterTensors params;
    InputNormalization input;

    std::size_t input_dim() const noexcept { return params.w1().cols; }
    std::size_t hidden_dim() const noexcept { return params.w1().rows; }
    std::size_t action_count() const noexcept { return params.w3().rows; }
    bool operator==(const PolicyModel&) const = default;
};

/// d loss / d parameter, block-for-block shaped like the model.
struct Gradients {
    ParameterTensors blocks;
};

enum class InitScheme {
    he_uniform,   // weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), biases 0
    zeros_output, // he_uniform with W3 and b3 zeroed: exactly uniform initial policy
};

std::string_view to_string(InitScheme scheme) noexcept;
std::optional<InitScheme> parse_init_scheme(std::string_view text) noexcept;

inline constexpr std::size_t default_hidden_units = 128;

PolicyModel init_model(std::size_t input_dim, std::size_t hidden, std::size_t output_dim, std::uint64_t seed,
                       InitScheme scheme = InitScheme::he_uniform, InputNormalization input = {});

/// Throws unless shapes are mutually consistent and all parameters finite.
void validate(const PolicyModel& model);

/// Preference vector y for one state; no normalization applied.
std::vector<double> forward(const PolicyModel& model, Position2 state);

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> preferences);

/// Tape handles for the model's parameters.
struct ModelVars {
    Var w1, b1, w2, b2, w3, b3;
    InputNormalization input;
    std::size_t action_count = 0;
};

ModelVars bind_model(Tape& tape, const PolicyModel& model);
Var record_forward(Tape& tape, const ModelVars& vars, Position2 state);
/// -sum_a p(a|s) log p(a|s) of softmax(logits), as a scalar node.
Var record_policy_entropy(Tape& tape, Var logits);

/// Runs the reverse sweep from `loss` and gathers gradients for every parameter.
Gradients backward(Tape& tape, const ModelVars& vars, Var loss);

} // namespace curirl
