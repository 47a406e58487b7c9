#include "curirl/network.hpp"

#include <cmath>
#include <string>

#include "curirl/error.hpp"
#include "curirl/rng.hpp"

namespace curirl {

InputNormalization InputNormalization::for_room(double environment_size) {
    require(environment_size > 0.0, ErrorKind::invalid_argument, "environment_size must be positive");
    const double half = environment_size / 2.0;
    return {half, half, 1.0 / half};
}

std::string_view to_string(InitScheme scheme) noexcept {
    return scheme == InitScheme::he_uniform ? "he_uniform" : "zeros_output";
}

std::optional<InitScheme> parse_init_scheme(std::string_view text) noexcept {
    if (text == "he_uniform") return InitScheme::he_uniform;
    if (text == "zeros_output") return InitScheme::zeros_output;
    return std::nullopt;
}

PolicyModel init_model(std::size_t input_dim, std::size_t hidden, std::size_t output_dim, std::uint64_t seed,
                       InitScheme scheme, InputNormalization input) {
    require(input_dim > 0 && hidden > 0 && output_dim > 0, ErrorKind::invalid_argument,
            "layer dimensions must be positive");
    require(input_dim == 2, ErrorKind::unsupported_dimension, "input_dim must be 2 (pos_x, pos_z)");
    require(output_dim >= 2, ErrorKind::invalid_argument, "need at least 2 actions");

    Rng rng(seed);
    auto he_block = [&rng](std::size_t rows, std::size_t cols) {
        Tensor t = Tensor::zeros(rows, cols);
        const double limit = std::sqrt(6.0 / static_cast<double>(cols));
        for (double& w : t.data) w = rng.uniform(-limit, limit);
        return t;
    };

    PolicyModel model;
    model.input = input;
    model.params.w1() = he_block(hidden, input_dim);
    model.params.b1() = Tensor::zeros(hidden, 1);
    model.params.w2() = he_block(hidden, hidden);
    model.params.b2() = Tensor::zeros(hidden, 1);
    model.params.w3() = he_block(output_dim, hidden);
    model.params.b3() = Tensor::zeros(output_dim, 1);
    if (scheme == InitScheme::zeros_output) model.params.w3() = Tensor::zeros(output_dim, hidden);
    return model;
}

void validate(const PolicyModel& model) {
    const auto& p = model.params;
    const std::size_t in = p.w1().cols, h = p.w1().rows, k = p.w3().rows;
    const bool ok = in == 2 && h > 0 && k >= 2 && p.b1().rows == h && p.b1().cols == 1 && p.w2().rows == h &&
                    p.w2().cols == h && p.b2().rows == h && p.b2().cols == 1 && p.w3().cols == h &&
                    p.b3().rows == k && p.b3().cols == 1;
    require(ok, ErrorKind::contract, "inconsistent layer shapes");
    for (const auto& b : p.blocks)
        require(b.data.size() == b.rows * b.cols, ErrorKind::contract, "tensor storage does not match its shape");
    require(p.all_finite(), ErrorKind::numeric, "model has non-finite parameters");
    require(std::isfinite(model.input.offset_x) && std::isfinite(model.input.offset_z) &&
                std::isfinite(model.input.scale) && model.input.scale != 0.0,
            ErrorKind::numeric, "invalid input normalization");
}

namespace {

// Same accumulation order as Tape::affine so both paths agree bitwise.
void affine_into(const Tensor& w, std::span<const double> x, const Tensor& b, std::vector<double>& out, bool relu) {
    out.resize(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double* row = w.data.data() + i * w.cols;
        double sum = 0.0;
        for (std::size_t j = 0; j < w.cols; ++j) sum += row[j] * x[j];
        const double y = sum + b.data[i];
        out[i] = relu ? (y > 0.0 ? y : 0.0) : y;
    }
}

std::vector<double> network_input(const InputNormalization& n, Position2 s) {
    return {(s.x - n.offset_x) * n.scale, (s.z - n.offset_z) * n.scale};
}

} // namespace

std::vector<double> forward(const PolicyModel& model, Position2 state) {
    require(state.finite(), ErrorKind::degenerate_input, "state is not finite");
    const auto& p = model.params;
    const auto x = network_input(model.input, state);
    std::vector<double> h1, h2, y;
    affine_into(p.w1(), x, p.b1(), h1, true);
    affine_into(p.w2(), h1, p.b2(), h2, true);
    affine_into(p.w3(), h2, p.b3(), y, false);
    return y;
}

std::vector<double> softmax(std::span<const double> preferences) {
    require(!preferences.empty(), ErrorKind::degenerate_input, "softmax of an empty vector");
    double m = preferences[0];
    for (double y : preferences) {
        require(std::isfinite(y), ErrorKind::degenerate_input, "softmax input is not finite");
        m = y > m ? y : m;
    }
    std::vector<double> p(preferences.size());
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = std::exp(preferences[k] - m);
        total += p[k];
    }
    for (double& v : p) v /= total;
    return p;
}

ModelVars bind_model(Tape& tape, const PolicyModel& model) {
    const auto& p = model.params;
    return ModelVars{tape.leaf(p.w1(), true), tape.leaf(p.b1(), true), tape.leaf(p.w2(), true),
                     tape.leaf(p.b2(), true), tape.leaf(p.w3(), true), tape.leaf(p.b3(), true),
                     model.input,            model.action_count()};
}

Var record_forward(Tape& tape, const ModelVars& vars, Position2 state) {
    require(state.finite(), ErrorKind::degenerate_input, "state is not finite");
    const Var x = tape.constant(network_input(vars.input, state));
    const Var h1 = tape.relu(tape.affine(vars.w1, x, vars.b1));
    const Var h2 = tape.relu(tape.affine(vars.w2, h1, vars.b2));
    return tape.affine(vars.w3, h2, vars.b3);
}

Var record_policy_entropy(Tape& tape, Var logits) {
    const Var p = tape.softmax(logits);
    const Var log_p = tape.log_softmax(logits);
    return tape.scale(tape.dot(p, log_p), -1.0);
}

Gradients backward(Tape& tape, const ModelVars& vars, Var loss) {
    tape.backward(loss);
    const Var handles[ParameterTensors::count] = {vars.w1, vars.b1, vars.w2, vars.b2, vars.w3, vars.b3};
    Gradients out;
    for (std::size_t i = 0; i < ParameterTensors::count; ++i) {
        Tensor& t = out.blocks.blocks[i];
        t.rows = tape.rows(handles[i]);
        t.cols = tape.cols(handles[i]);
        const auto& g = tape.grad(handles[i]);
        t.data = g.empty() ? std::vector<double>(t.rows * t.cols, 0.0) : g;
        for (double v : t.data)
            require(std::isfinite(v), ErrorKind::numeric,
                    "non-finite gradient for " + std::string(ParameterTensors::names[i]));
    }
    return out;
}

} // namespace curirl
