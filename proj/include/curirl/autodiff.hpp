#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "curirl/tensor.hpp"

namespace curirl {

/// Handle to a value recorded on a Tape.
struct Var {
    std::uint32_t id = 0;
};

/// Minimal reverse-mode recorder over dense vectors and matrices.
///
/// Only the primitives the entropy objectives need are provided. Every
/// recorded value is checked for finiteness as it is produced, and a failure
/// names the primitive. The ReLU subgradient at 0 is 0.
class Tape {
public:
    enum class Op : std::uint8_t {
        leaf,
        affine,      // W x + b
        relu,
        softmax,
        log_softmax, // y - logsumexp(y), stable for any finite input
        log,
        dot,         // scalar a . b
        select,      // scalar v[i]
        weighted_sum,
        add,
        scale,
    };

    /// Matrix- or vector-valued input. Gradients are kept only when `trainable`.
    Var leaf(const Tensor& value, bool trainable);
    Var constant(std::vector<double> values);

    Var affine(Var w, Var x, Var b);
    Var relu(Var v);
    Var softmax(Var v);
    Var log_softmax(Var v);
    Var log(Var v);
    Var dot(Var a, Var b);
    Var select(Var v, std::size_t index);
    /// Scalar sum_k weights[k] * terms[k], accumulated in the given order.
    Var weighted_sum(std::span<const Var> terms, std::span<const double> weights);
    Var add(Var a, Var b);
    Var scale(Var v, double factor);

    const std::vector<double>& value(Var v) const { return nodes_.at(v.id).value; }
    double scalar(Var v) const;
    std::size_t rows(Var v) const { return nodes_.at(v.id).rows; }
    std::size_t cols(Var v) const { return nodes_.at(v.id).cols; }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    /// Reverse sweep from a scalar node; gradients of earlier sweeps are discarded.
    void backward(Var loss);
    /// d loss / d v after backward(); empty when v does not influence the loss.
    const std::vector<double>& grad(Var v) const { return nodes_.at(v.id).grad; }

    static std::string_view op_name(Op op) noexcept;

private:
    struct Node {
        Op op = Op::leaf;
        std::uint32_t a = 0, b = 0, c = 0;
        std::size_t rows = 0, cols = 1;
        bool needs_grad = false;
        std::vector<double> value;
        std::vector<double> grad;
        std::size_t aux = 0;          // select index / weighted_sum offset
        double factor = 1.0;          // scale
    };

    Var push(Node node);
    Node& node(Var v) { return nodes_.at(v.id); }
    const Node& node(Var v) const { return nodes_.at(v.id); }
    void require_vector(Var v, std::string_view op) const;
    void propagate(Node& n);

    std::vector<Node> nodes_;
    std::vector<Var> sum_terms_;
    std::vector<double> sum_weights_;
};

} // namespace curirl
