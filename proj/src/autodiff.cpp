#include "curirl/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curirl/error.hpp"

namespace curirl {

std::string_view Tape::op_name(Op op) noexcept {
    switch (op) {
    case Op::leaf: return "leaf";
    case Op::affine: return "affine";
    case Op::relu: return "relu";
    case Op::softmax: return "softmax";
    case Op::log_softmax: return "log_softmax";
    case Op::log: return "log";
    case Op::dot: return "dot";
    case Op::select: return "select";
    case Op::weighted_sum: return "weighted_sum";
    case Op::add: return "add";
    case Op::scale: return "scale";
    }
    return "?";
}

Var Tape::push(Node n) {
    for (double v : n.value)
        if (!std::isfinite(v))
            fail(ErrorKind::numeric, "non-finite value produced by " + std::string(op_name(n.op)));
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Tape::require_vector(Var v, std::string_view op) const {
    if (node(v).cols != 1) fail(ErrorKind::contract, std::string(op) + " expects a vector operand");
}

Var Tape::leaf(const Tensor& value, bool trainable) {
    Node n;
    n.op = Op::leaf;
    n.rows = value.rows;
    n.cols = value.cols;
    n.needs_grad = trainable;
    n.value = value.data;
    return push(std::move(n));
}

Var Tape::constant(std::vector<double> values) {
    Node n;
    n.rows = values.size();
    n.value = std::move(values);
    return push(std::move(n));
}

Var Tape::affine(Var w, Var x, Var b) {
    const Node& W = node(w);
    require_vector(x, "affine");
    require_vector(b, "affine");
    if (W.cols != node(x).rows || W.rows != node(b).rows)
        fail(ErrorKind::contract, "affine shape mismatch");
    Node n;
    n.op = Op::affine;
    n.a = w.id;
    n.b = x.id;
    n.c = b.id;
    n.rows = W.rows;
    n.needs_grad = W.needs_grad || node(x).needs_grad || node(b).needs_grad;
    n.value.resize(W.rows);
    const auto& xv = node(x).value;
    const auto& bv = node(b).value;
    for (std::size_t i = 0; i < W.rows; ++i) {
        const double* row = W.value.data() + i * W.cols;
        double sum = 0.0;
        for (std::size_t j = 0; j < W.cols; ++j) sum += row[j] * xv[j];
        n.value[i] = sum + bv[i];
    }
    return push(std::move(n));
}

Var Tape::relu(Var v) {
    require_vector(v, "relu");
    Node n;
    n.op = Op::relu;
    n.a = v.id;
    n.rows = node(v).rows;
    n.needs_grad = node(v).needs_grad;
    n.value = node(v).value;
    for (double& x : n.value) x = x > 0.0 ? x : 0.0;
    return push(std::move(n));
}

namespace {

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

} // namespace

Var Tape::softmax(Var v) {
    require_vector(v, "softmax");
    const auto& in = node(v).value;
    if (in.empty()) fail(ErrorKind::contract, "softmax of an empty vector");
    Node n;
    n.op = Op::softmax;
    n.a = v.id;
    n.rows = in.size();
    n.needs_grad = node(v).needs_grad;
    const double m = max_of(in);
    n.value.resize(in.size());
    double total = 0.0;
    for (std::size_t k = 0; k < in.size(); ++k) {
        n.value[k] = std::exp(in[k] - m);
        total += n.value[k];
    }
    for (double& p : n.value) p /= total;
    return push(std::move(n));
}

Var Tape::log_softmax(Var v) {
    require_vector(v, "log_softmax");
    const auto& in = node(v).value;
    if (in.empty()) fail(ErrorKind::contract, "log_softmax of an empty vector");
    Node n;
    n.op = Op::log_softmax;
    n.a = v.id;
    n.rows = in.size();
    n.needs_grad = node(v).needs_grad;
    const double m = max_of(in);
    double total = 0.0;
    for (double y : in) total += std::exp(y - m);
    const double lse = m + std::log(total);
    n.value.resize(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) n.value[k] = in[k] - lse;
    return push(std::move(n));
}

Var Tape::log(Var v) {
    require_vector(v, "log");
    Node n;
    n.op = Op::log;
    n.a = v.id;
    n.rows = node(v).rows;
    n.needs_grad = node(v).needs_grad;
    n.value = node(v).value;
    for (double& x : n.value) x = std::log(x);
    return push(std::move(n));
}

Var Tape::dot(Var a, Var b) {
    require_vector(a, "dot");
    require_vector(b, "dot");
    const auto& av = node(a).value;
    const auto& bv = node(b).value;
    if (av.size() != bv.size()) fail(ErrorKind::contract, "dot length mismatch");
    Node n;
    n.op = Op::dot;
    n.a = a.id;
    n.b = b.id;
    n.rows = 1;
    n.needs_grad = node(a).needs_grad || node(b).needs_grad;
    double sum = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) sum += av[i] * bv[i];
    n.value = {sum};
    return push(std::move(n));
}

Var Tape::select(Var v, std::size_t index) {
    require_vector(v, "select");
    if (index >= node(v).rows) fail(ErrorKind::contract, "select index out of range");
    Node n;
    n.op = Op::select;
    n.a = v.id;
    n.aux = index;
    n.rows = 1;
    n.needs_grad = node(v).needs_grad;
    n.value = {node(v).value[index]};
    return push(std::move(n));
}

Var Tape::weighted_sum(std::span<const Var> terms, std::span<const double> weights) {
    if (terms.size() != weights.size()) fail(ErrorKind::contract, "weighted_sum: terms/weights length mismatch");
    Node n;
    n.op = Op::weighted_sum;
    n.aux = sum_terms_.size();
    n.a = static_cast<std::uint32_t>(terms.size());
    n.rows = 1;
    double sum = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const Node& t = node(terms[k]);
        if (t.value.size() != 1) fail(ErrorKind::contract, "weighted_sum terms must be scalars");
        n.needs_grad = n.needs_grad || t.needs_grad;
        sum += weights[k] * t.value[0];
        sum_terms_.push_back(terms[k]);
        sum_weights_.push_back(weights[k]);
    }
    n.value = {sum};
    return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
    if (node(a).rows != node(b).rows || node(a).cols != node(b).cols)
        fail(ErrorKind::contract, "add shape mismatch");
    Node n;
    n.op = Op::add;
    n.a = a.id;
    n.b = b.id;
    n.rows = node(a).rows;
    n.cols = node(a).cols;
    n.needs_grad = node(a).needs_grad || node(b).needs_grad;
    n.value = node(a).value;
    const auto& bv = node(b).value;
    for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] += bv[i];
    return push(std::move(n));
}

Var Tape::scale(Var v, double factor) {
    Node n;
    n.op = Op::scale;
    n.a = v.id;
    n.factor = factor;
    n.rows = node(v).rows;
    n.cols = node(v).cols;
    n.needs_grad = node(v).needs_grad;
    n.value = node(v).value;
    for (double& x : n.value) x *= factor;
    return push(std::move(n));
}

double Tape::scalar(Var v) const {
    const auto& n = node(v);
    if (n.value.size() != 1) fail(ErrorKind::contract, "value is not a scalar");
    return n.value[0];
}

void Tape::backward(Var loss) {
    if (node(loss).value.size() != 1) fail(ErrorKind::contract, "backward requires a scalar loss");
    for (auto& n : nodes_) n.grad.clear();
    node(loss).grad = {1.0};
    for (std::size_t i = loss.id + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (n.grad.empty() || !n.needs_grad || n.op == Op::leaf) continue;
        propagate(n);
    }
}

void Tape::propagate(Node& n) {
    auto accumulate = [this](std::uint32_t id) -> std::vector<double>* {
        Node& target = nodes_[id];
        if (!target.needs_grad) return nullptr;
        if (target.grad.empty()) target.grad.assign(target.value.size(), 0.0);
        return &target.grad;
    };
    const auto& g = n.grad;
    for (double v : g)
        if (!std::isfinite(v))
            fail(ErrorKind::numeric, "non-finite gradient reaching " + std::string(op_name(n.op)));

    switch (n.op) {
    case Op::leaf: break;
    case Op::affine: {
        const Node& W = nodes_[n.a];
        const auto& x = nodes_[n.b].value;
        if (auto* gw = accumulate(n.a)) {
            for (std::size_t i = 0; i < W.rows; ++i) {
                double* row = gw->data() + i * W.cols;
                for (std::size_t j = 0; j < W.cols; ++j) row[j] += g[i] * x[j];
            }
        }
        if (auto* gx = accumulate(n.b)) {
            for (std::size_t i = 0; i < W.rows; ++i) {
                const double* row = W.value.data() + i * W.cols;
                for (std::size_t j = 0; j < W.cols; ++j) (*gx)[j] += row[j] * g[i];
            }
        }
        if (auto* gb = accumulate(n.c))
            for (std::size_t i = 0; i < W.rows; ++i) (*gb)[i] += g[i];
        break;
    }
    case Op::relu: {
        const auto& in = nodes_[n.a].value;
        if (auto* gi = accumulate(n.a))
            for (std::size_t k = 0; k < g.size(); ++k)
                if (in[k] > 0.0) (*gi)[k] += g[k];
        break;
    }
    case Op::softmax: {
        const auto& p = n.value;
        double inner = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) inner += g[k] * p[k];
        if (auto* gi = accumulate(n.a))
            for (std::size_t k = 0; k < p.size(); ++k) (*gi)[k] += p[k] * (g[k] - inner);
        break;
    }
    case Op::log_softmax: {
        double gsum = 0.0;
        for (double v : g) gsum += v;
        if (auto* gi = accumulate(n.a))
            for (std::size_t k = 0; k < g.size(); ++k) (*gi)[k] += g[k] - std::exp(n.value[k]) * gsum;
        break;
    }
    case Op::log: {
        const auto& in = nodes_[n.a].value;
        if (auto* gi = accumulate(n.a))
            for (std::size_t k = 0; k < g.size(); ++k) (*gi)[k] += g[k] / in[k];
        break;
    }
    case Op::dot: {
        const auto& av = nodes_[n.a].value;
        const auto& bv = nodes_[n.b].value;
        if (auto* ga = accumulate(n.a))
            for (std::size_t k = 0; k < av.size(); ++k) (*ga)[k] += g[0] * bv[k];
        if (auto* gb = accumulate(n.b))
            for (std::size_t k = 0; k < bv.size(); ++k) (*gb)[k] += g[0] * av[k];
        break;
    }
    case Op::select:
        if (auto* gi = accumulate(n.a)) (*gi)[n.aux] += g[0];
        break;
    case Op::weighted_sum:
        for (std::size_t k = 0; k < n.a; ++k)
            if (auto* gt = accumulate(sum_terms_[n.aux + k].id)) (*gt)[0] += sum_weights_[n.aux + k] * g[0];
        break;
    case Op::add:
        if (auto* ga = accumulate(n.a))
            for (std::size_t k = 0; k < g.size(); ++k) (*ga)[k] += g[k];
        if (auto* gb = accumulate(n.b))
            for (std::size_t k = 0; k < g.size(); ++k) (*gb)[k] += g[k];
        break;
    case Op::scale:
        if (auto* gi = accumulate(n.a))
            for (std::size_t k = 0; k < g.size(); ++k) (*gi)[k] += n.factor * g[k];
        break;
    }
}

} // namespace curirl
