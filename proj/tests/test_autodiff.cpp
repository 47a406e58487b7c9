#include <doctest.h>

#include <cmath>
#include <functional>

#include "curirl/autodiff.hpp"
#include "curirl/error.hpp"
#include "curirl/rng.hpp"

using namespace curirl;

namespace {

// Central differences over every entry of every input, rebuilding the graph each time.
// The denominator floor keeps near-zero partials from turning difference-quotient
// round-off (about 1e-11 absolute) into a large relative error.
using Builder = std::function<Var(Tape&, const std::vector<Var>&)>;

double max_fd_error(const std::vector<Tensor>& inputs, const Builder& build) {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.leaf(t, true));
    tape.backward(build(tape, vars));
    double worst = 0.0;
    const double eps = 1e-5;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto analytic = tape.grad(vars[i]);
        for (std::size_t j = 0; j < inputs[i].size(); ++j) {
            auto eval = [&](double delta) {
                auto moved = inputs;
                moved[i].data[j] += delta;
                Tape t2;
                std::vector<Var> v2;
                for (const auto& t : moved) v2.push_back(t2.leaf(t, true));
                return t2.scalar(build(t2, v2));
            };
            const double numeric = (eval(eps) - eval(-eps)) / (2 * eps);
            const double a = analytic.empty() ? 0.0 : analytic[j];
            worst = std::max(worst, std::abs(a - numeric) / std::max(1e-2, std::abs(a) + std::abs(numeric)));
        }
    }
    return worst;
}

Tensor random_tensor(Rng& rng, std::size_t r, std::size_t c, double lo = -1, double hi = 1) {
    Tensor t = Tensor::zeros(r, c);
    for (auto& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

} // namespace

TEST_CASE("affine gradient of sum(W h) is h broadcast per row") {
    Tape tape;
    Tensor w = Tensor::zeros(3, 4);
    for (std::size_t i = 0; i < w.size(); ++i) w.data[i] = 0.1 * static_cast<double>(i);
    const std::vector<double> h = {1.5, -2.0, 0.25, 4.0};
    const Var W = tape.leaf(w, true);
    const Var x = tape.constant(h);
    const Var b = tape.constant({0, 0, 0});
    const Var y = tape.affine(W, x, b);
    const Var loss = tape.weighted_sum(std::vector<Var>{tape.select(y, 0), tape.select(y, 1), tape.select(y, 2)},
                                       std::vector<double>{1, 1, 1});
    tape.backward(loss);
    const auto& g = tape.grad(W);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) CHECK(g[r * 4 + c] == h[c]);
    CHECK(tape.grad(x).empty()); // constants carry no gradient
}

TEST_CASE("constant loss gives zero gradients") {
    Tape tape;
    const Var w = tape.leaf(Tensor::zeros(2, 2), true);
    const Var c = tape.constant({3.0});
    tape.backward(tape.scale(c, 2.0));
    CHECK(tape.grad(w).empty());
}

TEST_CASE("every primitive matches finite differences") {
    Rng rng(1234);
    for (int round = 0; round < 20; ++round) {
        const std::vector<Tensor> in = {random_tensor(rng, 5, 3), random_tensor(rng, 3, 1), random_tensor(rng, 5, 1),
                                        random_tensor(rng, 5, 1, 0.1, 2.0)};
        // affine -> relu -> softmax / log_softmax / log -> dot, select, weighted_sum, add, scale
        const Builder build = [](Tape& t, const std::vector<Var>& v) {
            const Var y = t.relu(t.affine(v[0], v[1], v[2]));
            const Var z = t.add(y, v[2]);
            const Var p = t.softmax(z);
            const Var lp = t.log_softmax(z);
            const Var ent = t.scale(t.dot(p, lp), -1.0);
            const Var logs = t.dot(t.log(v[3]), p);
            const Var pick = t.select(lp, 2);
            return t.weighted_sum(std::vector<Var>{ent, logs, pick}, std::vector<double>{0.7, 1.3, -0.4});
        };
        CHECK(max_fd_error(in, build) <= 1e-6);
    }
}

TEST_CASE("relu subgradient at zero is zero") {
    Tape tape;
    const Var v = tape.leaf(Tensor{3, 1, {-1.0, 0.0, 2.0}}, true);
    const Var r = tape.relu(v);
    tape.backward(tape.dot(r, tape.constant({1, 1, 1})));
    CHECK(tape.grad(v) == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("contract and numeric errors") {
    Tape tape;
    const Var v = tape.leaf(Tensor{2, 1, {1.0, -1.0}}, true);
    CHECK_THROWS_AS(tape.backward(v), Error); // not a scalar
    try {
        tape.log(v);
        FAIL("expected numeric error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::numeric);
        CHECK(std::string(e.what()).find("log") != std::string::npos);
    }
    const Var w = tape.leaf(Tensor::zeros(3, 3), true);
    CHECK_THROWS_AS(tape.affine(w, v, v), Error);
    CHECK_THROWS_AS(tape.dot(v, tape.constant({1, 2, 3})), Error);
}

TEST_CASE("softmax and log_softmax stay finite for extreme inputs") {
    Tape tape;
    const Var y = tape.leaf(Tensor{4, 1, {700.0, -700.0, 0.0, 699.0}}, true);
    const Var p = tape.softmax(y);
    const Var lp = tape.log_softmax(y);
    double sum = 0;
    for (double v : tape.value(p)) {
        CHECK(std::isfinite(v));
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (double v : tape.value(lp)) CHECK(std::isfinite(v));
    tape.backward(tape.scale(tape.dot(p, lp), -1.0));
    for (double g : tape.grad(y)) CHECK(std::isfinite(g));
}
