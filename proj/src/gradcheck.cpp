#include "curirl/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curirl/error.hpp"
#include "curirl/rng.hpp"

namespace curirl {

double gradient_relative_error(double analytic, double numeric) noexcept {
    return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

namespace {

double evaluate(const PolicyModel& model, const RecordedLoss& loss) {
    Tape tape;
    const ModelVars vars = bind_model(tape, model);
    const double value = tape.scalar(loss(tape, vars));
    require(std::isfinite(value), ErrorKind::numeric, "loss is not finite at a perturbed point");
    return value;
}

} // namespace

GradientCheckResult gradient_check(const PolicyModel& model, const RecordedLoss& loss, double eps,
                                   std::size_t samples, std::uint64_t seed) {
    require(eps >= 1e-7 && eps <= 1e-3, ErrorKind::invalid_argument, "eps must lie in [1e-7, 1e-3]");
    require(samples >= 1, ErrorKind::invalid_argument, "samples must be >= 1");

    Tape tape;
    const ModelVars vars = bind_model(tape, model);
    const Gradients grads = backward(tape, vars, loss(tape, vars));

    const std::size_t total = model.params.total_size();
    const std::size_t n = std::min(samples, total);
    // Partial Fisher-Yates: first n entries become a uniform sample without replacement.
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) std::swap(order[i], order[i + rng.index(total - i)]);

    GradientCheckResult result;
    result.samples = n;
    PolicyModel probe = model;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = order[i];
        const double original = probe.params.at(idx);
        probe.params.at(idx) = original + eps;
        const double up = evaluate(probe, loss);
        probe.params.at(idx) = original - eps;
        const double down = evaluate(probe, loss);
        probe.params.at(idx) = original;

        const double numeric = (up - down) / (2.0 * eps);
        const double analytic = grads.blocks.at(idx);
        const double err = gradient_relative_error(analytic, numeric);
        if (err > result.max_relative_error || result.worst_parameter.empty()) {
            result.max_relative_error = err;
            result.worst_parameter = model.params.describe(idx);
            result.worst_analytic = analytic;
            result.worst_numeric = numeric;
        }
    }
    return result;
}

} // namespace curirl
