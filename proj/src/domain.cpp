#include "curirl/domain.hpp"

#include <numbers>

#include "curirl/error.hpp"

namespace curirl {

ActionSet::ActionSet(std::vector<Displacement2> directions, double step_scale)
    : directions_(std::move(directions)), step_scale_(step_scale) {
    require(directions_.size() >= 2, ErrorKind::invalid_argument, "action set needs at least 2 directions");
    require(step_scale_ > 0.0 && std::isfinite(step_scale_), ErrorKind::invalid_argument,
            "step_scale must be positive");
    for (std::size_t i = 0; i < directions_.size(); ++i) {
        require(std::abs(directions_[i].norm() - 1.0) <= 1e-12, ErrorKind::invalid_argument,
                "direction " + std::to_string(i) + " is not unit length");
        for (std::size_t j = 0; j < i; ++j)
            require(directions_[i] != directions_[j], ErrorKind::invalid_argument,
                    "duplicate direction " + std::to_string(i));
    }
}

Displacement2 ActionSet::displacement(std::size_t k) const {
    require(k < directions_.size(), ErrorKind::invalid_argument,
            "action index " + std::to_string(k) + " out of range");
    return directions_[k] * step_scale_;
}

ActionSet make_action_set(std::size_t k, double step_scale) {
    require(k >= 2, ErrorKind::invalid_argument, "k must be >= 2");
    require(step_scale > 0.0, ErrorKind::invalid_argument, "step_scale must be positive");
    std::vector<Displacement2> dirs;
    dirs.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        // Quarter turns are placed exactly so K=4 yields the exact cardinal set.
        if ((4 * j) % k == 0) {
            static constexpr Displacement2 cardinal[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            dirs.push_back(cardinal[(4 * j) / k]);
            continue;
        }
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(k);
        dirs.push_back({std::cos(angle), std::sin(angle)});
    }
    return ActionSet(std::move(dirs), step_scale);
}

std::size_t nearest_action_index(Displacement2 displacement, const ActionSet& set) {
    require(displacement.finite(), ErrorKind::degenerate_input, "displacement is not finite");
    const double len = displacement.norm();
    require(len > 0.0, ErrorKind::degenerate_input, "displacement is zero");
    std::size_t best = 0;
    double best_cos = -2.0;
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto& d = set.directions()[k];
        const double cosine = (displacement.x * d.x + displacement.z * d.z) / len;
        if (cosine > best_cos) {
            best_cos = cosine;
            best = k;
        }
    }
    return best;
}

Position2 Trajectory::end_state() const {
    require(!steps.empty(), ErrorKind::empty_input, "trajectory has no steps");
    return steps.back().state + steps.back().action;
}

bool Trajectory::chain_consistent(double tol) const noexcept {
    for (std::size_t t = 0; t + 1 < steps.size(); ++t) {
        const Position2 next = steps[t].state + steps[t].action;
        if (std::abs(next.x - steps[t + 1].state.x) > tol || std::abs(next.z - steps[t + 1].state.z) > tol)
            return false;
    }
    return true;
}

void validate(const Trajectory& traj) {
    require(!traj.steps.empty(), ErrorKind::empty_input,
            "trajectory '" + traj.participant_id + "' has no steps");
    require(traj.trial_index >= 1, ErrorKind::invalid_argument, "trial_index must be >= 1");
    for (std::size_t t = 0; t < traj.steps.size(); ++t)
        require(traj.steps[t].state.finite() && traj.steps[t].action.finite(), ErrorKind::degenerate_input,
                "non-finite value at step " + std::to_string(t));
}

std::size_t DemoSet::total_states() const noexcept {
    std::size_t n = 0;
    for (const auto& t : trajectories) n += t.steps.size();
    return n;
}

std::size_t DemoSet::out_of_range_states() const noexcept {
    std::size_t n = 0;
    for (const auto& t : trajectories)
        for (const auto& s : t.steps)
            if (s.state.x < 0 || s.state.z < 0 || s.state.x > environment_size || s.state.z > environment_size)
                ++n;
    return n;
}

void validate(const DemoSet& demos) {
    require(!demos.trajectories.empty(), ErrorKind::empty_input, "demo set has no trajectories");
    require(demos.environment_size > 0.0 && std::isfinite(demos.environment_size),
            ErrorKind::invalid_argument, "environment_size must be positive");
    for (const auto& t : demos.trajectories) validate(t);
}

void validate(const MdpSpec& mdp) {
    require(mdp.gamma >= 0.0 && mdp.gamma <= 1.0, ErrorKind::invalid_argument, "gamma must be in [0,1]");
    require(mdp.environment_size > 0.0, ErrorKind::invalid_argument, "environment_size must be positive");
}

} // namespace curirl
