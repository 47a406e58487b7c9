#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace curirl {

/// Displacement in the room plane (environment units).
struct Displacement2 {
    double x = 0.0;
    double z = 0.0;

    double norm() const noexcept { return std::hypot(x, z); }
    bool finite() const noexcept { return std::isfinite(x) && std::isfinite(z); }
    Displacement2 operator*(double s) const noexcept { return {x * s, z * s}; }
    bool operator==(const Displacement2&) const = default;
};

/// Point in the room plane. `x` and `z` mirror the logged pos_x / pos_z columns;
/// height is never modelled.
struct Position2 {
    double x = 0.0;
    double z = 0.0;

    bool finite() const noexcept { return std::isfinite(x) && std::isfinite(z); }
    Position2 operator+(Displacement2 d) const noexcept { return {x + d.x, z + d.z}; }
    Displacement2 operator-(Position2 o) const noexcept { return {x - o.x, z - o.z}; }
    bool operator==(const Position2&) const = default;
};

inline double distance(Position2 a, Position2 b) noexcept { return (a - b).norm(); }

/// K equi-angular unit directions; action k moves by step_scale * directions[k].
class ActionSet {
public:
    ActionSet(std::vector<Displacement2> directions, double step_scale);

    std::size_t size() const noexcept { return directions_.size(); }
    double step_scale() const noexcept { return step_scale_; }
    const std::vector<Displacement2>& directions() const noexcept { return directions_; }
    Displacement2 displacement(std::size_t k) const;

private:
    std::vector<Displacement2> directions_;
    double step_scale_;
};

inline constexpr std::size_t default_action_count = 8;
inline constexpr double default_step_scale = 0.1;

/// Directions at angles 2*pi*j/k, counterclockwise from +x.
ActionSet make_action_set(std::size_t k, double step_scale = default_step_scale);

/// Index of the direction with the largest cosine similarity; ties go to the lowest index.
std::size_t nearest_action_index(Displacement2 displacement, const ActionSet& set);

struct TrajectoryStep {
    Position2 state;
    Displacement2 action;
    std::optional<double> time; // seconds from trajectory start
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::string participant_id;
    int trial_index = 1;
    std::optional<double> score;

    std::size_t length() const noexcept { return steps.size(); }
    /// State reached after the last action.
    Position2 end_state() const;
    /// steps[t+1].state == steps[t].state + steps[t].action within tol, for all t.
    bool chain_consistent(double tol = 1e-9) const noexcept;
};

/// Throws unless T >= 1 and every state and action is finite.
void validate(const Trajectory& traj);

struct DemoSet {
    std::vector<Trajectory> trajectories;
    double environment_size = 400.0;

    std::size_t size() const noexcept { return trajectories.size(); }
    std::size_t total_states() const noexcept;
    /// States outside [0, environment_size]^2; permitted but reported.
    std::size_t out_of_range_states() const noexcept;
};

void validate(const DemoSet& demos);

/// Descriptive MDP record: square continuous state space, discrete actions,
/// deterministic additive transitions clamped to the room.
struct MdpSpec {
    double environment_size = 400.0;
    ActionSet action_set = make_action_set(default_action_count);
    double gamma = 0.99;
};

void validate(const MdpSpec& mdp);

} // namespace curirl
