#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "curirl/domain.hpp"
#include "curirl/network.hpp"

namespace curirl {

/// Square room [0, size]^2 with a hidden goal and a noisy stimulus hovering near it.
struct EnvironmentConfig {
    double size = 400.0;
    Position2 goal{200.0, 200.0};
    double goal_radius = 1.0;
    double stimulus_noise_radius = 5.0;
    double step_dt = 0.1; // seconds per step
    std::uint64_t seed = 0;
};

void validate(const EnvironmentConfig& env);

enum class RolloutMode { greedy, sample };

std::string_view to_string(RolloutMode mode) noexcept;
std::optional<RolloutMode> parse_rollout_mode(std::string_view text) noexcept;

struct RolloutConfig {
    Position2 start;
    std::size_t length = 20;
    RolloutMode mode = RolloutMode::greedy;
    std::uint64_t seed = 0;
};

/// clamp(state + step_scale * directions[action], [0, size]^2)
Position2 step(const EnvironmentConfig& env, Position2 state, std::size_t action_index, const ActionSet& set);

/// Goal plus an offset drawn uniformly from the disc of radius stimulus_noise_radius
/// (rejection sampling); a pure function of (env.seed, t).
Position2 stimulus(const EnvironmentConfig& env, std::uint64_t t);

struct RolloutResult {
    std::vector<Position2> path; // start state followed by one state per step taken
    std::vector<std::size_t> actions;
    bool reached = false;

    std::size_t steps_taken() const noexcept { return actions.size(); }
    Position2 final_state() const { return path.back(); }
    /// Chain-consistent trajectory whose actions are the realized (post-clamp) deltas.
    /// Requires at least one step.
    Trajectory trajectory() const;
};

RolloutResult rollout(const EnvironmentConfig& env, const PolicyModel& model, const ActionSet& set,
                      const RolloutConfig& cfg);

/// Index drawn from `probs` by inverse CDF with one uniform [0,1) draw.
std::size_t sample_index(std::span<const double> probs, double u);

inline constexpr std::size_t default_length_budget = 20;

/// 0.5 * max(0, 1 - d_final / d_max) + 0.5 * max(0, 1 - t_used / t_max), where
/// d_max = size * sqrt(2), t_used = steps * dt, t_max = max(steps, budget) * dt.
double score_terms(const EnvironmentConfig& env, Position2 final_state, std::size_t steps,
                   std::size_t length_budget = default_length_budget);
double score(const Trajectory& traj, const EnvironmentConfig& env,
             std::size_t length_budget = default_length_budget);
double score(const RolloutResult& result, const EnvironmentConfig& env,
             std::size_t length_budget = default_length_budget);

enum class DemoBehavior { noisy_goal_seek, random_walk };

std::string_view to_string(DemoBehavior behavior) noexcept;
std::optional<DemoBehavior> parse_demo_behavior(std::string_view text) noexcept;

struct SynthOptions {
    double random_action_probability = 0.2;
    std::size_t action_count = default_action_count;
    double step_scale = default_step_scale;
};

/// Synthetic demonstrators starting uniformly in the room. Goal seekers take the
/// discrete action that brings them closest to stimulus(env, t), replaced by a
/// uniformly random action with the configured probability, and stop on reaching
/// the goal. Random walkers follow the random-walk action law clamped to the room.
/// Trial indices run 1..n; scores come from score().
DemoSet synth_demos(const EnvironmentConfig& env, std::size_t n, std::size_t traj_len, DemoBehavior behavior,
                    std::uint64_t seed, const SynthOptions& options = {});

/// Episode i of an evaluation starts uniformly inside the disc of radius
/// `start_radius` around the goal (clamped to the room).
Position2 episode_start(const EnvironmentConfig& env, double start_radius, std::uint64_t seed, std::size_t episode);
std::uint64_t episode_seed(std::uint64_t seed, std::size_t episode) noexcept;

struct EvaluationConfig {
    std::size_t episodes = 100;
    std::size_t length = 20;
    RolloutMode mode = RolloutMode::greedy;
    double start_radius = 3.0;
    std::uint64_t seed = 0;
};

struct EvaluationSummary {
    std::vector<RolloutResult> rollouts;
    double reach_rate = 0.0;
    double mean_steps_to_goal = 0.0; // over successful episodes; 0 when none succeed
    double mean_score = 0.0;
};

EvaluationSummary evaluate_policy(const EnvironmentConfig& env, const PolicyModel& model, const ActionSet& set,
                                  const EvaluationConfig& cfg);

/// Writes ep_<i>.csv files (pos_x,pos_z,time) for each rollout into `directory`.
void export_rollouts(const std::filesystem::path& directory, std::span<const RolloutResult> rollouts,
                     double step_dt);

} // namespace curirl
