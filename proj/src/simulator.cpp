#include "curirl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "curirl/error.hpp"
#include "curirl/ingestion.hpp"
#include "curirl/rng.hpp"

namespace curirl {

void validate(const EnvironmentConfig& env) {
    require(env.size > 0.0 && std::isfinite(env.size), ErrorKind::invalid_argument, "size must be positive");
    require(env.goal.finite() && env.goal.x >= 0.0 && env.goal.z >= 0.0 && env.goal.x <= env.size &&
                env.goal.z <= env.size,
            ErrorKind::invalid_argument, "goal must lie inside the room");
    require(env.goal_radius > 0.0, ErrorKind::invalid_argument, "goal_radius must be positive");
    require(env.stimulus_noise_radius >= 0.0, ErrorKind::invalid_argument, "stimulus_noise_radius must be >= 0");
    require(env.step_dt > 0.0, ErrorKind::invalid_argument, "step_dt must be positive");
}

std::string_view to_string(RolloutMode mode) noexcept { return mode == RolloutMode::greedy ? "greedy" : "sample"; }

std::optional<RolloutMode> parse_rollout_mode(std::string_view text) noexcept {
    if (text == "greedy") return RolloutMode::greedy;
    if (text == "sample") return RolloutMode::sample;
    return std::nullopt;
}

std::string_view to_string(DemoBehavior behavior) noexcept {
    return behavior == DemoBehavior::noisy_goal_seek ? "noisy_goal_seek" : "random_walk";
}

std::optional<DemoBehavior> parse_demo_behavior(std::string_view text) noexcept {
    if (text == "noisy_goal_seek") return DemoBehavior::noisy_goal_seek;
    if (text == "random_walk") return DemoBehavior::random_walk;
    return std::nullopt;
}

namespace {

Position2 clamp_to_room(Position2 p, double size) {
    return {std::clamp(p.x, 0.0, size), std::clamp(p.z, 0.0, size)};
}

bool in_room(Position2 p, double size) { return p.x >= 0.0 && p.z >= 0.0 && p.x <= size && p.z <= size; }

} // namespace

Position2 step(const EnvironmentConfig& env, Position2 state, std::size_t action_index, const ActionSet& set) {
    require(action_index < set.size(), ErrorKind::invalid_argument,
            "action index " + std::to_string(action_index) + " out of range");
    return clamp_to_room(state + set.displacement(action_index), env.size);
}

Position2 stimulus(const EnvironmentConfig& env, std::uint64_t t) {
    const double r = env.stimulus_noise_radius;
    if (r == 0.0) return env.goal;
    Rng rng(mix_seed(env.seed, t));
    while (true) {
        const double u = rng.uniform(-1.0, 1.0);
        const double v = rng.uniform(-1.0, 1.0);
        if (u * u + v * v <= 1.0) return {env.goal.x + r * u, env.goal.z + r * v};
    }
}

Trajectory RolloutResult::trajectory() const {
    require(!actions.empty(), ErrorKind::empty_input, "rollout took no steps");
    Trajectory traj;
    traj.participant_id = "rollout";
    traj.steps.reserve(actions.size());
    for (std::size_t t = 0; t < actions.size(); ++t) traj.steps.push_back({path[t], path[t + 1] - path[t], {}});
    return traj;
}

std::size_t sample_index(std::span<const double> probs, double u) {
    double cumulative = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cumulative += probs[k];
        if (u < cumulative) return k;
    }
    return probs.size() - 1;
}

RolloutResult rollout(const EnvironmentConfig& env, const PolicyModel& model, const ActionSet& set,
                      const RolloutConfig& cfg) {
    validate(env);
    require(model.action_count() == set.size(), ErrorKind::contract,
            "model has " + std::to_string(model.action_count()) + " outputs but the action set has " +
                std::to_string(set.size()));
    require(cfg.length >= 1, ErrorKind::invalid_argument, "rollout length must be >= 1");
    require(cfg.start.finite() && in_room(cfg.start, env.size), ErrorKind::invalid_argument,
            "start must lie inside the room");

    RolloutResult out;
    out.path.push_back(cfg.start);
    Rng rng(cfg.seed);
    Position2 state = cfg.start;
    if (distance(state, env.goal) <= env.goal_radius) {
        out.reached = true;
        return out;
    }
    for (std::size_t t = 0; t < cfg.length; ++t) {
        const auto prefs = forward(model, state);
        std::size_t action = 0;
        if (cfg.mode == RolloutMode::greedy) {
            action = static_cast<std::size_t>(std::max_element(prefs.begin(), prefs.end()) - prefs.begin());
        } else {
            action = sample_index(softmax(prefs), rng.uniform01());
        }
        state = step(env, state, action, set);
        out.path.push_back(state);
        out.actions.push_back(action);
        if (distance(state, env.goal) <= env.goal_radius) {
            out.reached = true;
            break;
        }
    }
    return out;
}

double score_terms(const EnvironmentConfig& env, Position2 final_state, std::size_t steps,
                   std::size_t length_budget) {
    const double d_max = env.size * std::sqrt(2.0);
    const double d_final = distance(final_state, env.goal);
    const double t_used = static_cast<double>(steps) * env.step_dt;
    const double t_max = static_cast<double>(std::max(steps, length_budget)) * env.step_dt;
    const double proximity = std::max(0.0, 1.0 - d_final / d_max);
    const double speed = t_max > 0.0 ? std::max(0.0, 1.0 - t_used / t_max) : 1.0;
    return 0.5 * proximity + 0.5 * speed;
}

double score(const Trajectory& traj, const EnvironmentConfig& env, std::size_t length_budget) {
    return score_terms(env, traj.end_state(), traj.length(), length_budget);
}

double score(const RolloutResult& result, const EnvironmentConfig& env, std::size_t length_budget) {
    return score_terms(env, result.final_state(), result.steps_taken(), length_budget);
}

DemoSet synth_demos(const EnvironmentConfig& env, std::size_t n, std::size_t traj_len, DemoBehavior behavior,
                    std::uint64_t seed, const SynthOptions& options) {
    validate(env);
    require(n >= 1, ErrorKind::invalid_argument, "n must be >= 1");
    require(traj_len >= 1, ErrorKind::invalid_argument, "traj_len must be >= 1");
    require(options.random_action_probability >= 0.0 && options.random_action_probability <= 1.0,
            ErrorKind::invalid_argument, "random_action_probability must be in [0,1]");
    const ActionSet set = make_action_set(options.action_count, options.step_scale);

    DemoSet demos;
    demos.environment_size = env.size;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, i));
        Position2 state{rng.uniform(0.0, env.size), rng.uniform(0.0, env.size)};
        Trajectory traj;
        traj.participant_id = "synthetic";
        traj.trial_index = static_cast<int>(i + 1);
        for (std::size_t t = 0; t < traj_len; ++t) {
            Position2 next;
            if (behavior == DemoBehavior::random_walk) {
                const double cx = rng.uniform(-1.0, 1.0);
                const double cz = rng.uniform(-1.0, 1.0);
                next = clamp_to_room(state + Displacement2{cx * 0.1, cz * 0.1}, env.size);
            } else {
                const Position2 target = stimulus(env, t);
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < set.size(); ++k) {
                    const double d = distance(step(env, state, k, set), target);
                    if (d < best_d) {
                        best_d = d;
                        best = k;
                    }
                }
                if (rng.uniform01() < options.random_action_probability) best = rng.index(set.size());
                next = step(env, state, best, set);
            }
            traj.steps.push_back({state, next - state, static_cast<double>(t) * env.step_dt});
            state = next;
            if (behavior == DemoBehavior::noisy_goal_seek && distance(state, env.goal) <= env.goal_radius) break;
        }
        traj.score = score(traj, env, traj_len);
        demos.trajectories.push_back(std::move(traj));
    }
    return demos;
}

void export_rollouts(const std::filesystem::path& directory, std::span<const RolloutResult> rollouts,
                     double step_dt) {
    std::filesystem::create_directories(directory);
    for (std::size_t i = 0; i < rollouts.size(); ++i) {
        const auto path = directory / ("ep_" + std::to_string(i + 1) + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorKind::io, "cannot write " + path.string());
        std::vector<double> times;
        for (std::size_t t = 0; t < rollouts[i].path.size(); ++t) times.push_back(static_cast<double>(t) * step_dt);
        write_positions_csv(out, rollouts[i].path, times);
    }
}


std::uint64_t episode_seed(std::uint64_t seed, std::size_t episode) noexcept {
    return mix_seed(mix_seed(seed, episode), 1);
}

Position2 episode_start(const EnvironmentConfig& env, double start_radius, std::uint64_t seed, std::size_t episode) {
    require(start_radius >= 0.0, ErrorKind::invalid_argument, "start_radius must be >= 0");
    Rng rng(mix_seed(seed, episode));
    while (true) {
        const double u = rng.uniform(-1.0, 1.0);
        const double v = rng.uniform(-1.0, 1.0);
        if (u * u + v * v <= 1.0)
            return clamp_to_room({env.goal.x + start_radius * u, env.goal.z + start_radius * v}, env.size);
    }
}

EvaluationSummary evaluate_policy(const EnvironmentConfig& env, const PolicyModel& model, const ActionSet& set,
                                  const EvaluationConfig& cfg) {
    require(cfg.episodes >= 1, ErrorKind::invalid_argument, "episodes must be >= 1");
    EvaluationSummary summary;
    summary.rollouts.reserve(cfg.episodes);
    std::size_t reached = 0, steps_to_goal = 0;
    double score_sum = 0.0;
    for (std::size_t i = 0; i < cfg.episodes; ++i) {
        RolloutConfig rc{episode_start(env, cfg.start_radius, cfg.seed, i), cfg.length, cfg.mode,
                         episode_seed(cfg.seed, i)};
        RolloutResult r = rollout(env, model, set, rc);
        if (r.reached) {
            ++reached;
            steps_to_goal += r.steps_taken();
        }
        score_sum += score(r, env, cfg.length);
        summary.rollouts.push_back(std::move(r));
    }
    const double n = static_cast<double>(cfg.episodes);
    summary.reach_rate = static_cast<double>(reached) / n;
    summary.mean_steps_to_goal = reached ? static_cast<double>(steps_to_goal) / static_cast<double>(reached) : 0.0;
    summary.mean_score = score_sum / n;
    return summary;
}

} // namespace curirl
