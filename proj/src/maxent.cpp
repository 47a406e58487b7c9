#include "curirl/maxent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include "curirl/adam.hpp"
#include "curirl/error.hpp"
#include "curirl/text_io.hpp"

namespace curirl {

Position2 state_mean(const DemoSet& demos) {
    validate(demos);
    const std::size_t T = demos.trajectories.front().length();
    double sx = 0.0, sz = 0.0;
    for (const auto& traj : demos.trajectories) {
        require(traj.length() == T, ErrorKind::length_mismatch,
                "trajectories have different lengths (" + std::to_string(traj.length()) + " vs " +
                    std::to_string(T) + ")");
        for (const auto& step : traj.steps) {
            sx += step.state.x;
            sz += step.state.z;
        }
    }
    const double n = static_cast<double>(demos.size() * T);
    return {sx / n, sz / n};
}

std::size_t VisitationGrid::bin_of(Position2 s) const noexcept {
    const double upper = std::nextafter(environment_size, 0.0);
    const double cell = cell_size();
    auto axis = [&](double v) {
        const double c = std::clamp(v, 0.0, upper);
        const auto i = static_cast<std::size_t>(std::floor(c / cell));
        return std::min(i, bins_per_side - 1);
    };
    return axis(s.x) * bins_per_side + axis(s.z);
}

Position2 VisitationGrid::center(std::size_t bin) const noexcept {
    const double cell = cell_size();
    const auto ix = bin / bins_per_side, iz = bin % bins_per_side;
    return {(static_cast<double>(ix) + 0.5) * cell, (static_cast<double>(iz) + 0.5) * cell};
}

double VisitationGrid::frequency_sum() const noexcept {
    double s = 0.0;
    for (double f : frequencies) s += f;
    return s;
}

VisitationGrid visitation_grid(std::span<const Trajectory> trajectories, double environment_size,
                               std::size_t bins) {
    require(bins >= 1, ErrorKind::invalid_argument, "bins must be >= 1");
    require(environment_size > 0.0, ErrorKind::invalid_argument, "environment_size must be positive");
    require(!trajectories.empty(), ErrorKind::empty_input, "no trajectories");
    VisitationGrid grid;
    grid.bins_per_side = bins;
    grid.environment_size = environment_size;
    grid.counts.assign(bins * bins, 0);
    for (const auto& traj : trajectories)
        for (const auto& step : traj.steps) {
            ++grid.counts[grid.bin_of(step.state)];
            ++grid.total;
        }
    require(grid.total > 0, ErrorKind::empty_input, "no states to count");
    grid.frequencies.resize(grid.counts.size());
    const double total = static_cast<double>(grid.total);
    for (std::size_t b = 0; b < grid.counts.size(); ++b)
        grid.frequencies[b] = static_cast<double>(grid.counts[b]) / total;
    return grid;
}

VisitationGrid visitation_grid(const DemoSet& demos, std::size_t bins) {
    return visitation_grid(demos.trajectories, demos.environment_size, bins);
}

double entropy(std::span<const double> probs) {
    require(!probs.empty(), ErrorKind::contract, "empty distribution");
    double sum = 0.0;
    for (double p : probs) {
        require(std::isfinite(p) && p >= 0.0, ErrorKind::contract, "probabilities must be finite and >= 0");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::contract, "probabilities do not sum to 1");
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

namespace {

std::size_t count_states(std::span<const Trajectory> trajectories) {
    std::size_t m = 0;
    for (const auto& t : trajectories) m += t.steps.size();
    return m;
}

template <class Fn>
double evaluate(const PolicyModel& model, Fn&& record) {
    Tape tape;
    const ModelVars vars = bind_model(tape, model);
    return tape.scalar(record(tape, vars));
}

} // namespace

Var record_mel(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories) {
    const std::size_t m = count_states(trajectories);
    require(m > 0, ErrorKind::empty_input, "no demonstrated states");
    std::vector<Var> terms;
    terms.reserve(m);
    for (const auto& traj : trajectories)
        for (const auto& step : traj.steps)
            terms.push_back(record_policy_entropy(tape, record_forward(tape, vars, step.state)));
    const std::vector<double> weights(m, 1.0 / static_cast<double>(m));
    return tape.weighted_sum(terms, weights);
}

Var record_al(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories,
              const VisitationGrid& grid) {
    require(grid.counts.size() == grid.bins_per_side * grid.bins_per_side &&
                grid.frequencies.size() == grid.counts.size(),
            ErrorKind::consistency, "malformed visitation grid");
    std::vector<std::uint64_t> recount(grid.counts.size(), 0);
    std::uint64_t total = 0;
    for (const auto& traj : trajectories)
        for (const auto& step : traj.steps) {
            ++recount[grid.bin_of(step.state)];
            ++total;
        }
    require(total > 0, ErrorKind::empty_input, "no demonstrated states");
    require(recount == grid.counts && total == grid.total, ErrorKind::consistency,
            "visitation grid was not built from these trajectories");
    double fsum = 0.0;
    for (std::size_t b = 0; b < grid.counts.size(); ++b)
        if (grid.counts[b] > 0) fsum += grid.frequencies[b];
    require(std::abs(fsum - 1.0) <= 1e-9, ErrorKind::consistency, "visited-cell frequencies do not sum to 1");

    std::vector<Var> terms;
    std::vector<double> weights;
    for (std::size_t b = 0; b < grid.counts.size(); ++b) {
        if (grid.counts[b] == 0) continue;
        terms.push_back(record_policy_entropy(tape, record_forward(tape, vars, grid.center(b))));
        weights.push_back(grid.frequencies[b]);
    }
    return tape.weighted_sum(terms, weights);
}

Var record_demo_nll(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories,
                    const ActionSet& set) {
    require(set.size() == vars.action_count, ErrorKind::contract, "action set size does not match the model");
    const std::size_t m = count_states(trajectories);
    require(m > 0, ErrorKind::empty_input, "no demonstrated steps");
    std::vector<Var> terms;
    terms.reserve(m);
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& traj = trajectories[i];
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            const auto& step = traj.steps[t];
            if (!(step.action.norm() > 0.0))
                fail(ErrorKind::degenerate_input,
                     "zero action in trajectory " + std::to_string(i) + " at step " + std::to_string(t));
            const std::size_t k = nearest_action_index(step.action, set);
            const Var log_p = tape.log_softmax(record_forward(tape, vars, step.state));
            terms.push_back(tape.select(log_p, k));
        }
    }
    const std::vector<double> weights(m, -1.0 / static_cast<double>(m));
    return tape.weighted_sum(terms, weights);
}

double mel(const PolicyModel& model, std::span<const Trajectory> trajectories) {
    return evaluate(model, [&](Tape& t, const ModelVars& v) { return record_mel(t, v, trajectories); });
}

double al(const PolicyModel& model, std::span<const Trajectory> trajectories, const VisitationGrid& grid) {
    return evaluate(model, [&](Tape& t, const ModelVars& v) { return record_al(t, v, trajectories, grid); });
}

double demo_nll(const PolicyModel& model, std::span<const Trajectory> trajectories, const ActionSet& set) {
    return evaluate(model, [&](Tape& t, const ModelVars& v) { return record_demo_nll(t, v, trajectories, set); });
}

LossBreakdown meo(double mel_value, double al_value) {
    require(std::isfinite(mel_value) && std::isfinite(al_value), ErrorKind::numeric, "loss terms must be finite");
    return LossBreakdown{mel_value, al_value, mel_value + al_value, std::nullopt};
}

ObjectiveNodes record_objective(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories,
                                const VisitationGrid& grid, double demo_nll_weight, const ActionSet* action_set) {
    require(demo_nll_weight >= 0.0 && std::isfinite(demo_nll_weight), ErrorKind::invalid_argument,
            "demo_nll_weight must be >= 0");
    ObjectiveNodes nodes;
    nodes.mel = record_mel(tape, vars, trajectories);
    nodes.al = record_al(tape, vars, trajectories, grid);
    nodes.meo = tape.add(nodes.mel, nodes.al);
    nodes.total = nodes.meo;
    if (demo_nll_weight > 0.0) {
        require(action_set != nullptr, ErrorKind::contract, "demo_nll needs an action set");
        nodes.demo_nll = record_demo_nll(tape, vars, trajectories, *action_set);
        nodes.total = tape.add(nodes.meo, tape.scale(*nodes.demo_nll, demo_nll_weight));
    }
    return nodes;
}

void validate(const TrainingConfig& c) {
    require(c.epochs >= 1, ErrorKind::invalid_argument, "epochs must be >= 1");
    require(c.lr > 0.0 && std::isfinite(c.lr), ErrorKind::invalid_argument, "lr must be positive");
    require(c.action_count >= 2, ErrorKind::invalid_argument, "action_count must be >= 2");
    require(c.grid_bins >= 1, ErrorKind::invalid_argument, "grid_bins must be >= 1");
    require(c.hidden_units >= 1, ErrorKind::invalid_argument, "hidden_units must be >= 1");
    require(c.demo_nll_weight >= 0.0 && std::isfinite(c.demo_nll_weight), ErrorKind::invalid_argument,
            "demo_nll_weight must be >= 0");
    require(c.step_scale > 0.0, ErrorKind::invalid_argument, "step_scale must be positive");
}

TrainingAborted::TrainingAborted(std::size_t epoch, std::vector<LossBreakdown> prefix, const std::string& cause)
    : Error(ErrorKind::numeric, "training aborted at epoch " + std::to_string(epoch) + ": " + cause),
      epoch_(epoch), curve_(std::move(prefix)) {}

TrainResult train(const DemoSet& demos, const TrainingConfig& config, const EpochCallback& on_epoch) {
    validate(config);
    validate(demos);
    const auto started = std::chrono::steady_clock::now();

    const std::vector<Trajectory> ordered = order_demonstrations(demos, config.curriculum);
    const ActionSet actions = make_action_set(config.action_count, config.step_scale);

    TrainResult result;
    result.model = init_model(2, config.hidden_units, config.action_count, config.seed, config.init,
                              InputNormalization::for_room(demos.environment_size));
    AdamState adam = AdamState::for_model(result.model);
    result.curve.reserve(config.epochs);

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        try {
            const VisitationGrid grid = visitation_grid(ordered, demos.environment_size, config.grid_bins);
            Tape tape;
            const ModelVars vars = bind_model(tape, result.model);
            const ObjectiveNodes obj =
                record_objective(tape, vars, ordered, grid, config.demo_nll_weight, &actions);

            LossBreakdown row = meo(tape.scalar(obj.mel), tape.scalar(obj.al));
            if (obj.demo_nll) row.demo_nll = tape.scalar(*obj.demo_nll);
            require(std::isfinite(tape.scalar(obj.total)), ErrorKind::numeric, "objective is not finite");
            result.curve.push_back(row);
            if (on_epoch) on_epoch(epoch, row);

            const Gradients grads = backward(tape, vars, obj.total);
            adam_step(adam, result.model, grads, config.lr);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numeric) throw;
            throw TrainingAborted(epoch, result.curve, e.what());
        }
    }
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

void write_loss_csv(std::ostream& out, std::span<const LossBreakdown> curve) {
    const bool with_nll = !curve.empty() && curve.front().demo_nll.has_value();
    out << (with_nll ? "epoch,mel,al,meo,demo_nll\n" : "epoch,mel,al,meo\n");
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto& r = curve[i];
        out << (i + 1) << ',' << format_double(r.mel) << ',' << format_double(r.al) << ',' << format_double(r.meo);
        if (with_nll) out << ',' << format_double(r.demo_nll.value_or(0.0));
        out << '\n';
    }
}

} // namespace curirl
