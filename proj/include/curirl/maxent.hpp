#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "curirl/curriculum.hpp"
#include "curirl/error.hpp"
#include "curirl/domain.hpp"
#include "curirl/network.hpp"

namespace curirl {

/// Literal mean of every demonstrated state vector (all trajectories must share one length).
Position2 state_mean(const DemoSet& demos);

/// Square grid of B x B cells over [0, size]^2 holding state-occurrence counts and
/// their frequencies f = count / (total occurrences). Out-of-room states clamp to edge cells.
struct VisitationGrid {
    std::size_t bins_per_side = 1;
    double environment_size = 400.0;
    std::vector<std::uint64_t> counts; // row-major over (ix, iz): index = ix * B + iz
    std::vector<double> frequencies;
    std::uint64_t total = 0;

    double cell_size() const noexcept { return environment_size / static_cast<double>(bins_per_side); }
    std::size_t bin_of(Position2 s) const noexcept;
    Position2 center(std::size_t bin) const noexcept;
    double frequency_sum() const noexcept;
};

VisitationGrid visitation_grid(std::span<const Trajectory> trajectories, double environment_size,
                               std::size_t bins);
VisitationGrid visitation_grid(const DemoSet& demos, std::size_t bins);

/// Natural-log entropy of a probability vector, with 0 log 0 = 0.
double entropy(std::span<const double> probs);

/// Mean policy entropy over every demonstrated state occurrence.
Var record_mel(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories);
/// sum over visited cells b of f(b) * policy entropy at the cell center.
Var record_al(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories,
              const VisitationGrid& grid);
/// Mean over (s, a) pairs of -log p(nearest_action_index(a) | s).
Var record_demo_nll(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories,
                    const ActionSet& set);

double mel(const PolicyModel& model, std::span<const Trajectory> trajectories);
double al(const PolicyModel& model, std::span<const Trajectory> trajectories, const VisitationGrid& grid);
double demo_nll(const PolicyModel& model, std::span<const Trajectory> trajectories, const ActionSet& set);

struct LossBreakdown {
    double mel = 0.0;
    double al = 0.0;
    double meo = 0.0;
    std::optional<double> demo_nll;

    bool operator==(const LossBreakdown&) const = default;
};

/// meo = mel + al, computed once and stored.
LossBreakdown meo(double mel_value, double al_value);

/// Recorded training objective: MEO plus the optional weighted demo likelihood term.
struct ObjectiveNodes {
    Var mel;
    Var al;
    Var meo;
    std::optional<Var> demo_nll;
    Var total;
};

ObjectiveNodes record_objective(Tape& tape, const ModelVars& vars, std::span<const Trajectory> trajectories,
                                const VisitationGrid& grid, double demo_nll_weight = 0.0,
                                const ActionSet* action_set = nullptr);

struct TrainingConfig {
    std::size_t epochs = 100;
    double lr = 0.001;
    std::size_t action_count = 8;
    std::size_t grid_bins = 20;
    CurriculumKey curriculum = CurriculumKey::trial_index_descending;
    double demo_nll_weight = 0.0;
    std::uint64_t seed = 0;
    std::size_t hidden_units = default_hidden_units;
    InitScheme init = InitScheme::he_uniform;
    double step_scale = default_step_scale;
};

void validate(const TrainingConfig& config);

struct TrainResult {
    PolicyModel model;
    std::vector<LossBreakdown> curve;
    double wall_time = 0.0; // seconds
};

/// Raised when the objective turns non-finite; carries the finite prefix of the curve.
class TrainingAborted : public Error {
public:
    TrainingAborted(std::size_t epoch, std::vector<LossBreakdown> prefix, const std::string& cause);
    std::size_t epoch() const noexcept { return epoch_; }
    const std::vector<LossBreakdown>& curve() const noexcept { return curve_; }

private:
    std::size_t epoch_;
    std::vector<LossBreakdown> curve_;
};

using EpochCallback = std::function<void(std::size_t epoch, const LossBreakdown&)>;

/// Each epoch: rebuild the visitation grid, walk the trajectories in curriculum
/// order to record the objective, back-propagate, and take one Adam step.
/// curve[e] is the objective evaluated before the e-th update.
TrainResult train(const DemoSet& demos, const TrainingConfig& config, const EpochCallback& on_epoch = {});

/// Writes `epoch,mel,al,meo[,demo_nll]` rows with 17 significant digits.
void write_loss_csv(std::ostream& out, std::span<const LossBreakdown> curve);

} // namespace curirl
