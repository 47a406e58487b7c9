#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "curirl/checkpoint.hpp"
#include "curirl/curriculum.hpp"
#include "curirl/error.hpp"
#include "curirl/gradcheck.hpp"
#include "curirl/ingestion.hpp"
#include "curirl/maxent.hpp"
#include "curirl/simulator.hpp"

namespace py = pybind11;
using namespace curirl;

namespace {

template <class E>
E parse_enum(std::optional<E> parsed, const std::string& what, const std::string& text) {
    if (!parsed) throw py::value_error("unknown " + what + ": " + text);
    return *parsed;
}

std::vector<Position2> states_of(const Trajectory& t) {
    std::vector<Position2> out;
    out.reserve(t.length() + 1);
    for (const auto& s : t.steps) out.push_back(s.state);
    out.push_back(t.end_state());
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Curriculum-ordered maximum-entropy policy learning in a square room.";

    py::register_exception<Error>(m, "CurirlError", PyExc_ValueError);

    py::class_<Position2>(m, "Position")
        .def(py::init<double, double>(), py::arg("x"), py::arg("z"))
        .def_readwrite("x", &Position2::x)
        .def_readwrite("z", &Position2::z)
        .def("__iter__", [](const Position2& p) { return py::iter(py::make_tuple(p.x, p.z)); })
        .def("__eq__", [](const Position2& a, const Position2& b) { return a == b; })
        .def("__repr__", [](const Position2& p) {
            std::ostringstream s;
            s.precision(17);
            s << "Position(" << p.x << ", " << p.z << ")";
            return s.str();
        });

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("participant_id", &Trajectory::participant_id)
        .def_readonly("trial_index", &Trajectory::trial_index)
        .def_readonly("score", &Trajectory::score)
        .def("__len__", &Trajectory::length)
        .def_property_readonly("states", &states_of, "Visited states including the end state")
        .def_property_readonly("actions", [](const Trajectory& t) {
            std::vector<std::pair<double, double>> out;
            for (const auto& s : t.steps) out.emplace_back(s.action.x, s.action.z);
            return out;
        });

    py::class_<DemoSet>(m, "DemoSet")
        .def_readonly("trajectories", &DemoSet::trajectories)
        .def_readonly("environment_size", &DemoSet::environment_size)
        .def("__len__", &DemoSet::size)
        .def("total_states", &DemoSet::total_states);

    py::class_<EnvironmentConfig>(m, "EnvironmentConfig")
        .def(py::init([](double size, std::optional<Position2> goal, double goal_radius, double noise_radius,
                         double step_dt, std::uint64_t seed) {
                 EnvironmentConfig env{size, goal.value_or(Position2{size / 2, size / 2}), goal_radius, noise_radius,
                                       step_dt, seed};
                 validate(env);
                 return env;
             }),
             py::arg("size") = 400.0, py::arg("goal") = py::none(), py::arg("goal_radius") = 1.0,
             py::arg("noise_radius") = 5.0, py::arg("step_dt") = 0.1, py::arg("seed") = 0)
        .def_readonly("size", &EnvironmentConfig::size)
        .def_readonly("goal", &EnvironmentConfig::goal)
        .def_readonly("goal_radius", &EnvironmentConfig::goal_radius);

    py::class_<PolicyModel>(m, "PolicyModel")
        .def_property_readonly("action_count", &PolicyModel::action_count)
        .def_property_readonly("hidden_units", &PolicyModel::hidden_dim)
        .def_property_readonly("parameter_count", [](const PolicyModel& p) { return p.params.total_size(); })
        .def("preferences", [](const PolicyModel& p, double x, double z) { return forward(p, {x, z}); },
             py::arg("x"), py::arg("z"))
        .def("policy", [](const PolicyModel& p, double x, double z) { return softmax(forward(p, {x, z})); },
             py::arg("x"), py::arg("z"))
        .def("__eq__", [](const PolicyModel& a, const PolicyModel& b) { return a == b; });

    m.def("init_model",
          [](std::size_t hidden, std::size_t actions, std::uint64_t seed, const std::string& init, double room) {
              return init_model(2, hidden, actions, seed, parse_enum(parse_init_scheme(init), "init scheme", init),
                                InputNormalization::for_room(room));
          },
          py::arg("hidden") = default_hidden_units, py::arg("actions") = default_action_count, py::arg("seed") = 0,
          py::arg("init") = "he_uniform", py::arg("environment_size") = 400.0);

    py::class_<LossBreakdown>(m, "LossBreakdown")
        .def_readonly("mel", &LossBreakdown::mel)
        .def_readonly("al", &LossBreakdown::al)
        .def_readonly("meo", &LossBreakdown::meo)
        .def_readonly("demo_nll", &LossBreakdown::demo_nll);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("curve", &TrainResult::curve)
        .def_readonly("wall_time", &TrainResult::wall_time);

    py::class_<EvaluationSummary>(m, "EvaluationSummary")
        .def_readonly("reach_rate", &EvaluationSummary::reach_rate)
        .def_readonly("mean_steps_to_goal", &EvaluationSummary::mean_steps_to_goal)
        .def_readonly("mean_score", &EvaluationSummary::mean_score)
        .def_property_readonly("paths", [](const EvaluationSummary& s) {
            std::vector<std::vector<Position2>> out;
            for (const auto& r : s.rollouts) out.push_back(r.path);
            return out;
        });

    m.def("synth_demos",
          [](const EnvironmentConfig& env, std::size_t n, std::size_t traj_len, const std::string& behavior,
             std::uint64_t seed) {
              return synth_demos(env, n, traj_len, parse_enum(parse_demo_behavior(behavior), "behavior", behavior),
                                 seed);
          },
          py::arg("env"), py::arg("n"), py::arg("traj_len") = 20, py::arg("behavior") = "noisy_goal_seek",
          py::arg("seed") = 0);

    m.def("load_demo_set",
          [](const std::filesystem::path& dir, double size, const std::string& x_column, const std::string& z_column,
             std::optional<std::string> score_column) {
              CsvSchema schema{x_column, z_column, std::nullopt, score_column};
              return load_demo_set(dir, schema, size);
          },
          py::arg("directory"), py::arg("environment_size") = 400.0, py::arg("x_column") = "pos_x",
          py::arg("z_column") = "pos_z", py::arg("score_column") = py::none());

    m.def("order_demonstrations",
          [](const DemoSet& d, const std::string& key) {
              return order_demonstrations(d, parse_enum(parse_curriculum_key(key), "curriculum key", key));
          },
          py::arg("demos"), py::arg("key") = "trial_desc");

    m.def("visitation_frequencies",
          [](const DemoSet& d, std::size_t bins) {
              const auto g = visitation_grid(d, bins);
              std::vector<std::vector<double>> rows(bins, std::vector<double>(bins));
              for (std::size_t b = 0; b < g.frequencies.size(); ++b) rows[b / bins][b % bins] = g.frequencies[b];
              return rows;
          },
          py::arg("demos"), py::arg("bins") = 20, "bins x bins frequencies indexed [ix][iz]");

    m.def("softmax", [](const std::vector<double>& y) { return softmax(y); }, py::arg("preferences"));
    m.def("entropy", [](const std::vector<double>& p) { return entropy(p); }, py::arg("probs"));

    m.def("evaluate_loss",
          [](const PolicyModel& model, const DemoSet& d, std::size_t bins) {
              const auto g = visitation_grid(d, bins);
              return meo(mel(model, d.trajectories), al(model, d.trajectories, g));
          },
          py::arg("model"), py::arg("demos"), py::arg("bins") = 20);

    m.def("train",
          [](const DemoSet& d, std::size_t epochs, double lr, std::size_t actions, std::size_t bins,
             std::size_t hidden, const std::string& curriculum, const std::string& init, double demo_nll_weight,
             std::uint64_t seed, std::function<void(std::size_t, const LossBreakdown&)> on_epoch) {
              TrainingConfig cfg;
              cfg.epochs = epochs;
              cfg.lr = lr;
              cfg.action_count = actions;
              cfg.grid_bins = bins;
              cfg.hidden_units = hidden;
              cfg.curriculum = parse_enum(parse_curriculum_key(curriculum), "curriculum key", curriculum);
              cfg.init = parse_enum(parse_init_scheme(init), "init scheme", init);
              cfg.demo_nll_weight = demo_nll_weight;
              cfg.seed = seed;
              py::gil_scoped_release release;
              if (!on_epoch) return train(d, cfg);
              return train(d, cfg, [&](std::size_t e, const LossBreakdown& row) {
                  py::gil_scoped_acquire acquire;
                  on_epoch(e, row);
              });
          },
          py::arg("demos"), py::arg("epochs") = 100, py::arg("lr") = 0.001, py::arg("actions") = 8,
          py::arg("bins") = 20, py::arg("hidden") = default_hidden_units, py::arg("curriculum") = "trial_desc",
          py::arg("init") = "he_uniform", py::arg("demo_nll_weight") = 0.0, py::arg("seed") = 0,
          py::arg("on_epoch") = nullptr);

    m.def("gradient_check",
          [](const PolicyModel& model, const DemoSet& d, std::size_t bins, double eps, std::size_t samples,
             std::uint64_t seed) {
              const auto g = visitation_grid(d, bins);
              const auto r = gradient_check(
                  model, [&](Tape& t, const ModelVars& v) { return record_objective(t, v, d.trajectories, g).total; },
                  eps, samples, seed);
              return py::dict(py::arg("max_relative_error") = r.max_relative_error,
                              py::arg("worst_parameter") = r.worst_parameter, py::arg("samples") = r.samples);
          },
          py::arg("model"), py::arg("demos"), py::arg("bins") = 20, py::arg("eps") = 1e-5, py::arg("samples") = 200,
          py::arg("seed") = 0, "Central differences against reverse-mode gradients of the training objective");

    m.def("evaluate_policy",
          [](const EnvironmentConfig& env, const PolicyModel& model, std::size_t episodes, std::size_t length,
             const std::string& mode, double start_radius, std::uint64_t seed) {
              EvaluationConfig cfg{episodes, length, parse_enum(parse_rollout_mode(mode), "rollout mode", mode),
                                   start_radius, seed};
              return evaluate_policy(env, model, make_action_set(model.action_count()), cfg);
          },
          py::arg("env"), py::arg("model"), py::arg("episodes") = 100, py::arg("length") = 20,
          py::arg("mode") = "greedy", py::arg("start_radius") = 3.0, py::arg("seed") = 0);

    m.def("save_checkpoint",
          [](const std::filesystem::path& path, const PolicyModel& model, std::uint64_t seed) {
              save_checkpoint(path, Checkpoint{model, seed});
          },
          py::arg("path"), py::arg("model"), py::arg("seed") = 0);
    m.def("load_checkpoint", [](const std::filesystem::path& path) { return load_checkpoint(path).model; },
          py::arg("path"));
}
