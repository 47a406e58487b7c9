#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "curirl/checkpoint.hpp"
#include "curirl/error.hpp"
#include "curirl/gradcheck.hpp"
#include "curirl/ingestion.hpp"
#include "curirl/maxent.hpp"
#include "curirl/simulator.hpp"
#include "curirl/svg.hpp"
#include "curirl/text_io.hpp"

namespace curirl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Loss value reported for the original human-data run, printed for reference only.
constexpr double reference_final_loss = 2.7717;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Position2 parse_point(const std::string& text) {
    const auto comma = text.find(',');
    double x = 0, z = 0;
    if (comma == std::string::npos || !parse_double(std::string_view(text).substr(0, comma), x) ||
        !parse_double(std::string_view(text).substr(comma + 1), z))
        throw UsageError("expected x,z but got '" + text + "'");
    return {x, z};
}

struct EnvOptions {
    double size = 400.0;
    std::string goal; // "x,z"; empty means the room center
    double goal_radius = 1.0;
    double noise_radius = 5.0;
    double step_dt = 0.1;

    EnvironmentConfig build(std::uint64_t seed) const {
        EnvironmentConfig env;
        env.size = size;
        env.goal = goal.empty() ? Position2{size / 2, size / 2} : parse_point(goal);
        env.goal_radius = goal_radius;
        env.stimulus_noise_radius = noise_radius;
        env.step_dt = step_dt;
        env.seed = seed;
        validate(env);
        return env;
    }
};

void add_env_options(CLI::App& cmd, EnvOptions& env) {
    cmd.add_option("--env-size", env.size, "Room side length")->capture_default_str();
    cmd.add_option("--goal", env.goal, "Goal position x,z (default: room center)");
    cmd.add_option("--goal-radius", env.goal_radius, "Goal contact radius")->capture_default_str();
    cmd.add_option("--noise-radius", env.noise_radius, "Stimulus noise radius")->capture_default_str();
    cmd.add_option("--step-dt", env.step_dt, "Seconds per step")->capture_default_str();
}

json env_json(const EnvironmentConfig& env) {
    return {{"size", env.size},
            {"goal", {env.goal.x, env.goal.z}},
            {"goal_radius", env.goal_radius},
            {"stimulus_noise_radius", env.stimulus_noise_radius},
            {"step_dt", env.step_dt},
            {"seed", env.seed}};
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

// ----------------------------------------------------------------------------
// train

struct TrainOptions {
    std::string data;
    std::size_t synthetic = 0;
    TrainingConfig config;
    std::string curriculum = "trial_desc";
    std::string init = "he_uniform";
    EnvOptions env;
    std::size_t traj_len = 20;
    std::string behavior = "noisy_goal_seek";
    std::string mode = "replay";
    CsvSchema schema;
    std::string time_column, score_column;
    std::string out = "run";
    bool plot = false;
    std::string from_manifest;
};

json train_options_json(const TrainOptions& o) {
    return {{"data", o.data},
            {"synthetic", o.synthetic},
            {"epochs", o.config.epochs},
            {"lr", o.config.lr},
            {"actions", o.config.action_count},
            {"bins", o.config.grid_bins},
            {"hidden", o.config.hidden_units},
            {"step_scale", o.config.step_scale},
            {"curriculum", o.curriculum},
            {"init", o.init},
            {"demo_nll_weight", o.config.demo_nll_weight},
            {"seed", o.config.seed},
            {"env_size", o.env.size},
            {"goal", o.env.goal},
            {"goal_radius", o.env.goal_radius},
            {"noise_radius", o.env.noise_radius},
            {"step_dt", o.env.step_dt},
            {"traj_len", o.traj_len},
            {"behavior", o.behavior},
            {"mode", o.mode},
            {"x_column", o.schema.x_column},
            {"z_column", o.schema.z_column},
            {"time_column", o.time_column},
            {"score_column", o.score_column},
            {"plot", o.plot}};
}

void train_options_from_json(const json& j, TrainOptions& o) {
    j.at("data").get_to(o.data);
    j.at("synthetic").get_to(o.synthetic);
    j.at("epochs").get_to(o.config.epochs);
    j.at("lr").get_to(o.config.lr);
    j.at("actions").get_to(o.config.action_count);
    j.at("bins").get_to(o.config.grid_bins);
    j.at("hidden").get_to(o.config.hidden_units);
    j.at("step_scale").get_to(o.config.step_scale);
    j.at("curriculum").get_to(o.curriculum);
    j.at("init").get_to(o.init);
    j.at("demo_nll_weight").get_to(o.config.demo_nll_weight);
    j.at("seed").get_to(o.config.seed);
    j.at("env_size").get_to(o.env.size);
    j.at("goal").get_to(o.env.goal);
    j.at("goal_radius").get_to(o.env.goal_radius);
    j.at("noise_radius").get_to(o.env.noise_radius);
    j.at("step_dt").get_to(o.env.step_dt);
    j.at("traj_len").get_to(o.traj_len);
    j.at("behavior").get_to(o.behavior);
    j.at("mode").get_to(o.mode);
    j.at("x_column").get_to(o.schema.x_column);
    j.at("z_column").get_to(o.schema.z_column);
    j.at("time_column").get_to(o.time_column);
    j.at("score_column").get_to(o.score_column);
    j.at("plot").get_to(o.plot);
}

int cmd_train(TrainOptions o, std::ostream& out, std::ostream& err) {
    const std::string out_dir = o.out;
    if (!o.from_manifest.empty()) {
        std::ifstream in(o.from_manifest);
        if (!in) fail(ErrorKind::io, "cannot open " + o.from_manifest);
        json manifest;
        try {
            in >> manifest;
            train_options_from_json(manifest.at("options"), o);
        } catch (const json::exception& e) {
            fail(ErrorKind::parse, "manifest " + o.from_manifest + ": " + e.what());
        }
    }
    if (o.data.empty() == (o.synthetic == 0)) throw UsageError("give exactly one of --data <dir> or --synthetic <n>");

    const auto curriculum = parse_curriculum_key(o.curriculum);
    if (!curriculum) throw UsageError("unknown curriculum '" + o.curriculum + "'");
    const auto init = parse_init_scheme(o.init);
    if (!init) throw UsageError("unknown init scheme '" + o.init + "'");
    o.config.curriculum = *curriculum;
    o.config.init = *init;
    validate(o.config);

    DemoSet demos;
    if (!o.data.empty()) {
        if (o.mode != "replay" && o.mode != "random_walk") throw UsageError("unknown mode '" + o.mode + "'");
        if (!o.time_column.empty()) o.schema.time_column = o.time_column;
        if (!o.score_column.empty()) o.schema.score_column = o.score_column;
        LoadOptions lo;
        lo.mode = o.mode == "replay" ? TrajectoryMode::replay : TrajectoryMode::random_walk;
        lo.random_walk_length = o.traj_len;
        lo.seed = o.config.seed;
        lo.on_warning = [&err](const std::string& msg) { err << "warning: " << msg << '\n'; };
        demos = load_demo_set(o.data, o.schema, o.env.size, lo);
        if (const auto n = demos.out_of_range_states())
            err << "warning: " << n << " states lie outside the room and are clamped to edge cells\n";
    } else {
        const auto behavior = parse_demo_behavior(o.behavior);
        if (!behavior) throw UsageError("unknown behavior '" + o.behavior + "'");
        const EnvironmentConfig env = o.env.build(o.config.seed);
        SynthOptions so;
        so.action_count = o.config.action_count;
        so.step_scale = o.config.step_scale;
        demos = synth_demos(env, o.synthetic, o.traj_len, *behavior, o.config.seed, so);
    }

    const auto started = std::chrono::steady_clock::now();
    const TrainResult result = train(demos, o.config);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    save_checkpoint(dir / "model.ckpt", Checkpoint{result.model, o.config.seed});
    std::ostringstream loss;
    write_loss_csv(loss, result.curve);
    write_text_file(dir / "loss.csv", loss.str());

    json artifacts = {{"checkpoint", "model.ckpt"}, {"loss_curve", "loss.csv"}};
    if (o.plot) {
        std::vector<Series> series(3);
        series[0] = {"MEL", {}, "steelblue"};
        series[1] = {"AL", {}, "darkorange"};
        series[2] = {"MEO", {}, "black"};
        for (const auto& r : result.curve) {
            series[0].values.push_back(r.mel);
            series[1].values.push_back(r.al);
            series[2].values.push_back(r.meo);
        }
        std::ostringstream svg;
        write_line_chart_svg(svg, "Training loss per epoch", series);
        write_text_file(dir / "loss.svg", svg.str());
        artifacts["plot"] = "loss.svg";
    }

    const auto& first = result.curve.front();
    const auto& last = result.curve.back();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const json manifest = {{"tool", "curirl"},
                           {"version", tool_version},
                           {"command", "train"},
                           {"seed", o.config.seed},
                           {"options", train_options_json(o)},
                           {"trajectories", demos.size()},
                           {"states", demos.total_states()},
                           {"artifacts", artifacts},
                           {"initial", {{"mel", first.mel}, {"al", first.al}, {"meo", first.meo}}},
                           {"final", {{"mel", last.mel}, {"al", last.al}, {"meo", last.meo}}},
                           {"wall_time", wall}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

    out << "trajectories: " << demos.size() << "  states: " << demos.total_states() << '\n';
    out << "epoch 1:   MEL " << format_double(first.mel) << "  AL " << format_double(first.al) << "  MEO "
        << format_double(first.meo) << '\n';
    out << "epoch " << result.curve.size() << ": MEL " << format_double(last.mel) << "  AL "
        << format_double(last.al) << "  MEO " << format_double(last.meo);
    if (last.demo_nll) out << "  demo_nll " << format_double(*last.demo_nll);
    out << '\n';
    out << "reference final loss on the original human data: " << reference_final_loss << '\n';
    out << "outputs written to " << dir.string() << '\n';
    return exit_ok;
}

// ----------------------------------------------------------------------------
// gradcheck

struct GradcheckOptions {
    std::size_t samples = 200;
    double eps = 1e-5;
    double tol = 1e-5;
    std::uint64_t seed = 0;
    std::size_t trajectories = 2;
    std::size_t actions = 8;
    double demo_nll_weight = 0.0;
    std::string out;
};

int cmd_gradcheck(const GradcheckOptions& o, std::ostream& out) {
    if (o.eps < 1e-7 || o.eps > 1e-3) throw UsageError("--eps must lie in [1e-7, 1e-3]");
    if (o.samples < 1) throw UsageError("--samples must be >= 1");
    if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");

    EnvironmentConfig env;
    env.seed = o.seed;
    SynthOptions so;
    so.action_count = o.actions;
    const DemoSet demos = synth_demos(env, o.trajectories, 20, DemoBehavior::noisy_goal_seek, o.seed, so);
    const ActionSet set = make_action_set(o.actions);
    const VisitationGrid grid = visitation_grid(demos, 20);
    const PolicyModel model = init_model(2, default_hidden_units, o.actions, o.seed, InitScheme::he_uniform,
                                         InputNormalization::for_room(env.size));
    const RecordedLoss loss = [&](Tape& tape, const ModelVars& vars) {
        return record_objective(tape, vars, demos.trajectories, grid, o.demo_nll_weight, &set).total;
    };
    const GradientCheckResult r = gradient_check(model, loss, o.eps, o.samples, o.seed);

    out << "parameters sampled: " << r.samples << '\n';
    out << "max relative error: " << format_double(r.max_relative_error) << " (at " << r.worst_parameter
        << ": analytic " << format_double(r.worst_analytic) << ", numeric " << format_double(r.worst_numeric)
        << ")\n";
    const bool pass = r.max_relative_error <= o.tol;
    out << (pass ? "PASS" : "FAIL") << " (tolerance " << format_double(o.tol) << ")\n";

    if (!o.out.empty()) {
        fs::create_directories(o.out);
        const json manifest = {{"tool", "curirl"},
                               {"version", tool_version},
                               {"command", "gradcheck"},
                               {"seed", o.seed},
                               {"options",
                                {{"samples", o.samples},
                                 {"eps", o.eps},
                                 {"tol", o.tol},
                                 {"trajectories", o.trajectories},
                                 {"actions", o.actions},
                                 {"demo_nll_weight", o.demo_nll_weight}}},
                               {"max_relative_error", r.max_relative_error},
                               {"pass", pass}};
        write_text_file(fs::path(o.out) / "gradcheck_manifest.json", manifest.dump(2) + "\n");
    }
    return pass ? exit_ok : exit_check_failed;
}

// ----------------------------------------------------------------------------
// rollout

struct RolloutOptions {
    std::string checkpoint;
    std::size_t episodes = 100;
    std::string mode = "greedy";
    EnvOptions env;
    bool env_size_given = false;
    std::size_t length = 20;
    double start_radius = 3.0;
    double step_scale = default_step_scale;
    std::uint64_t seed = 0;
    std::string plot;
    std::string export_dir;
    std::string out = "run";
};

int cmd_rollout(RolloutOptions o, std::ostream& out) {
    if (o.episodes < 1) throw UsageError("--episodes must be >= 1");
    if (o.length < 1) throw UsageError("--length must be >= 1");
    const auto mode = parse_rollout_mode(o.mode);
    if (!mode) throw UsageError("unknown mode '" + o.mode + "'");

    Checkpoint ckpt;
    try {
        ckpt = load_checkpoint(fs::path(o.checkpoint));
    } catch (const Error& e) {
        // Every checkpoint problem is a data error here, including non-finite values.
        throw Error(ErrorKind::io, std::string("checkpoint ") + o.checkpoint + ": " + e.what());
    }
    // The room size is recoverable from the model's input normalization.
    if (!o.env_size_given && ckpt.model.input.offset_x > 0.0) o.env.size = 2.0 * ckpt.model.input.offset_x;

    const EnvironmentConfig env = o.env.build(o.seed);
    const ActionSet set = make_action_set(ckpt.model.action_count(), o.step_scale);
    EvaluationConfig ec;
    ec.episodes = o.episodes;
    ec.length = o.length;
    ec.mode = *mode;
    ec.start_radius = o.start_radius;
    ec.seed = o.seed;
    const EvaluationSummary summary = evaluate_policy(env, ckpt.model, set, ec);

    out << "episodes: " << o.episodes << "  mode: " << to_string(*mode) << '\n';
    out << "reach rate: " << format_double(summary.reach_rate) << '\n';
    out << "mean steps to goal (successes): " << format_double(summary.mean_steps_to_goal) << '\n';
    out << "mean score: " << format_double(summary.mean_score) << '\n';

    json artifacts = json::object();
    if (!o.export_dir.empty()) {
        export_rollouts(o.export_dir, summary.rollouts, env.step_dt);
        artifacts["rollouts"] = o.export_dir;
    }
    if (!o.plot.empty()) {
        std::vector<PathOverlay> paths;
        for (const auto& r : summary.rollouts) paths.push_back({r.path, r.reached});
        std::ostringstream svg;
        write_room_svg(svg, env.size, env.goal, env.goal_radius, paths);
        write_text_file(o.plot, svg.str());
        artifacts["plot"] = o.plot;
    }

    fs::create_directories(o.out);
    const json manifest = {{"tool", "curirl"},
                           {"version", tool_version},
                           {"command", "rollout"},
                           {"seed", o.seed},
                           {"checkpoint", o.checkpoint},
                           {"environment", env_json(env)},
                           {"options",
                            {{"episodes", o.episodes},
                             {"mode", o.mode},
                             {"length", o.length},
                             {"start_radius", o.start_radius},
                             {"step_scale", o.step_scale}}},
                           {"artifacts", artifacts},
                           {"reach_rate", summary.reach_rate},
                           {"mean_steps_to_goal", summary.mean_steps_to_goal},
                           {"mean_score", summary.mean_score}};
    write_text_file(fs::path(o.out) / "rollout_manifest.json", manifest.dump(2) + "\n");
    return exit_ok;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::unsupported_dimension: return exit_usage;
    case ErrorKind::numeric: return exit_numeric;
    default: return exit_data;
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Curriculum-ordered deep maximum-entropy IRL toolkit", "curirl"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    TrainOptions train_opts;
    auto* train_cmd = app.add_subcommand("train", "Train the preference network on demonstrations");
    train_cmd->add_option("--data", train_opts.data, "Directory of <participant>_<trial>.csv files");
    train_cmd->add_option("--synthetic", train_opts.synthetic, "Generate n synthetic demonstrators instead");
    train_cmd->add_option("--epochs", train_opts.config.epochs, "Training epochs")->capture_default_str();
    train_cmd->add_option("--lr", train_opts.config.lr, "Adam learning rate")->capture_default_str();
    train_cmd->add_option("--actions", train_opts.config.action_count, "Number of discrete actions")
        ->capture_default_str();
    train_cmd->add_option("--bins", train_opts.config.grid_bins, "Visitation grid cells per side")
        ->capture_default_str();
    train_cmd->add_option("--hidden", train_opts.config.hidden_units, "Hidden units per layer")
        ->capture_default_str();
    train_cmd->add_option("--curriculum", train_opts.curriculum, "trial_desc | score_desc")->capture_default_str();
    train_cmd->add_option("--init", train_opts.init, "he_uniform | zeros_output")->capture_default_str();
    train_cmd->add_option("--demo-nll-weight", train_opts.config.demo_nll_weight,
                          "Weight of the optional demonstrated-action likelihood term")
        ->capture_default_str();
    train_cmd->add_option("--seed", train_opts.config.seed, "RNG seed")->capture_default_str();
    train_cmd->add_option("--traj-len", train_opts.traj_len, "Steps per synthetic/random-walk trajectory")
        ->capture_default_str();
    train_cmd->add_option("--behavior", train_opts.behavior, "noisy_goal_seek | random_walk")->capture_default_str();
    train_cmd->add_option("--mode", train_opts.mode, "replay | random_walk (CSV data)")->capture_default_str();
    train_cmd->add_option("--x-column", train_opts.schema.x_column)->capture_default_str();
    train_cmd->add_option("--z-column", train_opts.schema.z_column)->capture_default_str();
    train_cmd->add_option("--time-column", train_opts.time_column);
    train_cmd->add_option("--score-column", train_opts.score_column);
    train_cmd->add_option("--out", train_opts.out, "Output directory")->capture_default_str();
    train_cmd->add_flag("--plot", train_opts.plot, "Also write loss.svg");
    train_cmd->add_option("--from-manifest", train_opts.from_manifest, "Re-run the configuration in a manifest");
    add_env_options(*train_cmd, train_opts.env);

    GradcheckOptions grad_opts;
    auto* grad_cmd = app.add_subcommand("gradcheck", "Verify gradients of the training loss by finite differences");
    grad_cmd->add_option("--samples", grad_opts.samples)->capture_default_str();
    grad_cmd->add_option("--eps", grad_opts.eps)->capture_default_str();
    grad_cmd->add_option("--tol", grad_opts.tol)->capture_default_str();
    grad_cmd->add_option("--seed", grad_opts.seed)->capture_default_str();
    grad_cmd->add_option("--trajectories", grad_opts.trajectories)->capture_default_str();
    grad_cmd->add_option("--actions", grad_opts.actions)->capture_default_str();
    grad_cmd->add_option("--demo-nll-weight", grad_opts.demo_nll_weight)->capture_default_str();
    grad_cmd->add_option("--out", grad_opts.out, "Write gradcheck_manifest.json here");

    RolloutOptions roll_opts;
    auto* roll_cmd = app.add_subcommand("rollout", "Roll a trained policy out in the simulated room");
    roll_cmd->add_option("--checkpoint", roll_opts.checkpoint)->required();
    roll_cmd->add_option("--episodes", roll_opts.episodes)->capture_default_str();
    roll_cmd->add_option("--mode", roll_opts.mode, "greedy | sample")->capture_default_str();
    roll_cmd->add_option("--length", roll_opts.length, "Steps per episode")->capture_default_str();
    roll_cmd->add_option("--start-radius", roll_opts.start_radius, "Episodes start within this distance of the goal")
        ->capture_default_str();
    roll_cmd->add_option("--step-scale", roll_opts.step_scale)->capture_default_str();
    roll_cmd->add_option("--seed", roll_opts.seed)->capture_default_str();
    roll_cmd->add_option("--plot", roll_opts.plot, "Trajectory overlay SVG path");
    roll_cmd->add_option("--export", roll_opts.export_dir, "Directory for ep_<i>.csv trajectories");
    roll_cmd->add_option("--out", roll_opts.out, "Directory for rollout_manifest.json")->capture_default_str();
    add_env_options(*roll_cmd, roll_opts.env);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_opts, out, err);
        if (grad_cmd->parsed()) return cmd_gradcheck(grad_opts, out);
        roll_opts.env_size_given = roll_cmd->count("--env-size") > 0;
        return cmd_rollout(roll_opts, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const TrainingAborted& e) {
        err << "error: " << e.what() << " (" << e.curve().size() << " finite epochs recorded)\n";
        return exit_numeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    }
}

} // namespace curirl::cli
