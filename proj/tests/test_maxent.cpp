#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "curirl/error.hpp"
#include "curirl/maxent.hpp"
#include "curirl/rng.hpp"
#include "curirl/simulator.hpp"
#include "oracles.hpp"

using namespace curirl;

namespace {

Trajectory from_states(std::vector<Position2> states, int trial = 1) {
    Trajectory t;
    t.participant_id = "p";
    t.trial_index = trial;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Position2 next = i + 1 < states.size() ? states[i + 1] : states[i] + Displacement2{0.1, 0};
        t.steps.push_back({states[i], next - states[i], std::nullopt});
    }
    return t;
}

DemoSet random_demos(std::uint64_t seed, std::size_t n, std::size_t len) {
    EnvironmentConfig env;
    return synth_demos(env, n, len, DemoBehavior::random_walk, seed);
}

const double ln8 = std::log(8.0);

} // namespace

TEST_CASE("state_mean examples") {
    DemoSet d;
    d.trajectories = {from_states({{0, 0}, {2, 4}}), from_states({{4, 8}, {6, 0}})};
    CHECK(state_mean(d) == Position2{3, 3});
    d.trajectories = {from_states({{1, 2}})};
    CHECK(state_mean(d) == Position2{1, 2});
    d.trajectories = {from_states({{0, 0}, {1, 1}}), from_states({{0, 0}})};
    try {
        state_mean(d);
        FAIL("expected length mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::length_mismatch);
    }
}

TEST_CASE("visitation grid examples") {
    const std::vector<Trajectory> all_one = {from_states({{10, 10}, {11, 12}, {5, 19.9}})};
    auto g = visitation_grid(all_one, 400, 20);
    CHECK(g.frequencies[0] == 1.0);
    CHECK(g.total == 3);

    const std::vector<Trajectory> split = {from_states({{10, 10}, {390, 390}, {399, 385}, {380.5, 399.99}})};
    g = visitation_grid(split, 400, 20);
    CHECK(g.frequencies[0] == 0.25);
    CHECK(g.frequencies[19 * 20 + 19] == 0.75);
    CHECK(g.center(0) == Position2{10, 10});
    CHECK(g.center(19 * 20 + 19) == Position2{390, 390});

    g = visitation_grid(split, 400, 1);
    CHECK(g.frequencies == std::vector<double>{1.0});
    CHECK(g.center(0) == Position2{200, 200});

    // out-of-room states clamp to edge cells; the top edge belongs to the last cell
    const std::vector<Trajectory> outside = {from_states({{-5, 450}, {400, 400}, {0, 0}})};
    g = visitation_grid(outside, 400, 20);
    CHECK(g.counts[0 * 20 + 19] == 1);
    CHECK(g.counts[19 * 20 + 19] == 1);
    CHECK(g.counts[0] == 1);

    CHECK_THROWS_AS(visitation_grid(split, 400, 0), Error);
    CHECK_THROWS_AS(visitation_grid(std::vector<Trajectory>{}, 400, 20), Error);
}

TEST_CASE("visitation frequencies are a distribution") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const DemoSet d = random_demos(seed, 1 + seed % 7, 1 + seed % 31);
        const auto g = visitation_grid(d, 1 + seed % 25);
        std::uint64_t n = 0;
        for (std::size_t b = 0; b < g.counts.size(); ++b) {
            CHECK(g.frequencies[b] >= 0.0);
            n += g.counts[b];
        }
        CHECK(n == d.total_states());
        CHECK(std::abs(g.frequency_sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("entropy examples") {
    CHECK(entropy(std::vector<double>(8, 0.125)) == doctest::Approx(ln8).epsilon(1e-15));
    CHECK(entropy(std::vector<double>{0, 0, 1, 0}) == 0.0);
    CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.6}), Error);
    CHECK_THROWS_AS(entropy(std::vector<double>{1.5, -0.5}), Error);
}

TEST_CASE("uniform policy gives ln K for MEL and AL") {
    for (std::size_t k : {2u, 4u, 8u, 12u}) {
        const PolicyModel m = init_model(2, 16, k, 3, InitScheme::zeros_output, InputNormalization::for_room(400));
        const DemoSet d = random_demos(k, 3, 10);
        const auto g = visitation_grid(d, 20);
        CHECK(std::abs(mel(m, d.trajectories) - std::log(double(k))) <= 1e-12);
        CHECK(std::abs(al(m, d.trajectories, g) - std::log(double(k))) <= 1e-12);
    }
}

TEST_CASE("MEL and AL against the extended-precision oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PolicyModel m = oracle::random_model(seed, 8, 32, 2.0);
        m.input = InputNormalization::for_room(400);
        const DemoSet d = random_demos(seed + 100, 4, 12);
        const auto g = visitation_grid(d, 20);

        long double mel_ref = 0;
        std::size_t n = 0;
        for (const auto& t : d.trajectories)
            for (const auto& s : t.steps) {
                mel_ref += oracle::softmax_entropy(oracle::forward(m, s.state));
                ++n;
            }
        mel_ref /= n;
        long double al_ref = 0;
        for (std::size_t b = 0; b < g.counts.size(); ++b)
            if (g.counts[b] > 0) al_ref += g.frequencies[b] * oracle::softmax_entropy(oracle::forward(m, g.center(b)));

        CHECK(std::abs(mel(m, d.trajectories) - double(mel_ref)) <= 1e-10);
        CHECK(std::abs(al(m, d.trajectories, g) - double(al_ref)) <= 1e-10);
    }
}

TEST_CASE("AL weights cell-center entropies by visitation frequency") {
    PolicyModel m = oracle::random_model(21, 8, 16);
    m.input = InputNormalization::for_room(400);
    const std::vector<Trajectory> trajs = {from_states({{10, 10}, {390, 390}, {391, 389}, {395, 399}})};
    const auto g = visitation_grid(trajs, 400, 20);
    const double e1 = oracle::softmax_entropy(oracle::forward(m, {10, 10}));
    const double e2 = oracle::softmax_entropy(oracle::forward(m, {390, 390}));
    CHECK(std::abs(al(m, trajs, g) - (0.25 * e1 + 0.75 * e2)) <= 1e-12);
}

TEST_CASE("AL rejects a grid built from other trajectories") {
    const PolicyModel m = init_model(2, 8, 8, 1);
    const std::vector<Trajectory> a = {from_states({{10, 10}, {20, 20}})};
    const std::vector<Trajectory> b = {from_states({{300, 300}, {20, 20}})};
    const auto g = visitation_grid(a, 400, 20);
    try {
        al(m, b, g);
        FAIL("expected consistency error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::consistency);
    }
}

TEST_CASE("meo examples") {
    const auto r = meo(1.0, 0.5);
    CHECK(r.meo == 1.5);
    CHECK(r.mel == 1.0);
    CHECK(r.al == 0.5);
    CHECK(meo(ln8, ln8).meo == 2 * ln8);
    CHECK(meo(0, 0).meo == 0.0);
    CHECK_THROWS_AS(meo(NAN, 0), Error);
}

TEST_CASE("demo likelihood term") {
    const PolicyModel m = init_model(2, 16, 8, 3, InitScheme::zeros_output, InputNormalization::for_room(400));
    const DemoSet d = random_demos(5, 2, 6);
    const ActionSet set = make_action_set(8);
    CHECK(std::abs(demo_nll(m, d.trajectories, set) - ln8) <= 1e-12);

    // weight 0 records exactly the MEO graph
    const PolicyModel r = oracle::random_model(5, 8, 16);
    const auto g = visitation_grid(d, 20);
    Tape t1, t2;
    const ModelVars v1 = bind_model(t1, r), v2 = bind_model(t2, r);
    const auto o1 = record_objective(t1, v1, d.trajectories, g);
    const auto o2 = record_objective(t2, v2, d.trajectories, g, 0.0, &set);
    CHECK(t1.scalar(o1.total) == t2.scalar(o2.total));
    CHECK_FALSE(o2.demo_nll.has_value());
    const Gradients g1 = backward(t1, v1, o1.total), g2 = backward(t2, v2, o2.total);
    CHECK(g1.blocks == g2.blocks);

    Tape t3;
    const ModelVars v3 = bind_model(t3, r);
    const auto o3 = record_objective(t3, v3, d.trajectories, g, 0.5, &set);
    CHECK(o3.demo_nll.has_value());
    CHECK(std::abs(t3.scalar(o3.total) - (t3.scalar(o3.meo) + 0.5 * t3.scalar(*o3.demo_nll))) <= 1e-12);
    CHECK_THROWS_AS(record_objective(t3, v3, d.trajectories, g, -1.0, &set), Error);
}

TEST_CASE("training from a uniform policy") {
    EnvironmentConfig env;
    const DemoSet d = synth_demos(env, 15, 20, DemoBehavior::noisy_goal_seek, 7);
    TrainingConfig cfg;
    cfg.init = InitScheme::zeros_output;
    cfg.hidden_units = 32;
    cfg.epochs = 30;
    cfg.seed = 3;
    std::size_t callbacks = 0;
    const auto r = train(d, cfg, [&](std::size_t e, const LossBreakdown&) { CHECK(e == ++callbacks); });
    CHECK(callbacks == 30);
    REQUIRE(r.curve.size() == 30);
    CHECK(std::abs(r.curve[0].meo - 2 * ln8) <= 1e-12);
    // the uniform policy maximizes every entropy term, so its gradient vanishes
    CHECK(std::abs(r.curve.back().meo - 2 * ln8) <= 1e-12);
    for (const auto& row : r.curve) {
        CHECK(row.mel >= 0.0);
        CHECK(row.mel <= ln8 + 1e-12);
        CHECK(row.al >= 0.0);
        CHECK(row.al <= ln8 + 1e-12);
        CHECK(row.meo == row.mel + row.al);
    }
    CHECK(r.wall_time >= 0.0);
}

TEST_CASE("training from a random initialization lowers the objective") {
    EnvironmentConfig env;
    const DemoSet d = synth_demos(env, 15, 20, DemoBehavior::noisy_goal_seek, 7);
    TrainingConfig cfg;
    cfg.epochs = 40;
    cfg.seed = 3;
    const auto r = train(d, cfg);
    CHECK(r.curve.back().meo < r.curve.front().meo);
    for (const auto& row : r.curve) {
        CHECK(row.mel >= 0.0);
        CHECK(row.mel <= ln8 + 1e-12);
        CHECK(row.al >= 0.0);
        CHECK(row.al <= ln8 + 1e-12);
    }
}

TEST_CASE("training is bitwise reproducible and curve rows are well formed") {
    const DemoSet d = random_demos(9, 4, 10);
    TrainingConfig cfg;
    cfg.epochs = 8;
    cfg.hidden_units = 16;
    cfg.seed = 42;
    const auto a = train(d, cfg), b = train(d, cfg);
    CHECK(a.curve == b.curve);
    CHECK(a.model == b.model);
    cfg.seed = 43;
    CHECK_FALSE(train(d, cfg).curve == a.curve);

    std::ostringstream csv;
    write_loss_csv(csv, a.curve);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch,mel,al,meo");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 8);
}

TEST_CASE("training config validation and abort on divergence") {
    const DemoSet d = random_demos(1, 2, 5);
    TrainingConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(train(d, cfg), Error);
    cfg = {};
    cfg.lr = -1;
    CHECK_THROWS_AS(train(d, cfg), Error);
    cfg = {};
    cfg.action_count = 1;
    CHECK_THROWS_AS(train(d, cfg), Error);

    cfg = {};
    cfg.hidden_units = 8;
    cfg.epochs = 20;
    cfg.lr = 1e300;
    try {
        train(d, cfg);
        FAIL("expected TrainingAborted");
    } catch (const TrainingAborted& e) {
        CHECK(e.kind() == ErrorKind::numeric);
        CHECK(e.epoch() >= 2);
        CHECK(e.curve().size() == e.epoch() - 1);
        for (const auto& row : e.curve()) CHECK(std::isfinite(row.meo));
    }
}
