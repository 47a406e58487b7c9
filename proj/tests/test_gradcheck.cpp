#include <doctest.h>

#include <cmath>

#include "curirl/error.hpp"
#include "curirl/gradcheck.hpp"
#include "curirl/maxent.hpp"
#include "curirl/simulator.hpp"
#include "oracles.hpp"

using namespace curirl;

TEST_CASE("relative error formula") {
    CHECK(gradient_relative_error(1.0, 1.0) == 0.0);
    CHECK(gradient_relative_error(0.0, 0.0) == 0.0);
    CHECK(gradient_relative_error(1.0, -1.0) == 1.0);
    CHECK(gradient_relative_error(1e-10, 0.0) == doctest::Approx(1e-2));
}

TEST_CASE("quadratic loss: analytic and numeric gradients agree to round-off") {
    const PolicyModel m = oracle::random_model(3, 4, 8);
    // 0.5 * ||y(s)||^2 is smooth in W3 and b3 and piecewise quadratic elsewhere
    const RecordedLoss loss = [](Tape& t, const ModelVars& v) {
        const Var y = record_forward(t, v, {0.3, -0.2});
        return t.scale(t.dot(y, y), 0.5);
    };
    const auto r = gradient_check(m, loss, 1e-5, m.params.total_size(), 1);
    CHECK(r.samples == m.params.total_size());
    CHECK(r.max_relative_error <= 1e-6);
}

TEST_CASE("MEO loss on synthetic demonstrations meets the 1e-5 tolerance") {
    EnvironmentConfig env;
    const DemoSet demos = synth_demos(env, 2, 20, DemoBehavior::noisy_goal_seek, 11);
    const VisitationGrid grid = visitation_grid(demos, 20);
    const PolicyModel m = init_model(2, 128, 8, 4, InitScheme::he_uniform, InputNormalization::for_room(400));
    const RecordedLoss loss = [&](Tape& t, const ModelVars& v) {
        return record_objective(t, v, demos.trajectories, grid).total;
    };
    const auto r = gradient_check(m, loss, 1e-5, 200, 0);
    CHECK(r.samples == 200);
    CHECK(r.max_relative_error <= 1e-5);
    CHECK_FALSE(r.worst_parameter.empty());
}

TEST_CASE("gradient_check preconditions") {
    const PolicyModel m = init_model(2, 4, 4, 1);
    const RecordedLoss loss = [](Tape& t, const ModelVars& v) {
        const Var y = record_forward(t, v, {1, 1});
        return t.dot(y, y);
    };
    for (double eps : {1.0, 1e-9, 0.0, -1e-5}) {
        try {
            gradient_check(m, loss, eps, 10);
            FAIL("expected invalid_argument");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::invalid_argument);
        }
    }
    CHECK(gradient_check(m, loss, 1e-5, 10'000).samples == m.params.total_size());
    CHECK(gradient_check(m, loss, 1e-5, 10, 5).max_relative_error ==
          gradient_check(m, loss, 1e-5, 10, 5).max_relative_error);
}
