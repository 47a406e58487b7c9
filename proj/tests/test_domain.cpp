#include <doctest.h>

#include <cmath>

#include "curirl/domain.hpp"
#include "curirl/error.hpp"
#include "curirl/rng.hpp"

using namespace curirl;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::contract;
}

} // namespace

TEST_CASE("make_action_set: four cardinal directions") {
    const ActionSet set = make_action_set(4, 0.1);
    REQUIRE(set.size() == 4);
    CHECK(set.directions()[0] == Displacement2{1, 0});
    CHECK(set.directions()[1] == Displacement2{0, 1});
    CHECK(set.directions()[2] == Displacement2{-1, 0});
    CHECK(set.directions()[3] == Displacement2{0, -1});
    CHECK(set.step_scale() == 0.1);
}

TEST_CASE("make_action_set: eight unit directions at 45 degree increments") {
    const ActionSet set = make_action_set(8, 0.1);
    REQUIRE(set.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
        const auto d = set.directions()[k];
        CHECK(std::abs(d.norm() - 1.0) <= 1e-12);
        const double angle = std::atan2(d.z, d.x);
        const double expected = std::remainder(k * M_PI / 4.0, 2 * M_PI);
        CHECK(std::abs(std::remainder(angle - expected, 2 * M_PI)) <= 1e-12);
    }
    CHECK(set.displacement(2).z == doctest::Approx(0.1));
}

TEST_CASE("make_action_set: preconditions") {
    CHECK(kind_of([] { make_action_set(1, 0.1); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { make_action_set(8, 0.0); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { make_action_set(8, -1.0); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { ActionSet({{1, 0}, {1, 0}}, 0.1); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { ActionSet({{1, 0}, {0, 2}}, 0.1); }) == ErrorKind::invalid_argument);
}

TEST_CASE("make_action_set: directions sum to zero for every k") {
    for (std::size_t k = 2; k <= 64; ++k) {
        const ActionSet set = make_action_set(k, 0.37);
        Displacement2 sum;
        for (const auto& d : set.directions()) sum = {sum.x + d.x, sum.z + d.z};
        CHECK(sum.norm() < 1e-9);
    }
}

TEST_CASE("nearest_action_index") {
    const ActionSet eight = make_action_set(8);
    const ActionSet four = make_action_set(4);
    CHECK(nearest_action_index({0.1, 0.0}, eight) == 0);
    CHECK(nearest_action_index({0.05, 0.05}, four) == 0); // tie between +x and +y
    CHECK(nearest_action_index({0.0, -3.0}, four) == 3);
    CHECK(nearest_action_index({-1.0, 1.0}, eight) == 3);
    CHECK(kind_of([&] { nearest_action_index({0, 0}, eight); }) == ErrorKind::degenerate_input);
    CHECK(kind_of([&] { nearest_action_index({NAN, 1}, eight); }) == ErrorKind::degenerate_input);
}

TEST_CASE("nearest_action_index is invariant under positive scaling") {
    Rng rng(11);
    for (std::size_t k : {3u, 5u, 8u, 12u}) {
        const ActionSet set = make_action_set(k);
        for (int i = 0; i < 500; ++i) {
            const Displacement2 d{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            if (d.norm() == 0.0) continue;
            const std::size_t base = nearest_action_index(d, set);
            for (double s : {1e-6, 0.5, 3.0, 1e6}) CHECK(nearest_action_index(d * s, set) == base);
        }
    }
}

TEST_CASE("trajectory chain consistency and validation") {
    Trajectory t;
    t.steps = {{{0, 0}, {0.1, 0}, {}}, {{0.1, 0}, {0, 0.1}, {}}, {{0.1, 0.1}, {0, 0}, {}}};
    CHECK(t.chain_consistent());
    CHECK(t.end_state() == Position2{0.1, 0.1});
    t.steps[1].state.x = 0.2;
    CHECK_FALSE(t.chain_consistent());

    Trajectory empty;
    CHECK(kind_of([&] { validate(empty); }) == ErrorKind::empty_input);

    DemoSet none;
    CHECK(kind_of([&] { validate(none); }) == ErrorKind::empty_input);

    DemoSet flagged;
    flagged.environment_size = 10;
    flagged.trajectories.push_back({{{{-1, 5}, {0.1, 0}, {}}, {{5, 5}, {0.1, 0}, {}}}, "p", 1, {}});
    validate(flagged);
    CHECK(flagged.out_of_range_states() == 1);
}

TEST_CASE("MdpSpec discount range") {
    MdpSpec mdp;
    validate(mdp);
    mdp.gamma = 1.5;
    CHECK(kind_of([&] { validate(mdp); }) == ErrorKind::invalid_argument);
}
