#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "gframelab/scenarios.hpp"

using namespace gframelab;

namespace {

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

std::string temp_path(const std::string& name) {
    return std::string(::testing::TempDir()) + "/" + name;
}

Scenario random_scenario(std::uint64_t seed) {
    GFrameFamily fam = random_gframe(3, {2, 1, 2}, {1.0, 0.4, 2.2}, seed);
    Controller p = random_controller(3, 8.0, seed + 1);
    Controller q = random_controller(3, 8.0, seed + 2);
    return Scenario{fam.space, std::move(fam), std::nullopt, std::move(p), std::move(q),
                    seed, "random-" + std::to_string(seed)};
}

}  // namespace

TEST(Example15, MidpointRuleIsExactAtFourNodes) {
    const Scenario sc = example_1_5(4, Controller::identity(2), Controller::identity(2));
    EXPECT_LE(operator_norm(frame_operator(sc.lambda_family) - M_PI * Mat::Identity(2, 2)),
              1e-12);
}

TEST(Example15, TotalMassIsTwoPi) {
    for (std::size_t n : {2u, 7u, 64u, 1000u})
        EXPECT_NEAR(example_1_5(n, Controller::identity(2), Controller::identity(2))
                        .space.total_mass(),
                    2.0 * M_PI, 1e-12);
}

TEST(Example15, ControlledOperatorAtLargeN) {
    const Scenario sc = example_1_5(1024, Controller(diag2(2.0, 1.0)),
                                    Controller(diag2(3.0, 1.0)));
    const Mat got = controlled_frame_operator(sc.lambda_family, sc.p, sc.q);
    EXPECT_LE(operator_norm(got - M_PI * diag2(6.0, 1.0)), 1e-8);
}

TEST(Example15, MidpointExactnessStartsAtThreeNodes) {
    // Two midpoint nodes land on w = pi/2, 3pi/2 where the cosine row
    // vanishes: the discretization degenerates. Three nodes already integrate
    // the trigonometric products exactly.
    const FrameReport coarse = frame_bounds(
        example_1_5(2, Controller::identity(2), Controller::identity(2)).lambda_family);
    EXPECT_EQ(coarse.verdict, FrameVerdict::BesselOnly);
    const FrameReport exact = frame_bounds(
        example_1_5(3, Controller::identity(2), Controller::identity(2)).lambda_family);
    EXPECT_EQ(exact.verdict, FrameVerdict::Frame);
    EXPECT_NEAR(exact.lower_bound, M_PI, 1e-12);
    EXPECT_NEAR(exact.upper_bound, M_PI, 1e-12);
    EXPECT_TRUE(exact.tight);
}

TEST(Example15, Errors) {
    EXPECT_THROW(example_1_5(1, Controller::identity(2), Controller::identity(2)),
                 BadInterval);
    EXPECT_THROW(example_1_5(8, Controller::identity(3), Controller::identity(2)),
                 BadControllers);
}

TEST(RandomController, UnitConditionTargetGivesIdentity) {
    const Controller c = random_controller(4, 1.0, 7);
    EXPECT_LE(operator_norm(c.matrix() - Mat::Identity(4, 4)), 1e-12);
}

TEST(RandomController, CommutingWithFrameOperator) {
    const GFrameFamily fam = random_gframe(4, {2, 2, 1}, {1.0, 0.5, 2.0}, 8);
    const Mat s = frame_operator(fam);
    const Controller c = random_controller(4, 50.0, 9, s);
    EXPECT_LE(commutator_norm(c.matrix(), s), 1e-10);
}

TEST(RandomController, SatisfiesControllerInvariants) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Controller c = random_controller(5, 100.0, seed);
        EXPECT_LE(hermitian_defect(c.matrix()), 1e-12);
        EXPECT_GE(c.alpha(), c.beta() / 100.0 - 1e-12);
        EXPECT_GE(c.alpha(), 1.0 - 1e-12);  // spectrum drawn from [1, cond]
    }
}

TEST(RandomGenerators, SameSeedReproducesBitForBit) {
    const GFrameFamily a = random_gframe(3, {2, 2}, {1.0, 2.0}, 123);
    const GFrameFamily b = random_gframe(3, {2, 2}, {1.0, 2.0}, 123);
    for (std::size_t w = 0; w < a.space.size(); ++w) EXPECT_EQ(a.blocks[w], b.blocks[w]);
    const Controller p1 = random_controller(3, 10.0, 321);
    const Controller p2 = random_controller(3, 10.0, 321);
    EXPECT_EQ(p1.matrix(), p2.matrix());
}

TEST(ScenarioIo, Example15RoundTrips) {
    const std::string path = temp_path("example15.json");
    const Scenario sc = example_1_5(8, Controller::identity(2), Controller::identity(2));
    save_scenario(sc, path);
    const Scenario back = load_scenario(path);
    EXPECT_TRUE(scenarios_equal(sc, back));
}

TEST(ScenarioIo, RandomScenariosRoundTripAcrossSeeds) {
    for (std::uint64_t seed : {3u, 17u, 88u}) {
        const std::string path = temp_path("random-" + std::to_string(seed) + ".json");
        Scenario sc = random_scenario(seed);
        // Exercise the optional family too.
        sc.gamma_family = random_gframe(3, {2, 1, 2}, {1.0, 0.4, 2.2}, seed + 5);
        save_scenario(sc, path);
        const Scenario back = load_scenario(path);
        EXPECT_TRUE(scenarios_equal(sc, back));
        // Serialization itself is deterministic.
        EXPECT_EQ(scenario_to_json(sc).dump(2), scenario_to_json(back).dump(2));
    }
}

TEST(ScenarioIo, MissingFileIsIoError) {
    EXPECT_THROW(load_scenario(temp_path("does-not-exist.json")), IoError);
}

TEST(ScenarioIo, TruncatedFileIsFormatError) {
    const std::string path = temp_path("truncated.json");
    const Scenario sc = example_1_5(4, Controller::identity(2), Controller::identity(2));
    save_scenario(sc, path);
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path);
    out << content.substr(0, content.size() / 2);
    out.close();
    EXPECT_THROW(load_scenario(path), FormatError);
}

TEST(ScenarioIo, WrongVersionIsFormatError) {
    const std::string path = temp_path("wrong-version.json");
    nlohmann::json j = scenario_to_json(
        example_1_5(4, Controller::identity(2), Controller::identity(2)));
    j["format_version"] = 999;
    std::ofstream out(path);
    out << j.dump(2);
    out.close();
    EXPECT_THROW(load_scenario(path), FormatError);
}

TEST(ScenarioIo, NonPositiveControllerIsFormatError) {
    const std::string path = temp_path("bad-controller.json");
    nlohmann::json j = scenario_to_json(
        example_1_5(4, Controller::identity(2), Controller::identity(2)));
    j["P"]["entries"][0] = {-5.0, 0.0};  // breaks positive definiteness
    std::ofstream out(path);
    out << j.dump(2);
    out.close();
    EXPECT_THROW(load_scenario(path), FormatError);
}
