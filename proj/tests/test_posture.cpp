#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "poselex/json_io.hpp"
#include "poselex/posture.hpp"
#include "test_util.hpp"

using namespace poselex;
using testutil::base_skeleton;
using testutil::skeleton_with_arm;

TEST_CASE("skeleton validation catches missing and degenerate joints") {
    Skeleton s = base_skeleton();
    CHECK_NOTHROW(s.validate());

    Skeleton missing = base_skeleton();
    missing.joints.erase("right_wrist");
    CHECK_THROWS_WITH_AS(missing.validate(),
                         "skeleton is missing joint 'right_wrist'",
                         std::invalid_argument);

    Skeleton degenerate = base_skeleton();
    degenerate.joints["right_elbow"] = degenerate.joints["right_shoulder"];
    CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);

    Skeleton nonfinite = base_skeleton();
    nonfinite.joints["torso"] = {0.0, std::nan(""), 0.0};
    CHECK_THROWS_AS(nonfinite.validate(), std::invalid_argument);
}

TEST_CASE("collinear shoulder line has no body plane") {
    Skeleton s = base_skeleton();
    // shoulders stacked along the body vertical
    s.joints["left_shoulder"] = {0.0, 0.4, 0.0};
    s.joints["right_shoulder"] = {0.0, 0.6, 0.0};
    s.joints["right_elbow"] = {0.3, 0.6, 0.0};
    s.joints["right_wrist"] = {0.6, 0.6, 0.0};
    CHECK_THROWS_AS(joints_to_angles(s), std::invalid_argument);
}

TEST_CASE("axis-aligned skeletons produce the expected angles") {
    SUBCASE("arm straight down, forearm extended") {
        auto s = skeleton_with_arm({0, -1, 0}, {0, -1, 0});
        auto angles = joints_to_angles(s);
        CHECK(angles.a_theta == doctest::Approx(0.0));
        CHECK(angles.f_theta == doctest::Approx(180.0));
    }
    SUBCASE("arm horizontal forward, forearm folded back") {
        auto s = skeleton_with_arm({0, 0, 1}, {0, 0, -1});
        auto angles = joints_to_angles(s);
        CHECK(angles.a_theta == doctest::Approx(90.0));
        CHECK(angles.a_psi == doctest::Approx(0.0));
        CHECK(angles.f_theta == doctest::Approx(0.0));
    }
    SUBCASE("arm out to the side, forearm perpendicular upward") {
        // Built from explicit 3D vectors: the body faces +Z, so "outside" for
        // the right limb is +X and body-up is +Y.
        auto s = skeleton_with_arm({1, 0, 0}, {0, 1, 0});
        auto angles = joints_to_angles(s);
        CHECK(angles.a_theta == doctest::Approx(90.0));
        CHECK(angles.a_psi == doctest::Approx(-90.0));
        CHECK(angles.f_theta == doctest::Approx(90.0));
        CHECK(angles.f_psi == doctest::Approx(0.0));  // off-arm part is vertical
    }
    SUBCASE("arm across the body is inside") {
        auto s = skeleton_with_arm({-1, 0, 0}, {-1, 0, 0});
        auto angles = joints_to_angles(s);
        CHECK(angles.a_psi == doctest::Approx(90.0));
    }
    SUBCASE("arm backward is rear") {
        auto s = skeleton_with_arm({0, 0, -1}, {0, 0, -1});
        auto angles = joints_to_angles(s);
        CHECK(std::abs(angles.a_psi) == doctest::Approx(180.0));
        CHECK(angles.a_psi < 180.0);  // domain is [-180, 180)
    }
    SUBCASE("horizontal forearm off-arm component") {
        // arm forward, forearm bent 90 degrees toward the outside
        auto s = skeleton_with_arm({0, 0, 1}, {1, 0, 0});
        auto angles = joints_to_angles(s);
        CHECK(angles.f_theta == doctest::Approx(90.0));
        CHECK(angles.f_psi == doctest::Approx(90.0));
    }
}

TEST_CASE("angle ranges hold for random skeletons") {
    std::mt19937 rng(53);
    for (int i = 0; i < 500; ++i) {
        auto angles = joints_to_angles(testutil::random_skeleton(rng));
        CHECK(angles.a_theta >= 0.0);
        CHECK(angles.a_theta <= 180.0);
        CHECK(angles.f_theta >= 0.0);
        CHECK(angles.f_theta <= 180.0);
        CHECK(angles.a_psi >= -180.0);
        CHECK(angles.a_psi < 180.0);
        CHECK(angles.f_psi >= 0.0);
        CHECK(angles.f_psi <= 90.0);
    }
}

TEST_CASE("rule tables reject partial or mismatched definitions") {
    auto rows = make_lexicon("r", {"r0", "r1"});
    auto cols = make_lexicon("c", {"c0"});
    auto out = make_lexicon("o", {"o0", "o1"});
    CHECK_THROWS_AS(RuleTable(rows, cols, out, {0}), std::invalid_argument);
    CHECK_THROWS_AS(RuleTable(rows, cols, out, {0, 5}), std::invalid_argument);
    CHECK_NOTHROW(RuleTable(rows, cols, out, {0, 1}));
}

TEST_CASE("default tables reproduce every cell as singleton to singleton") {
    auto check_table = [](const RuleTable& table) {
        for (std::size_t r = 0; r < table.rows()->size(); ++r) {
            for (std::size_t c = 0; c < table.cols()->size(); ++c) {
                auto out = evaluate_rule_table(MassVector::singleton(table.rows(), r),
                                               MassVector::singleton(table.cols(), c),
                                               table);
                REQUIRE(out.singleton_index().has_value());
                CHECK(*out.singleton_index() == table.cell(r, c));
            }
        }
    };
    check_table(default_arm_table());      // 12 cells
    check_table(default_forearm_table());  // 6 cells
    check_table(default_modal_table());    // 24 cells
}

TEST_CASE("arm table: rear at horizon stays rear") {
    auto table = default_arm_table();
    auto out = evaluate_rule_table(MassVector::singleton(table.rows(), "rear"),
                                   MassVector::singleton(table.cols(), "horizon"),
                                   table);
    CHECK(out.at("rear") == 1.0);
}

TEST_CASE("spot-checked default table cells") {
    auto arm = default_arm_table();
    CHECK(arm.cell_term(arm.rows()->index_of("inside"),
                        arm.cols()->index_of("down")) == "down");
    CHECK(arm.cell_term(arm.rows()->index_of("outside"),
                        arm.cols()->index_of("horizon")) == "outside");

    auto forearm = default_forearm_table();
    CHECK(forearm.cell_term(forearm.rows()->index_of("vertical"),
                            forearm.cols()->index_of("middle")) == "vmiddle");
    CHECK(forearm.cell_term(forearm.rows()->index_of("horizontal"),
                            forearm.cols()->index_of("open")) == "open");

    auto modal = default_modal_table();
    CHECK(modal.cell_term(modal.rows()->index_of("front"),
                          modal.cols()->index_of("close")) == "frontfolded");
    CHECK(modal.cell_term(modal.rows()->index_of("up"),
                          modal.cols()->index_of("open")) == "up");
}

TEST_CASE("rule evaluation pushes the outer product through the cell map") {
    auto table = default_modal_table();
    std::mt19937 rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        auto row = testutil::random_sparse_masses(rng, table.rows());
        auto col = testutil::random_masses(rng, table.cols());
        auto got = evaluate_rule_table(row, col, table);

        // direct double-loop recomputation
        std::vector<double> want(table.out()->size(), 0.0);
        for (std::size_t r = 0; r < row.size(); ++r) {
            for (std::size_t c = 0; c < col.size(); ++c) {
                want[table.cell(r, c)] += row.masses()[r] * col.masses()[c];
            }
        }
        double sum = 0.0;
        for (std::size_t t = 0; t < want.size(); ++t) {
            CHECK(got.masses()[t] == doctest::Approx(want[t]).epsilon(1e-12));
            sum += got.masses()[t];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("stop-posture marginals combine to their reference joint cells") {
    auto table = default_modal_table();
    auto arm = make_mass_vector(
        table.rows(), {0.0, 0.1653, 0.7847, 0.0501, 0.0, 0.0});  // front, up, outside
    auto forearm = make_mass_vector(table.cols(), {0.4348, 0.0, 0.2378, 0.3274});
    auto joint = evaluate_rule_table(arm, forearm, table);

    CHECK(joint.at("front") == doctest::Approx(0.07187).epsilon(1e-3));
    CHECK(joint.at("up") == doctest::Approx(0.3411).epsilon(1e-3));
    CHECK(joint.at("outside") == doctest::Approx(0.02178).epsilon(1e-3));
    CHECK(joint.at("fronthmiddle") == doctest::Approx(0.03930).epsilon(1e-3));
    CHECK(joint.at("uphmiddle") == doctest::Approx(0.1866).epsilon(1e-3));
    CHECK(joint.at("outsidehmiddle") == doctest::Approx(0.01191).epsilon(1e-3));
    CHECK(joint.at("frontvmiddle") == doctest::Approx(0.05412).epsilon(1e-3));
    CHECK(joint.at("upvmiddle") == doctest::Approx(0.2569).epsilon(1e-3));
    CHECK(joint.at("outsidevmiddle") == doctest::Approx(0.01640).epsilon(1e-3));
}

TEST_CASE("measure_posture propagates exact modal poses to singletons") {
    auto model = PostureModel::defaults();

    SUBCASE("up + open") {
        auto s = skeleton_with_arm({0, 1, 0}, {0, 1, 0});
        auto lfs = measure_posture(s, model);
        REQUIRE(lfs.singleton_index().has_value());
        CHECK(lfs.lexicon()->term(*lfs.singleton_index()) == "up");
    }
    SUBCASE("front + close") {
        auto s = skeleton_with_arm({0, 0, 1}, {0, 0, -1});
        auto lfs = measure_posture(s, model);
        REQUIRE(lfs.singleton_index().has_value());
        CHECK(lfs.lexicon()->term(*lfs.singleton_index()) == "frontfolded");
    }
    SUBCASE("outside + open") {
        auto s = skeleton_with_arm({1, 0, 0}, {1, 0, 0});
        auto lfs = measure_posture(s, model);
        REQUIRE(lfs.singleton_index().has_value());
        CHECK(lfs.lexicon()->term(*lfs.singleton_index()) == "outside");
    }
}

TEST_CASE("measure_posture conserves mass for random skeletons") {
    auto model = PostureModel::defaults();
    std::mt19937 rng(61);
    for (int i = 0; i < 300; ++i) {
        auto lfs = measure_posture(testutil::random_skeleton(rng), model);
        double sum = 0.0;
        for (double m : lfs.masses()) {
            CHECK(m >= 0.0);
            sum += m;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("learn_reference averages samples") {
    auto modal = modal_posture_lexicon();

    SUBCASE("single sample is kept verbatim") {
        std::vector<MassVector> samples{MassVector::singleton(modal, "up")};
        auto ref = learn_reference(samples, "one", 0.2, ActionClass::classical, "act");
        CHECK(l1_distance(ref.lfs, samples[0]) == 0.0);
        CHECK(ref.name == "one");
        CHECK(ref.tolerance == 0.2);
        CHECK(ref.action_id == "act");
    }
    SUBCASE("mean of two singletons") {
        std::vector<MassVector> samples{MassVector::singleton(modal, "up"),
                                        MassVector::singleton(modal, "front")};
        auto ref = learn_reference(samples, "two", 0.0, ActionClass::emergency, "act");
        CHECK(ref.lfs.at("up") == doctest::Approx(0.5));
        CHECK(ref.lfs.at("front") == doctest::Approx(0.5));
        CHECK(ref.action_class == ActionClass::emergency);
    }
    SUBCASE("mean of identical samples is the sample") {
        std::mt19937 rng(67);
        auto sample = testutil::random_masses(rng, modal);
        std::vector<MassVector> samples(10, sample);
        auto ref = learn_reference(samples, "ten", 0.1, ActionClass::classical, "act");
        CHECK(l1_distance(ref.lfs, sample) <= 1e-12);
    }
    SUBCASE("errors") {
        std::vector<MassVector> empty;
        CHECK_THROWS_AS(
            learn_reference(empty, "x", 0.1, ActionClass::classical, "act"),
            std::invalid_argument);

        std::vector<MassVector> mixed{
            MassVector::singleton(modal, "up"),
            MassVector::singleton(make_lexicon("other", {"a", "b"}), "a")};
        CHECK_THROWS_AS(
            learn_reference(mixed, "x", 0.1, ActionClass::classical, "act"),
            std::invalid_argument);

        std::vector<MassVector> one{MassVector::singleton(modal, "up")};
        CHECK_THROWS_AS(learn_reference(one, "x", -1.0, ActionClass::classical, "act"),
                        std::invalid_argument);
    }
}

TEST_CASE("rule tables load from JSON with inferred or explicit outputs") {
    auto j = io::json::parse(R"({
        "rows": ["lo", "hi"],
        "cols": ["a", "b"],
        "cells": {"lo,a": "x", "lo,b": "y", "hi,a": "y", "hi,b": "x"}
    })");
    auto table = io::rule_table_from_json(j, "t");
    CHECK(table.cell_term(0, 0) == "x");
    CHECK(table.cell_term(1, 0) == "y");
    CHECK(table.out()->size() == 2);

    auto incomplete = io::json::parse(R"({
        "rows": ["lo", "hi"],
        "cols": ["a", "b"],
        "cells": {"lo,a": "x"}
    })");
    CHECK_THROWS_AS(io::rule_table_from_json(incomplete, "t"), std::invalid_argument);

    // default tables survive a JSON round trip
    auto modal = default_modal_table();
    auto reloaded = io::rule_table_from_json(io::rule_table_to_json(modal), "modal");
    for (std::size_t r = 0; r < modal.rows()->size(); ++r) {
        for (std::size_t c = 0; c < modal.cols()->size(); ++c) {
            CHECK(reloaded.cell_term(r, c) == modal.cell_term(r, c));
        }
    }
}

TEST_CASE("reference stores round-trip through JSON") {
    auto modal = modal_posture_lexicon();
    std::mt19937 rng(71);
    std::vector<ReferencePosture> refs;
    refs.push_back(ReferencePosture{"stop", testutil::random_masses(rng, modal), 0.5,
                                    ActionClass::emergency, "halt"});
    refs.push_back(ReferencePosture{"point", testutil::random_masses(rng, modal), 0.1,
                                    ActionClass::classical, "aim"});

    auto reloaded = io::store_from_json(io::store_to_json(refs), modal);
    REQUIRE(reloaded.size() == 2);
    CHECK(reloaded[0].name == "stop");
    CHECK(reloaded[0].action_class == ActionClass::emergency);
    CHECK(reloaded[0].tolerance == 0.5);
    CHECK(l1_distance(reloaded[0].lfs, refs[0].lfs) <= 1e-12);
    CHECK(reloaded[1].action_id == "aim");

    auto dup = io::store_to_json(refs);
    dup.push_back(dup[0]);
    CHECK_THROWS_AS(io::store_from_json(dup, modal), std::invalid_argument);
}

TEST_CASE("model config documents override any subset of the defaults") {
    auto config = io::model_config_from_json(io::json::parse(R"({
        "partitions": {
            "a_theta": {"lexicon": ["down", "horizon", "up"],
                         "modal_angles": {"down": 0, "horizon": 60, "up": 120},
                         "circular": false}
        },
        "ground": {"max_dist": 2.25, "shoulder_min": 1.0, "elbow_min": 0.5},
        "decision": {"strategy": "tolerance_overlap"}
    })"));
    CHECK(config.model.a_theta.modal_angles()[1] == 60.0);
    CHECK(config.model.a_psi.circular());  // untouched default
    CHECK(config.decision.strategy == Strategy::tolerance_overlap);

    double max_all = 0.0;
    for (const auto& row : config.ground.matrix()) {
        for (double d : row) max_all = std::max(max_all, d);
    }
    CHECK(max_all == 2.25);

    // overridden partition shifts where the singleton sits
    auto exact = measure_posture(
        AngleQuadruple{60.0, 0.0, 180.0, 0.0}, config.model);
    REQUIRE(exact.singleton_index().has_value());
    CHECK(exact.lexicon()->term(*exact.singleton_index()) == "front");

    // empty document reproduces the built-in defaults
    auto defaults = io::model_config_from_json(io::json::object());
    CHECK(defaults.model.a_theta.modal_angles()[1] == 90.0);
    CHECK(defaults.ground.at(0, 0) == 0.0);

    // a table override that does not compose with the partitions is rejected
    CHECK_THROWS_AS(io::model_config_from_json(io::json::parse(R"({
        "tables": {"arm": {"rows": ["x"], "cols": ["y"], "cells": {"x,y": "z"}}}
    })")),
                    std::invalid_argument);
}

TEST_CASE("skeleton frames parse from JSON lines") {
    auto j = io::json::parse(R"({
        "frame": 3,
        "joints": {
            "torso": [0, 0, 0],
            "left_shoulder": [-0.15, 0.5, 0],
            "right_shoulder": [0.15, 0.5, 0],
            "right_elbow": [0.15, 0.2, 0],
            "right_wrist": [0.15, -0.05, 0]
        }
    })");
    auto frame = io::skeleton_frame_from_json(j);
    CHECK(frame.frame == 3);
    CHECK_NOTHROW(frame.skeleton.validate());

    auto bad = io::json::parse(R"({"frame": 1, "joints": {"torso": [1, 2]}})");
    CHECK_THROWS_AS(io::skeleton_frame_from_json(bad), std::invalid_argument);
}
