#include "doctest.h"

#include "slimegate/experiments.hpp"

using namespace slimegate;

TEST_CASE("two-proportion z-test against hand-computed values") {
    // 30/40 against 15/40: pooled 0.5625, se 0.110926.
    const ZTest t = two_proportion_z_test(30, 40, 15, 40);
    CHECK(t.z == doctest::Approx(3.3806170189140663).epsilon(1e-12));
    CHECK(t.p == doctest::Approx(0.0007232327164301555).epsilon(1e-9));
    const ZTest flipped = two_proportion_z_test(15, 40, 30, 40);
    CHECK(flipped.z == doctest::Approx(-t.z));
    CHECK(flipped.p == doctest::Approx(t.p));
    const ZTest same = two_proportion_z_test(10, 40, 10, 40);
    CHECK(same.z == 0.0);
    CHECK(same.p == doctest::Approx(1.0));
    CHECK(two_proportion_z_test(0, 40, 0, 40).p == 1.0);
    CHECK_THROWS_AS(two_proportion_z_test(5, 4, 1, 4), ExperimentError);
    CHECK_THROWS_AS(two_proportion_z_test(1, 0, 1, 4), ExperimentError);
}

TEST_CASE("colour names") {
    CHECK(colour_name(466.0) == "blue");
    CHECK(colour_name(626.0) == "red");
    CHECK(parse_colour("green") == 568.0);
    CHECK(parse_colour("585") == 585.0);
    CHECK_FALSE(parse_colour("mauve").has_value());
    for (double w : kLedColours) CHECK(parse_colour(colour_name(w)) == w);
}

TEST_CASE("phototaxis arena layout") {
    const GateHarness h = phototaxis_harness(466.0, 626.0);
    CHECK(h.scene.electrodes.size() == 3);
    CHECK(h.scene.leds.size() == 4);
    int blue = 0;
    int red = 0;
    for (const auto& led : h.scene.leds) {
        blue += led.wavelength == 466.0;
        red += led.wavelength == 626.0;
        CHECK(led.luminosity == 180.0);
    }
    CHECK(blue == 2);
    CHECK(red == 2);
    // Mirror-symmetric: pole A west, pole B east.
    CHECK(h.scene.find_electrode("A")->center.x == -h.scene.find_electrode("B")->center.x);
    const InputBits lit = phototaxis_inputs(466.0, 626.0);
    for (const auto& [channel, bit] : lit) CHECK(bit == 1);
    const InputBits dark = phototaxis_inputs(0.0, 626.0);
    int on = 0;
    for (const auto& [channel, bit] : dark) on += bit;
    CHECK(on == 1);
}

TEST_CASE("phototaxis trials are deterministic") {
    const auto arena = phototaxis_arena(Calibration{});
    const auto a = phototaxis_trial(466.0, 568.0, 5, arena);
    const auto b = phototaxis_trial(466.0, 568.0, 5, arena);
    CHECK(a == b);
    CHECK(a.occupancy_a >= 0.0);
    CHECK(a.occupancy_a + a.occupancy_b <= 1.0 + 1e-12);
    if (a.choice != Choice::neither) CHECK(a.decided_at < PhototaxisOptions{}.budget);
}

TEST_CASE("ranking tallies add up") {
    Ranking r;
    r.order = {{568.0, 10}, {626.0, 6}, {585.0, 5}, {466.0, 1}};
    CHECK(r.min_gap() == 1);
    const Ranking tiny = rank_colours(1, 3);
    CHECK(tiny.pairs.size() == 6);
    CHECK(tiny.order.size() == 4);
    int points = 0;
    int decided = 0;
    for (const auto& s : tiny.order) points += s.phobia_points;
    for (const auto& p : tiny.pairs) {
        CHECK(p.chose_a + p.chose_b + p.neither == 1);
        decided += p.chose_a + p.chose_b;
    }
    CHECK(points == decided);
    CHECK(tiny.decided == decided);
    CHECK(tiny.records.size() == 6);
    for (std::size_t i = 1; i < tiny.order.size(); ++i) {
        CHECK(tiny.order[i - 1].phobia_points >= tiny.order[i].phobia_points);
    }
}

TEST_CASE("fault harness variables") {
    CHECK(fault_variable_from_string("gap") == FaultVariable::gap);
    CHECK_FALSE(fault_variable_from_string("humidity").has_value());
    const GateHarness gap = fault_harness(GateKind::pnot, FaultVariable::gap, 20.0);
    CHECK(gap == build_pnot(20.0, 9.0));
    const GateHarness volts = fault_harness(GateKind::pnand, FaultVariable::voltage, 24.0);
    CHECK(volts == build_pnand(10.0, 24.0));
    const GateHarness lum = fault_harness(GateKind::pnot, FaultVariable::luminosity, 50.0);
    const GateHarness base = build_pnot();
    REQUIRE(lum.scene.leds.size() == base.scene.leds.size());
    for (std::size_t i = 0; i < lum.scene.leds.size(); ++i) {
        CHECK(lum.scene.leds[i].luminosity == base.scene.leds[i].luminosity + 50.0);
    }
}

TEST_CASE("calibration without targets returns the start point") {
    Calibration start;
    start.vigour_sigma = 0.7;
    const CalibrationFit fit = calibrate(start, {});
    CHECK(fit.calibration == start);
    CHECK(fit.satisfied());
    CHECK(fit.residuals.empty());
    CHECK_THROWS_AS(target_residuals(start, {{"nonsense", 1.0, 0.0}}, 1, 1), ExperimentError);
}
