#include "doctest.h"

#include "slimegate/gates.hpp"

using namespace slimegate;

TEST_CASE("input and script parsing") {
    CHECK(parse_inputs("A=1,B=0") == InputBits{{"A", 1}, {"B", 0}});
    CHECK(parse_inputs(" A = 0 ") == InputBits{{"A", 0}});
    CHECK(format_inputs({{"B", 1}, {"A", 0}}) == "A=0,B=1");
    CHECK_THROWS_AS(parse_inputs("A=2"), GateError);
    CHECK_THROWS_AS(parse_inputs("A"), GateError);
    CHECK_THROWS_AS(parse_inputs("A=1,A=0"), GateError);

    const GateHarness pnot = build_pnot();
    CHECK_NOTHROW(check_inputs(pnot, {{"A", 1}}));
    CHECK_THROWS_AS(check_inputs(pnot, {{"A", 1}, {"B", 0}}), GateError);
    CHECK_THROWS_AS(check_inputs(pnot, {}), GateError);

    const auto script = parse_script("# reset\n0 A=0\n2000 A=1\n");
    REQUIRE(script.size() == 2);
    CHECK(script[1].tick == 2000);
    CHECK(script[1].inputs == InputBits{{"A", 1}});
    CHECK(parse_script(format_script(script)) == script);
    CHECK_THROWS_AS(parse_script("10 A=1\n5 A=0\n"), GateError);
    CHECK_THROWS_AS(parse_script("x A=1\n"), GateError);
}

TEST_CASE("ideal truth tables and input rows") {
    CHECK(ideal_output(GateKind::pnot, {{"A", 0}}) == 1);
    CHECK(ideal_output(GateKind::pnot, {{"A", 1}}) == 0);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) CHECK(ideal_output(GateKind::pnand, {{"A", a}, {"B", b}}) == !(a && b));
    }
    const auto rows = input_rows(build_pnand());
    REQUIRE(rows.size() == 4);
    CHECK(rows[1] == InputBits{{"A", 0}, {"B", 1}});
    CHECK(rows[2] == InputBits{{"A", 1}, {"B", 0}});
    CHECK(gate_kind_from_string("pnand") == GateKind::pnand);
    CHECK_FALSE(gate_kind_from_string("xor").has_value());
}

TEST_CASE("gate layouts") {
    const GateHarness pnot = build_pnot();
    CHECK(check_harness(pnot).empty());
    CHECK(pnot.target_electrodes == std::vector<std::string>{"Y"});
    const auto* x = pnot.scene.find_electrode("X");
    const auto* y = pnot.scene.find_electrode("Y");
    // Edge-to-edge gap of 10 mm between 8 mm footprints.
    CHECK(distance(x->center, y->center) - 8.0 == doctest::Approx(10.0));
    const GateHarness wide = build_pnot(20.0, 24.0);
    CHECK(distance(wide.scene.find_electrode("X")->center, wide.scene.find_electrode("Y")->center) - 8.0 ==
          doctest::Approx(20.0));
    CHECK(wide.output.supply_voltage == 24.0);
    const GateHarness pnand = build_pnand();
    CHECK(check_harness(pnand).empty());
    CHECK(pnand.target_electrodes.size() == 2);
    CHECK(pnand.inputs.size() == 2);
    for (const auto& led : pnand.scene.leds) CHECK(led.wavelength == 568.0);
}

TEST_CASE("median") {
    CHECK_FALSE(median({}).has_value());
    CHECK(*median({3.0}) == 3.0);
    CHECK(*median({4.0, 1.0, 3.0}) == 3.0);
    CHECK(*median({4.0, 1.0, 3.0, 2.0}) == 2.5);
}

TEST_CASE("netlists and cascade arithmetic") {
    const Netlist ha = half_adder_netlist();
    CHECK(ha.gates.size() == 7);
    const CascadeEstimate e = estimate_cascade(ha, 90.0);
    CHECK(e.gates == 7);
    CHECK(e.depth == 3);
    const double side = (90.0 + kCascadeMargin) / 1000.0;
    CHECK(e.area_m2 == doctest::Approx(7 * side * side));
    CHECK(e.delay_ticks == doctest::Approx(3 * kMedianGateDelay));

    const Netlist parsed = parse_netlist("input a b\noutput y\nnand y a b\n");
    CHECK(parsed.gates == std::vector<NandGate>{{"y", "a", "b"}});
    CHECK(estimate_cascade(parsed, 90.0).depth == 1);
    CHECK_THROWS_AS(estimate_cascade(parse_netlist("input a\noutput y\nnand y a z\n"), 90.0), NetlistError);
    CHECK_THROWS_AS(estimate_cascade(parse_netlist("input a\noutput y\nnand y a w\nnand w y a\n"), 90.0),
                    NetlistError);
    try {
        parse_netlist("input a\nbogus line\n");
        FAIL("expected a parse error");
    } catch (const NetlistError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("a lit PNOT never conducts and runs are reproducible") {
    const GateHarness h = build_pnot();
    const auto arena = Arena::build(h.scene, Calibration{}, 2 * h.budget);
    const GateOutcome lit = run_gate(h, arena, {{"A", 1}}, 3);
    CHECK(lit.logic_output == 0);
    const GateOutcome a = run_gate(h, arena, {{"A", 0}}, 7);
    const GateOutcome b = run_gate(h, arena, {{"A", 0}}, 7);
    CHECK(a == b);
    if (a.completed) {
        CHECK(a.target == "Y");
        REQUIRE(a.propagation_delay.has_value());
        CHECK(*a.propagation_delay > 0);
        CHECK(a.final_reading.resistance.has_value());
        CHECK(*a.final_reading.resistance > 36000.0);
        CHECK(a.logic_output == a.final_reading.logic_level);
    }
}

TEST_CASE("scripted runs and resets") {
    const GateHarness h = build_pnot();
    const auto arena = Arena::build(h.scene, Calibration{}, 4 * h.budget);
    GateRun run(h, arena, {{"A", 0}}, 7);
    const GateOutcome& first = run.finish_segment();
    REQUIRE(first.completed);
    const long at = run.tick();
    const GateOutcome reset = reset_gate(run, {{"A", 1}});
    CHECK(reset.start_tick == at);
    CHECK(reset.logic_output == 0);

    const auto script = parse_script("0 A=0\n" + std::to_string(at) + " A=1\n");
    const GateOutcome scripted = run_script(h, arena, {{"A", 0}}, script, 7);
    CHECK(scripted.logic_output == reset.logic_output);
    CHECK(scripted.end_tick == reset.end_tick);
    CHECK(scripted.final_mode == reset.final_mode);
}
