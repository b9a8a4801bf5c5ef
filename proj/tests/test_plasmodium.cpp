#include "doctest.h"

#include "slimegate/gates.hpp"
#include "slimegate/plasmodium.hpp"

using namespace slimegate;

TEST_CASE("inoculation places every agent on the blob under the electrode") {
    const Scene scene = build_pnot().scene;
    const Calibration c;
    const PlasmodiumState s = inoculate(scene, "X", 200, 3, c);
    CHECK(s.agents.size() == 200);
    CHECK(s.total_mass == 200);
    CHECK(s.mode == Mode::exploring);
    const AgarBlob& blob = scene.agar_blobs[scene.blob_for_electrode("X")];
    for (const auto& a : s.agents) {
        CHECK(blob.contains(a.position));
        CHECK(a.heading >= 0.0);
        CHECK(a.heading < 2.0 * std::numbers::pi);
    }
    CHECK(occupancy(s, Disc{blob.center, blob.radius}) == 1.0);
    CHECK(occupancy(s, Disc{{40.0, 0.0}, 1.0}) == 0.0);
    CHECK(s == inoculate(scene, "X", 200, 3, c));
    CHECK_FALSE(s == inoculate(scene, "X", 200, 4, c));
    CHECK_THROWS_AS(inoculate(scene, "nope", 10, 1, c), PlasmodiumError);
}

TEST_CASE("the mode graph") {
    CHECK(transition_allowed(Mode::exploring, Mode::migrating));
    CHECK(transition_allowed(Mode::migrating, Mode::withdrawing));
    CHECK(transition_allowed(Mode::migrating, Mode::exploring));
    CHECK(transition_allowed(Mode::withdrawing, Mode::exploring));
    CHECK(transition_allowed(Mode::withdrawing, Mode::sclerotized));
    CHECK(transition_allowed(Mode::withdrawing, Mode::fragmented));
    CHECK(transition_allowed(Mode::exploring, Mode::sclerotized));
    CHECK_FALSE(transition_allowed(Mode::exploring, Mode::fragmented));
    CHECK_FALSE(transition_allowed(Mode::sclerotized, Mode::exploring));
    CHECK_FALSE(transition_allowed(Mode::fragmented, Mode::withdrawing));
    for (Mode m : {Mode::exploring, Mode::migrating, Mode::withdrawing, Mode::sclerotized, Mode::fragmented}) {
        CHECK(mode_from_string(to_string(m)) == m);
    }
    CHECK_FALSE(mode_from_string("asleep").has_value());
    CHECK(is_terminal(Mode::sclerotized));
    CHECK(is_terminal(Mode::fragmented));
    CHECK_FALSE(is_terminal(Mode::withdrawing));

    PlasmodiumState s = inoculate(build_pnot().scene, "X", 10, 1);
    set_mode(s, Mode::migrating);
    CHECK_THROWS(set_mode(s, Mode::fragmented));
    REQUIRE(s.history.size() == 1);
    CHECK(s.history[0].from == Mode::exploring);
    CHECK(s.history[0].to == Mode::migrating);
}

TEST_CASE("trail grid decay through the shared scale") {
    GridSpec spec;
    spec.width = 4;
    spec.height = 1;
    TrailGrid t(spec);
    t.deposit(1, 10.0);
    for (int n = 0; n < 3000; ++n) t.decay(0.99);
    CHECK(t.value(1) == doctest::Approx(10.0 * std::pow(0.99, 3000)).epsilon(1e-9));
    t.deposit(2, 5.0);
    CHECK(t.value(2) == doctest::Approx(5.0));
    CHECK(t.materialize().values[2] == doctest::Approx(5.0));
}

TEST_CASE("stepping is deterministic and keeps the mass") {
    const GateHarness h = build_pnot();
    const Calibration c;
    const StimulusFields fields = make_fields(h.scene, c);
    const StepPotentials pot = compute_potentials(h.scene, fields, c, h.scene.blob_for_electrode("X"));
    const StepContext ctx{h.scene, fields, pot, c, 9.0};
    PlasmodiumState a = inoculate(h.scene, "X", 100, 11, c);
    PlasmodiumState b = a;
    step_in_place(a, ctx, 200);
    for (int n = 0; n < 200; ++n) step_in_place(b, ctx, 1);
    CHECK(a == b);
    CHECK(a.agents.size() == 100);
    CHECK(a.age == 200);
    for (const auto& agent : a.agents) CHECK(h.scene.inside_dish(agent.position));
    CHECK(a.trail.materialize().sum() > 0.0);
}

TEST_CASE("withdrawal from a lit region and terminal states") {
    const GateHarness h = build_pnot();
    const Calibration c;
    PlasmodiumState s = inoculate(h.scene, "X", 50, 2, c);
    const AgarBlob& blob = h.scene.agar_blobs[h.scene.blob_for_electrode("X")];
    // Nobody on the Y blob: no-op.
    const AgarBlob& far = h.scene.agar_blobs[h.scene.blob_for_electrode("Y")];
    trigger_withdrawal_in_place(s, Disc{far.center, far.radius}, c);
    CHECK(s.mode == Mode::exploring);
    set_mode(s, Mode::migrating);
    trigger_withdrawal_in_place(s, Disc{blob.center, blob.radius}, c);
    CHECK(s.mode == Mode::withdrawing);
    CHECK(s.withdrawal_start_occupancy == 1.0);
    set_mode(s, Mode::sclerotized);
    const StimulusFields fields = make_fields(h.scene, c);
    const StepPotentials pot = compute_potentials(h.scene, fields, c, 0);
    CHECK_THROWS_AS(step_in_place(s, StepContext{h.scene, fields, pot, c, 9.0}), PlasmodiumError);
}
