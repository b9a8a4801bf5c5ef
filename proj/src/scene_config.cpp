#include "slimegate/scene_config.hpp"

#include "slimegate/config.hpp"

namespace slimegate {

namespace {

std::string summarize(const std::vector<Violation>& violations) {
    std::string msg = "scene violates " + std::to_string(violations.size()) + " invariant(s)";
    for (const auto& v : violations) msg += "; " + v.object + ": " + v.message;
    return msg;
}

}  // namespace

SceneValidationError::SceneValidationError(std::vector<Violation> violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

Scene scene_from_config(std::string_view text) {
    const ConfigDocument doc = parse_config(text);
    Scene scene;
    doc.root.expect_only({"dish_diameter", "time_scale"});
    scene.dish_diameter = doc.root.number("dish_diameter", scene.dish_diameter);
    scene.time_scale = doc.root.number("time_scale", scene.time_scale);

    for (const auto& b : doc.blocks) {
        if (b.kind == "electrode") {
            b.expect_only({"id", "center", "size"});
            Electrode e;
            e.id = b.required_text("id");
            e.center = b.required_point("center");
            e.size = b.point("size", e.size);
            scene.electrodes.push_back(std::move(e));
        } else if (b.kind == "agar") {
            b.expect_only({"center", "radius", "volume", "resistance", "initial_moisture"});
            AgarBlob a;
            a.center = b.required_point("center");
            a.radius = b.number("radius", a.radius);
            a.volume = b.number("volume", a.volume);
            a.resistance = b.number("resistance", a.resistance);
            a.initial_moisture = b.number("initial_moisture", a.initial_moisture);
            scene.agar_blobs.push_back(a);
        } else if (b.kind == "attractant") {
            b.expect_only({"center", "strength", "kind"});
            AttractantSource s;
            s.center = b.required_point("center");
            s.strength = b.number("strength", s.strength);
            s.kind = b.text("kind", s.kind);
            scene.attractants.push_back(std::move(s));
        } else if (b.kind == "barrier") {
            b.expect_only({"from", "to", "gap_height", "light_transmission", "passable"});
            Barrier w;
            w.segment = {b.required_point("from"), b.required_point("to")};
            w.gap_height = b.number("gap_height", w.gap_height);
            w.light_transmission = b.number("light_transmission", w.light_transmission);
            w.passable_by_plasmodium = b.boolean("passable", w.passable_by_plasmodium);
            scene.barriers.push_back(w);
        } else if (b.kind == "led") {
            b.expect_only({"id", "position", "wavelength", "luminosity", "channel"});
            Led led;
            led.id = b.required_text("id");
            led.position = b.required_point("position");
            led.wavelength = b.number("wavelength", led.wavelength);
            led.luminosity = b.number("luminosity", led.luminosity);
            led.channel = b.required_text("channel");
            scene.leds.push_back(std::move(led));
        } else {
            throw ConfigError(b.line, b.kind, "unknown object kind");
        }
    }

    auto violations = validate_scene(scene);
    if (!violations.empty()) throw SceneValidationError(std::move(violations));
    return scene;
}

std::string emit_config(const Scene& input) {
    const Scene scene = canonicalize(input);
    ConfigWriter w;
    w.number("dish_diameter", scene.dish_diameter);
    w.number("time_scale", scene.time_scale);
    for (const auto& e : scene.electrodes) {
        w.block("electrode");
        w.text("id", e.id);
        w.point("center", e.center);
        w.point("size", e.size);
    }
    for (const auto& a : scene.agar_blobs) {
        w.block("agar");
        w.point("center", a.center);
        w.number("radius", a.radius);
        w.number("volume", a.volume);
        w.number("resistance", a.resistance);
        w.number("initial_moisture", a.initial_moisture);
    }
    for (const auto& s : scene.attractants) {
        w.block("attractant");
        w.point("center", s.center);
        w.number("strength", s.strength);
        w.text("kind", s.kind);
    }
    for (const auto& b : scene.barriers) {
        w.block("barrier");
        w.point("from", b.segment.a);
        w.point("to", b.segment.b);
        w.number("gap_height", b.gap_height);
        w.number("light_transmission", b.light_transmission);
        w.boolean("passable", b.passable_by_plasmodium);
    }
    for (const auto& led : scene.leds) {
        w.block("led");
        w.text("id", led.id);
        w.point("position", led.position);
        w.number("wavelength", led.wavelength);
        w.number("luminosity", led.luminosity);
        w.text("channel", led.channel);
    }
    return w.str();
}

std::string scene_digest(const Scene& scene) { return digest_hex(emit_config(scene)); }

}  // namespace slimegate
