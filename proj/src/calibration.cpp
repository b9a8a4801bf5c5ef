#include "slimegate/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "slimegate/config.hpp"

namespace slimegate {

namespace {

constexpr CalibrationField kFields[] = {
    {"cells_per_mm", &Calibration::cells_per_mm},
    {"attractant_diffusion", &Calibration::attractant_diffusion},
    {"attractant_decay", &Calibration::attractant_decay},
    {"field_refresh_ticks", &Calibration::field_refresh_ticks},
    {"led_height", &Calibration::led_height},
    {"light_gain", &Calibration::light_gain},
    {"desiccation_horizon", &Calibration::desiccation_horizon},
    {"viability_threshold", &Calibration::viability_threshold},
    {"reference_volume", &Calibration::reference_volume},
    {"moisture_refresh_ticks", &Calibration::moisture_refresh_ticks},
    {"mass", &Calibration::mass},
    {"sensor_angle", &Calibration::sensor_angle},
    {"sensor_offset", &Calibration::sensor_offset},
    {"rotation", &Calibration::rotation},
    {"jitter", &Calibration::jitter},
    {"step_length", &Calibration::step_length},
    {"explore_step_probability", &Calibration::explore_step_probability},
    {"attractant_gain", &Calibration::attractant_gain},
    {"trail_gain", &Calibration::trail_gain},
    {"trail_saturation", &Calibration::trail_saturation},
    {"residue_gain", &Calibration::residue_gain},
    {"home_gain", &Calibration::home_gain},
    {"steering_gain", &Calibration::steering_gain},
    {"food_dwell_ticks", &Calibration::food_dwell_ticks},
    {"deposit", &Calibration::deposit},
    {"trail_decay", &Calibration::trail_decay},
    {"tube_threshold", &Calibration::tube_threshold},
    {"settle_ticks", &Calibration::settle_ticks},
    {"forage_reserve", &Calibration::forage_reserve},
    {"vigour_sigma", &Calibration::vigour_sigma},
    {"signal_reference", &Calibration::signal_reference},
    {"signal_cap", &Calibration::signal_cap},
    {"withdraw_step_length", &Calibration::withdraw_step_length},
    {"withdraw_occupancy", &Calibration::withdraw_occupancy},
    {"fragmentation_probability", &Calibration::fragmentation_probability},
    {"residue_strength", &Calibration::residue_strength},
    {"completion_hold_ticks", &Calibration::completion_hold_ticks},
    {"tube_resistance", &Calibration::tube_resistance},
    {"tube_reference_trail", &Calibration::tube_reference_trail},
    {"overvoltage_threshold", &Calibration::overvoltage_threshold},
    {"overvoltage_jitter_gain", &Calibration::overvoltage_jitter_gain},
    {"overvoltage_deposit_gain", &Calibration::overvoltage_deposit_gain},
    {"overvoltage_lane_turn", &Calibration::overvoltage_lane_turn},
};

std::string phobia_key(double wavelength) {
    return "phobia_" + std::to_string(static_cast<long>(std::lround(wavelength)));
}

}  // namespace

std::span<const CalibrationField> calibration_fields() { return kFields; }

std::vector<std::string> check_calibration(const Calibration& c) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < c.phobia.size(); ++i) {
        if (!(c.phobia[i].weight > 0.0)) out.push_back(phobia_key(c.phobia[i].wavelength) + " must be > 0");
        if (i > 0 && !(c.phobia[i].wavelength > c.phobia[i - 1].wavelength)) {
            out.push_back("phobia anchors must be sorted by wavelength");
        }
    }
    auto unit = [&](std::string_view name, double v) {
        if (!(v >= 0.0 && v <= 1.0)) out.push_back(std::string(name) + " must lie in [0, 1]");
    };
    unit("fragmentation_probability", c.fragmentation_probability);
    unit("explore_step_probability", c.explore_step_probability);
    unit("viability_threshold", c.viability_threshold);
    unit("withdraw_occupancy", c.withdraw_occupancy);
    unit("trail_decay", c.trail_decay);
    unit("attractant_decay", c.attractant_decay);
    auto positive = [&](std::string_view name, double v) {
        if (!(v > 0.0)) out.push_back(std::string(name) + " must be > 0");
    };
    positive("cells_per_mm", c.cells_per_mm);
    positive("mass", c.mass);
    positive("step_length", c.step_length);
    positive("withdraw_step_length", c.withdraw_step_length);
    positive("desiccation_horizon", c.desiccation_horizon);
    positive("reference_volume", c.reference_volume);
    positive("tube_threshold", c.tube_threshold);
    positive("food_dwell_ticks", c.food_dwell_ticks);
    positive("trail_saturation", c.trail_saturation);
    positive("tube_resistance", c.tube_resistance);
    positive("tube_reference_trail", c.tube_reference_trail);
    positive("led_height", c.led_height);
    positive("field_refresh_ticks", c.field_refresh_ticks);
    positive("moisture_refresh_ticks", c.moisture_refresh_ticks);
    positive("signal_reference", c.signal_reference);
    if (!(c.viability_threshold > 0.0)) out.push_back("viability_threshold must be > 0");
    return out;
}

Calibration calibration_from_config(std::string_view text) {
    const ConfigDocument doc = parse_config(text);
    if (!doc.blocks.empty()) throw ConfigError(doc.blocks.front().line, doc.blocks.front().kind, "calibration has no blocks");
    Calibration c;
    for (const auto& entry : doc.root.entries) {
        const auto* v = std::get_if<double>(&entry.value);
        if (v == nullptr) throw ConfigError(entry.line, entry.key, "expected a number");
        bool known = false;
        for (auto& anchor : c.phobia) {
            if (entry.key == phobia_key(anchor.wavelength)) {
                anchor.weight = *v;
                known = true;
            }
        }
        for (const auto& f : kFields) {
            if (entry.key == f.key) {
                c.*f.member = *v;
                known = true;
            }
        }
        if (!known) throw ConfigError(entry.line, entry.key, "unknown calibration key");
    }
    const auto problems = check_calibration(c);
    if (!problems.empty()) throw ConfigError(0, "calibration", problems.front());
    return c;
}

std::string emit_calibration(const Calibration& c) {
    ConfigWriter w;
    for (const auto& anchor : c.phobia) w.number(phobia_key(anchor.wavelength), anchor.weight);
    for (const auto& f : kFields) w.number(f.key, c.*f.member);
    return w.str();
}

std::string calibration_digest(const Calibration& c) { return digest_hex(emit_calibration(c)); }

}  // namespace slimegate
