#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slimegate {

struct PhobiaAnchor {
    double wavelength;  // nm
    double weight;
    bool operator==(const PhobiaAnchor&) const = default;
};

/// Every free parameter of the model in one auditable record. Lengths are
/// in mm, times in ticks (simulated minutes at the default time scale).
struct Calibration {
    // Photoavoidance weights per LED colour, ordered by wavelength.
    std::array<PhobiaAnchor, 4> phobia{{{466.0, 0.10}, {568.0, 2.40}, {585.0, 0.58}, {626.0, 0.70}}};

    // Grid and chemoattractant transport.
    double cells_per_mm = 1.0;
    double attractant_diffusion = 0.20;   // mm^2 per tick
    double attractant_decay = 0.0005;     // fraction per tick
    double field_refresh_ticks = 20.0;    // attractant timeline sampling interval

    // Light.
    double led_height = 12.0;             // softening length of the point-source falloff
    double light_gain = 10.0;             // repulsion per (weight * irradiance / 1000 mcd)

    // Moisture.
    double desiccation_horizon = 5760.0;  // ticks until a reference blob is no longer viable
    double viability_threshold = 0.2;
    double reference_volume = 2.0;        // ml; horizon scales linearly with blob volume
    double moisture_refresh_ticks = 10.0;

    // Agent motion and sensing.
    double mass = 200.0;
    double sensor_angle = 0.6;            // rad
    double sensor_offset = 3.0;
    double rotation = 0.45;               // rad per tick towards the best sensor
    double jitter = 0.30;                 // rad, standard deviation
    double step_length = 0.12;
    double explore_step_probability = 0.3;
    double attractant_gain = 1.0;
    double trail_gain = 0.5;              // steering pull of a saturated trail
    double trail_saturation = 20.0;       // trail level giving half the pull
    double residue_gain = 50.0;
    double home_gain = 0.5;
    double steering_gain = 8.0;           // sharpness of the noisy arg-max over sensor potentials
    double food_dwell_ticks = 120.0;      // mean stay on a food blob before streaming home

    // Trail.
    double deposit = 1.0;
    double trail_decay = 0.01;            // fraction per tick
    double tube_threshold = 8.0;          // trail level treated as plasmodial tube

    // Reluctance on the inoculation blob.
    double settle_ticks = 1440.0;
    double forage_reserve = 2880.0;       // ticks of exploration at unit vigour and signal
    double vigour_sigma = 0.6;            // log-normal spread of per-run vigour
    double signal_reference = 0.6;        // attractant level at the blob margin that gives unit drive
    double signal_cap = 3.0;

    // Withdrawal and reset.
    double withdraw_step_length = 0.035;
    double withdraw_occupancy = 0.05;     // fraction of the initial lit-region occupancy that ends withdrawal
    double fragmentation_probability = 0.15;
    double residue_strength = 1.0;

    // Completion and electrical model.
    double completion_hold_ticks = 30.0;
    double tube_resistance = 5000.0;      // ohm, canonical tube across a 10 mm gap
    double tube_reference_trail = 40.0;   // mean trail level of the canonical tube

    // Overvoltage morphology.
    double overvoltage_threshold = 12.0;  // volts
    double overvoltage_jitter_gain = 1.0; // extra jitter per 12 V above threshold
    double overvoltage_deposit_gain = 0.5;
    double overvoltage_lane_turn = 0.6;   // rad per tick of persistent lateral turn at 12 V above threshold

    bool operator==(const Calibration&) const = default;

    static Calibration defaults() { return {}; }
};

struct CalibrationField {
    std::string_view key;
    double Calibration::*member;
};

/// Named scalar parameters, in emission order (phobia anchors excluded).
std::span<const CalibrationField> calibration_fields();

/// Lists broken invariants (weights > 0, probabilities in [0, 1], ...).
std::vector<std::string> check_calibration(const Calibration& c);

Calibration calibration_from_config(std::string_view text);
std::string emit_calibration(const Calibration& c);
std::string calibration_digest(const Calibration& c);

}  // namespace slimegate
