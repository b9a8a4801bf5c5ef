#pragma once

#include <string>
#include <vector>

#include "slimegate/geometry.hpp"

namespace slimegate {

struct Electrode {
    std::string id;
    Vec2 center;
    Vec2 size{8.0, 8.0};  // footprint extent, mm

    Rect footprint() const { return {center, size}; }
    bool operator==(const Electrode&) const = default;
};

struct AgarBlob {
    Vec2 center;
    double radius = 5.0;           // mm
    double volume = 2.0;           // ml
    double resistance = 18000.0;   // ohm
    double initial_moisture = 1.0;

    bool contains(Vec2 p) const { return distance_squared(p, center) <= radius * radius; }
    bool operator==(const AgarBlob&) const = default;
};

struct AttractantSource {
    Vec2 center;
    double strength = 1.0;  // concentration units per tick
    std::string kind = "oat flake";
    bool operator==(const AttractantSource&) const = default;
};

struct Barrier {
    Segment segment;
    double gap_height = 0.5;  // mm
    double light_transmission = 0.05;
    bool passable_by_plasmodium = true;
    bool operator==(const Barrier&) const = default;
};

struct Led {
    std::string id;
    Vec2 position;
    double wavelength = 568.0;   // nm
    double luminosity = 1000.0;  // mcd
    std::string channel;         // input channel this LED is bound to
    bool operator==(const Led&) const = default;
};

struct Scene {
    double dish_diameter = 90.0;  // mm
    double time_scale = 1.0;      // simulated minutes per tick
    std::vector<Electrode> electrodes;
    std::vector<AgarBlob> agar_blobs;
    std::vector<AttractantSource> attractants;
    std::vector<Barrier> barriers;
    std::vector<Led> leds;

    bool operator==(const Scene&) const = default;

    double dish_radius() const { return 0.5 * dish_diameter; }
    bool inside_dish(Vec2 p) const { return distance_squared(p, {}) <= dish_radius() * dish_radius(); }

    const Electrode* find_electrode(const std::string& id) const;
    /// Index of the blob covering the electrode footprint centre, or -1.
    int blob_for_electrode(const std::string& id) const;
    /// Index of the blob containing `p`, or -1 for bare plastic.
    int blob_at(Vec2 p) const;
    std::vector<std::string> channels() const;
};

struct Violation {
    std::string object;
    std::string message;
    bool operator==(const Violation&) const = default;
};

/// Checks every structural invariant; never throws on a well-formed Scene.
std::vector<Violation> validate_scene(const Scene& scene);

/// Sorts every object list into the canonical order used by emit_config.
Scene canonicalize(Scene scene);

}  // namespace slimegate
