#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slimegate/calibration.hpp"
#include "slimegate/fields.hpp"
#include "slimegate/geometry.hpp"
#include "slimegate/rng.hpp"
#include "slimegate/scene.hpp"

namespace slimegate {

enum class Mode { exploring, migrating, withdrawing, sclerotized, fragmented };

std::string_view to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view name);
bool is_terminal(Mode mode);
/// exploring -> migrating -> {withdrawing, exploring};
/// withdrawing -> {exploring, sclerotized, fragmented}; exploring -> sclerotized
/// (desiccation before departure). Terminal modes have no successors.
bool transition_allowed(Mode from, Mode to);

struct Agent {
    Vec2 position;
    double heading = 0.0;  // radians in [0, 2pi)
    double sensor_angle = 0.6;
    double sensor_offset = 3.0;
    int lane = 1;             // +1 or -1: side an overvoltage stream bows out to
    bool inbound = false;     // streaming back towards the inoculation blob
    bool retreating = false;  // caught in a newly lit region

    bool operator==(const Agent&) const = default;
};

/// Deposit grid whose exponential evaporation is applied through a shared
/// scale factor, so a tick of decay costs O(1).
class TrailGrid {
public:
    TrailGrid() = default;
    explicit TrailGrid(const GridSpec& spec) : spec_(spec), raw_(spec.size(), 0.0) {}

    const GridSpec& spec() const { return spec_; }
    double value(std::size_t k) const { return raw_[k] * scale_; }
    double sample(Vec2 p) const {
        int i = 0;
        int j = 0;
        return spec_.locate(p, i, j) ? value(spec_.index(i, j)) : 0.0;
    }
    void deposit(std::size_t k, double amount) { raw_[k] += amount / scale_; }
    void set(std::size_t k, double v) { raw_[k] = v / scale_; }
    void decay(double keep);
    Grid materialize() const;

    bool operator==(const TrailGrid&) const = default;

private:
    void renormalize();

    GridSpec spec_;
    std::vector<double> raw_;
    double scale_ = 1.0;
};

struct ModeChange {
    long tick;
    Mode from;
    Mode to;
    bool operator==(const ModeChange&) const = default;
};

struct Disc {
    Vec2 center;
    double radius = 0.0;
    bool contains(Vec2 p) const { return distance_squared(p, center) <= radius * radius; }
    bool operator==(const Disc&) const = default;
};

struct PlasmodiumState {
    std::vector<Agent> agents;
    TrailGrid trail;
    Grid residue;  // persistent repellent left where the plasmodium withdrew
    std::size_t total_mass = 0;
    Mode mode = Mode::exploring;
    std::uint64_t rng_seed = 0;
    Rng rng;

    int home_blob = -1;
    double vigour = 1.0;
    double reserve = 0.0;  // remaining reluctance budget on the home blob
    long age = 0;          // ticks stepped
    std::optional<Disc> withdrawal_region;
    double withdrawal_start_occupancy = 0.0;  // occupancy of the region when withdrawal began
    bool fragment_after_withdrawal = false;
    std::vector<ModeChange> history;

    bool operator==(const PlasmodiumState&) const = default;
};

class PlasmodiumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Places `mass` agents uniformly over the agar blob under `electrode_id`.
PlasmodiumState inoculate(const Scene& scene, const std::string& electrode_id, std::size_t mass, std::uint64_t seed,
                          const Calibration& calibration = {});
PlasmodiumState inoculate_blob(const Scene& scene, int blob, std::size_t mass, std::uint64_t seed,
                               const Calibration& calibration = {});

struct Stimulus {
    double attraction = 0.0;
    double repulsion = 0.0;
    bool moisture_ok = true;
};

/// Readings at the left, forward and right sensors.
using SensorStimuli = std::array<Stimulus, 3>;

std::array<Vec2, 3> sensor_positions(const Agent& agent);
SensorStimuli sense(const Agent& agent, const Scene& scene, const StimulusFields& fields,
                    const Calibration& calibration, bool may_cross_plastic = true);

/// Per-cell steering potentials derived from the stimulus fields. Rebuilt by
/// the caller whenever the attractant or LED state changes.
struct StepPotentials {
    Grid outbound;  // normalised attractant minus light repulsion
    Grid inbound;   // homing pull minus light repulsion
    Grid repulsion;
    double margin_signal = 0.0;  // drive sensed at the home blob margin, capped
    double home_moisture = 1.0;
};

StepPotentials compute_potentials(const Scene& scene, const StimulusFields& fields, const Calibration& calibration,
                                  int home_blob);

struct StepContext {
    const Scene& scene;
    const StimulusFields& fields;
    const StepPotentials& potentials;
    const Calibration& calibration;
    double supply_voltage = 9.0;
};

/// Advances the plasmodium by `dt` ticks. Throws PlasmodiumError when the
/// state is terminal.
void step_in_place(PlasmodiumState& state, const StepContext& ctx, int dt = 1);
PlasmodiumState step(const PlasmodiumState& state, const StepContext& ctx, int dt = 1);

/// Fraction of the living mass inside `region`.
double occupancy(const PlasmodiumState& state, const Disc& region);
Vec2 centroid(const PlasmodiumState& state);

/// Starts retreat from `lit_region`. No-op when no agent is inside it.
PlasmodiumState trigger_withdrawal(const PlasmodiumState& state, const StimulusFields& fields,
                                   const Disc& lit_region, const Calibration& calibration);
void trigger_withdrawal_in_place(PlasmodiumState& state, const Disc& lit_region, const Calibration& calibration);

/// Moves to `to`, recording the change. Throws on a transition outside the mode graph.
void set_mode(PlasmodiumState& state, Mode to);

}  // namespace slimegate
