#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slimegate/calibration.hpp"
#include "slimegate/geometry.hpp"
#include "slimegate/scene.hpp"

namespace slimegate {

/// Regular square grid covering the dish's bounding box. Cell (0, 0) sits
/// at the lower-left corner `origin`.
struct GridSpec {
    int width = 0;
    int height = 0;
    double cells_per_mm = 1.0;
    Vec2 origin;

    std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * width + i; }
    double cell_mm() const { return 1.0 / cells_per_mm; }
    Vec2 cell_center(int i, int j) const {
        return {origin.x + (i + 0.5) * cell_mm(), origin.y + (j + 0.5) * cell_mm()};
    }
    /// Cell containing `p`; false when outside the grid.
    bool locate(Vec2 p, int& i, int& j) const {
        const double fx = (p.x - origin.x) * cells_per_mm;
        const double fy = (p.y - origin.y) * cells_per_mm;
        if (!(fx >= 0.0 && fy >= 0.0)) return false;
        i = static_cast<int>(fx);
        j = static_cast<int>(fy);
        return i < width && j < height;
    }
    bool operator==(const GridSpec&) const = default;
};

GridSpec grid_for(const Scene& scene, double cells_per_mm);

struct Grid {
    GridSpec spec;
    std::vector<double> values;

    Grid() = default;
    explicit Grid(const GridSpec& s, double fill = 0.0) : spec(s), values(s.size(), fill) {}

    double& at(int i, int j) { return values[spec.index(i, j)]; }
    double at(int i, int j) const { return values[spec.index(i, j)]; }
    /// Value of the cell containing `p`, 0 outside the grid.
    double sample(Vec2 p) const {
        int i = 0;
        int j = 0;
        return spec.locate(p, i, j) ? values[spec.index(i, j)] : 0.0;
    }
    double sum() const;
    bool operator==(const Grid&) const = default;
};

/// Static per-cell geometry shared by every field: dish membership and the
/// agar blob (if any) covering each cell.
struct CellMap {
    GridSpec spec;
    std::vector<std::uint8_t> inside;
    std::vector<int> blob;  // -1 for bare plastic or outside
    // Dish cells and their W, E, S, N neighbours; a wall neighbour is the cell itself.
    std::vector<std::uint32_t> dish_cells;
    std::vector<std::array<std::uint32_t, 4>> neighbours;

    static CellMap build(const Scene& scene, const GridSpec& spec);
};

struct StimulusFields {
    GridSpec spec;
    std::shared_ptr<const CellMap> cells;
    Grid attractant;
    std::vector<Grid> irradiance;  // one per scene LED, in scene order
    Grid moisture;
};

/// Fresh fields: zero attractant, dark LEDs, blob moisture at its initial value.
StimulusFields make_fields(const Scene& scene, const Calibration& calibration);

struct DiffusionParams {
    double coefficient = 0.2;  // mm^2 per tick
    double decay = 0.0;        // fraction per tick

    static DiffusionParams from(const Calibration& c) { return {c.attractant_diffusion, c.attractant_decay}; }
};

/// Largest per-tick diffusion number the explicit stencil accepts.
inline constexpr double kMaxDiffusionNumber = 0.2;

/// Bilinear split of a point source over the (up to four) dish cells whose
/// centres surround it; weights sum to 1.
std::vector<std::pair<std::size_t, double>> emission_weights(const CellMap& cells, Vec2 p);

/// Advances the attractant by `dt` steps of emission, 5-point diffusion with
/// no-flux dish walls, and linear decay.
StimulusFields diffuse_attractant(const StimulusFields& fields, const Scene& scene, int dt,
                                  const DiffusionParams& params);
void diffuse_attractant_in_place(Grid& attractant, const CellMap& cells, const Scene& scene, int dt,
                                 const DiffusionParams& params);

using LedStates = std::map<std::string, bool>;  // channel -> on

/// Falloff with a softened inverse square; 1 directly below the LED.
double light_falloff(double distance_mm, double led_height);

/// Barrier transmission product along the straight LED-to-point ray.
double ray_transmission(const Scene& scene, Vec2 from, Vec2 to);

std::vector<Grid> compute_irradiance(const Scene& scene, const GridSpec& spec, const CellMap& cells,
                                     const LedStates& led_states, const Calibration& calibration);

/// Moisture decay rate (per tick) for a blob of the given volume.
double moisture_decay_rate(const AgarBlob& blob, const Calibration& calibration);
double blob_moisture(const AgarBlob& blob, double ticks, const Calibration& calibration);

StimulusFields desiccate(const StimulusFields& fields, const Scene& scene, int dt, const Calibration& calibration);
void desiccate_in_place(Grid& moisture, const CellMap& cells, const Scene& scene, int dt,
                        const Calibration& calibration);

double phobia_weight(double wavelength, std::span<const PhobiaAnchor> anchors);
inline double phobia_weight(double wavelength, const Calibration& c) { return phobia_weight(wavelength, c.phobia); }

/// Net repulsive potential of every lit LED.
Grid repulsion_grid(const Scene& scene, const std::vector<Grid>& irradiance, const Calibration& calibration);

/// Attractant evolution from an empty dish, sampled every `interval` ticks
/// until it stops changing. Independent of the plasmodium, so one timeline is
/// shared by every trial on the same scene.
class AttractantTimeline {
public:
    AttractantTimeline(const Scene& scene, std::shared_ptr<const CellMap> cells, const Calibration& calibration,
                       int horizon_ticks);

    const Grid& at(long tick) const;
    int interval() const { return interval_; }
    std::size_t frames() const { return frames_.size(); }

private:
    int interval_;
    std::vector<Grid> frames_;
};

/// Plain-text matrix export, one grid row per line (top row first).
std::string grid_to_text(const Grid& grid);

}  // namespace slimegate
