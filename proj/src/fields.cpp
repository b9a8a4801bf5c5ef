#include "slimegate/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "slimegate/config.hpp"

namespace slimegate {

GridSpec grid_for(const Scene& scene, double cells_per_mm) {
    GridSpec spec;
    spec.cells_per_mm = cells_per_mm;
    const int n = static_cast<int>(std::ceil(scene.dish_diameter * cells_per_mm - 1e-9));
    spec.width = n;
    spec.height = n;
    const double half = 0.5 * n / cells_per_mm;
    spec.origin = {-half, -half};
    return spec;
}

double Grid::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

CellMap CellMap::build(const Scene& scene, const GridSpec& spec) {
    CellMap m;
    m.spec = spec;
    m.inside.assign(spec.size(), 0);
    m.blob.assign(spec.size(), -1);
    for (int j = 0; j < spec.height; ++j) {
        for (int i = 0; i < spec.width; ++i) {
            const Vec2 c = spec.cell_center(i, j);
            const std::size_t k = spec.index(i, j);
            if (!scene.inside_dish(c)) continue;
            m.inside[k] = 1;
            m.blob[k] = scene.blob_at(c);
        }
    }
    const int w = spec.width;
    for (int j = 0; j < spec.height; ++j) {
        for (int i = 0; i < w; ++i) {
            const std::size_t k = spec.index(i, j);
            if (!m.inside[k]) continue;
            const auto self = static_cast<std::uint32_t>(k);
            auto pick = [&](bool ok, std::size_t n) { return ok && m.inside[n] ? static_cast<std::uint32_t>(n) : self; };
            m.dish_cells.push_back(self);
            m.neighbours.push_back({pick(i > 0, k - 1), pick(i + 1 < w, k + 1), pick(j > 0, k - w),
                                    pick(j + 1 < spec.height, k + w)});
        }
    }
    return m;
}

StimulusFields make_fields(const Scene& scene, const Calibration& calibration) {
    StimulusFields f;
    f.spec = grid_for(scene, calibration.cells_per_mm);
    f.cells = std::make_shared<const CellMap>(CellMap::build(scene, f.spec));
    f.attractant = Grid(f.spec);
    f.irradiance.assign(scene.leds.size(), Grid(f.spec));
    f.moisture = Grid(f.spec);
    for (std::size_t k = 0; k < f.spec.size(); ++k) {
        const int b = f.cells->blob[k];
        if (b >= 0) f.moisture.values[k] = scene.agar_blobs[b].initial_moisture;
    }
    return f;
}

std::vector<std::pair<std::size_t, double>> emission_weights(const CellMap& cells, Vec2 p) {
    const GridSpec& spec = cells.spec;
    const double fx = (p.x - spec.origin.x) * spec.cells_per_mm - 0.5;
    const double fy = (p.y - spec.origin.y) * spec.cells_per_mm - 0.5;
    const int i0 = static_cast<int>(std::floor(fx));
    const int j0 = static_cast<int>(std::floor(fy));
    const double tx = fx - i0;
    const double ty = fy - j0;
    std::vector<std::pair<std::size_t, double>> out;
    double total = 0.0;
    for (int dj = 0; dj < 2; ++dj) {
        for (int di = 0; di < 2; ++di) {
            const int i = i0 + di;
            const int j = j0 + dj;
            const double w = (di ? tx : 1.0 - tx) * (dj ? ty : 1.0 - ty);
            if (w <= 0.0 || i < 0 || j < 0 || i >= spec.width || j >= spec.height) continue;
            const std::size_t k = spec.index(i, j);
            if (!cells.inside[k]) continue;
            out.emplace_back(k, w);
            total += w;
        }
    }
    for (auto& [k, w] : out) w /= total;
    return out;
}

void diffuse_attractant_in_place(Grid& attractant, const CellMap& cells, const Scene& scene, int dt,
                                 const DiffusionParams& params) {
    const GridSpec& spec = attractant.spec;
    const double d = std::min(params.coefficient * spec.cells_per_mm * spec.cells_per_mm, kMaxDiffusionNumber);
    const double keep = 1.0 - params.decay;

    std::vector<std::size_t> sources;
    std::vector<double> strengths;
    for (const auto& s : scene.attractants) {
        for (const auto& [k, weight] : emission_weights(cells, s.center)) {
            sources.push_back(k);
            strengths.push_back(s.strength * weight);
        }
    }

    for (std::size_t k = 0; k < attractant.values.size(); ++k) {
        if (!cells.inside[k]) attractant.values[k] = 0.0;
    }
    std::vector<double> next(attractant.values.size(), 0.0);
    const std::size_t n = cells.dish_cells.size();
    for (int step = 0; step < dt; ++step) {
        const double* a = attractant.values.data();
        for (std::size_t c = 0; c < n; ++c) {
            const std::uint32_t k = cells.dish_cells[c];
            const auto& nb = cells.neighbours[c];
            const double here = a[k];
            // Wall neighbours point back at the cell and add an exact zero.
            double flux = 0.0;
            flux += a[nb[0]] - here;
            flux += a[nb[1]] - here;
            flux += a[nb[2]] - here;
            flux += a[nb[3]] - here;
            next[k] = here * keep + d * flux;
        }
        for (std::size_t s = 0; s < sources.size(); ++s) next[sources[s]] += strengths[s];
        attractant.values.swap(next);
    }
}

StimulusFields diffuse_attractant(const StimulusFields& fields, const Scene& scene, int dt,
                                  const DiffusionParams& params) {
    StimulusFields out = fields;
    diffuse_attractant_in_place(out.attractant, *out.cells, scene, dt, params);
    return out;
}

double light_falloff(double distance_mm, double led_height) {
    const double h2 = led_height * led_height;
    return h2 / (h2 + distance_mm * distance_mm);
}

double ray_transmission(const Scene& scene, Vec2 from, Vec2 to) {
    double t = 1.0;
    const Segment ray{from, to};
    for (const auto& b : scene.barriers) {
        if (segments_intersect(ray, b.segment)) t *= b.light_transmission;
    }
    return t;
}

std::vector<Grid> compute_irradiance(const Scene& scene, const GridSpec& spec, const CellMap& cells,
                                     const LedStates& led_states, const Calibration& calibration) {
    std::vector<Grid> out(scene.leds.size(), Grid(spec));
    for (std::size_t l = 0; l < scene.leds.size(); ++l) {
        const Led& led = scene.leds[l];
        const auto it = led_states.find(led.channel);
        if (it == led_states.end() || !it->second) continue;
        Grid& g = out[l];
        for (int j = 0; j < spec.height; ++j) {
            for (int i = 0; i < spec.width; ++i) {
                const std::size_t k = spec.index(i, j);
                if (!cells.inside[k]) continue;
                const Vec2 c = spec.cell_center(i, j);
                g.values[k] = led.luminosity * light_falloff(distance(c, led.position), calibration.led_height) *
                              ray_transmission(scene, led.position, c);
            }
        }
    }
    return out;
}

double moisture_decay_rate(const AgarBlob& blob, const Calibration& calibration) {
    const double horizon = calibration.desiccation_horizon * blob.volume / calibration.reference_volume;
    return std::log(1.0 / calibration.viability_threshold) / horizon;
}

double blob_moisture(const AgarBlob& blob, double ticks, const Calibration& calibration) {
    return blob.initial_moisture * std::exp(-moisture_decay_rate(blob, calibration) * ticks);
}

void desiccate_in_place(Grid& moisture, const CellMap& cells, const Scene& scene, int dt,
                        const Calibration& calibration) {
    std::vector<double> factor(scene.agar_blobs.size());
    for (std::size_t b = 0; b < scene.agar_blobs.size(); ++b) {
        factor[b] = std::exp(-moisture_decay_rate(scene.agar_blobs[b], calibration) * dt);
    }
    for (std::size_t k = 0; k < moisture.values.size(); ++k) {
        const int b = cells.blob[k];
        moisture.values[k] = b >= 0 ? moisture.values[k] * factor[b] : 0.0;
    }
}

StimulusFields desiccate(const StimulusFields& fields, const Scene& scene, int dt, const Calibration& calibration) {
    StimulusFields out = fields;
    desiccate_in_place(out.moisture, *out.cells, scene, dt, calibration);
    return out;
}

double phobia_weight(double wavelength, std::span<const PhobiaAnchor> anchors) {
    if (anchors.empty()) return 0.0;
    if (wavelength <= anchors.front().wavelength) return anchors.front().weight;
    if (wavelength >= anchors.back().wavelength) return anchors.back().weight;
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (wavelength <= anchors[i].wavelength) {
            const auto& lo = anchors[i - 1];
            const auto& hi = anchors[i];
            const double t = (wavelength - lo.wavelength) / (hi.wavelength - lo.wavelength);
            return lo.weight + t * (hi.weight - lo.weight);
        }
    }
    return anchors.back().weight;
}

Grid repulsion_grid(const Scene& scene, const std::vector<Grid>& irradiance, const Calibration& calibration) {
    Grid out(irradiance.empty() ? GridSpec{} : irradiance.front().spec);
    for (std::size_t l = 0; l < irradiance.size() && l < scene.leds.size(); ++l) {
        const double w = calibration.light_gain * phobia_weight(scene.leds[l].wavelength, calibration) / 1000.0;
        const auto& src = irradiance[l].values;
        for (std::size_t k = 0; k < src.size(); ++k) out.values[k] += w * src[k];
    }
    return out;
}

AttractantTimeline::AttractantTimeline(const Scene& scene, std::shared_ptr<const CellMap> cells,
                                       const Calibration& calibration, int horizon_ticks)
    : interval_(std::max(1, static_cast<int>(calibration.field_refresh_ticks))) {
    Grid g(cells->spec);
    const DiffusionParams params = DiffusionParams::from(calibration);
    frames_.push_back(g);
    const int max_frames = horizon_ticks / interval_ + 1;
    while (static_cast<int>(frames_.size()) < max_frames) {
        diffuse_attractant_in_place(g, *cells, scene, interval_, params);
        double change = 0.0;
        double peak = 0.0;
        const auto& prev = frames_.back().values;
        for (std::size_t k = 0; k < g.values.size(); ++k) {
            change = std::max(change, std::abs(g.values[k] - prev[k]));
            peak = std::max(peak, std::abs(g.values[k]));
        }
        frames_.push_back(g);
        if (change <= 1e-9 * peak) break;
    }
}

const Grid& AttractantTimeline::at(long tick) const {
    const std::size_t frame = tick <= 0 ? 0 : static_cast<std::size_t>(tick / interval_);
    return frames_[std::min(frame, frames_.size() - 1)];
}

std::string grid_to_text(const Grid& grid) {
    std::string out;
    for (int j = grid.spec.height - 1; j >= 0; --j) {
        for (int i = 0; i < grid.spec.width; ++i) {
            if (i > 0) out += ' ';
            out += format_number(grid.at(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace slimegate
