#include "slimegate/scene.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace slimegate {

namespace {

constexpr double kBoundaryTolerance = 1e-9;

bool circle_overlaps_rect(Vec2 c, double r, const Rect& rect) {
    const double hx = 0.5 * rect.size.x;
    const double hy = 0.5 * rect.size.y;
    const double nx = std::clamp(c.x, rect.center.x - hx, rect.center.x + hx);
    const double ny = std::clamp(c.y, rect.center.y - hy, rect.center.y + hy);
    return distance(c, {nx, ny}) < r;
}

std::string fmt_point(Vec2 p) {
    std::ostringstream os;
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

}  // namespace

const Electrode* Scene::find_electrode(const std::string& id) const {
    for (const auto& e : electrodes) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

int Scene::blob_for_electrode(const std::string& id) const {
    const Electrode* e = find_electrode(id);
    if (e == nullptr) return -1;
    for (std::size_t i = 0; i < agar_blobs.size(); ++i) {
        if (circle_overlaps_rect(agar_blobs[i].center, agar_blobs[i].radius, e->footprint())) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

int Scene::blob_at(Vec2 p) const {
    for (std::size_t i = 0; i < agar_blobs.size(); ++i) {
        if (agar_blobs[i].contains(p)) return static_cast<int>(i);
    }
    return -1;
}

std::vector<std::string> Scene::channels() const {
    std::set<std::string> seen;
    for (const auto& led : leds) seen.insert(led.channel);
    return {seen.begin(), seen.end()};
}

std::vector<Violation> validate_scene(const Scene& scene) {
    std::vector<Violation> out;
    const double r = scene.dish_radius();
    auto inside = [&](Vec2 p) { return length(p) <= r + kBoundaryTolerance; };

    if (!(scene.dish_diameter > 0.0)) out.push_back({"dish", "dish_diameter must be > 0"});
    if (!(scene.time_scale > 0.0)) out.push_back({"scene", "time_scale must be > 0"});

    std::set<std::string> ids;
    for (const auto& e : scene.electrodes) {
        const std::string name = "electrode " + e.id;
        if (!ids.insert(e.id).second) out.push_back({name, "duplicate electrode id"});
        if (!(e.size.x > 0.0 && e.size.y > 0.0)) out.push_back({name, "footprint area must be > 0"});
        const double hx = 0.5 * e.size.x;
        const double hy = 0.5 * e.size.y;
        for (Vec2 corner : {Vec2{-hx, -hy}, Vec2{hx, -hy}, Vec2{-hx, hy}, Vec2{hx, hy}}) {
            if (!inside(e.center + corner)) {
                out.push_back({name, "footprint outside dish"});
                break;
            }
        }
    }

    for (std::size_t i = 0; i < scene.agar_blobs.size(); ++i) {
        const auto& b = scene.agar_blobs[i];
        const std::string name = "agar " + std::to_string(i) + " at " + fmt_point(b.center);
        if (!(b.radius > 0.0)) out.push_back({name, "radius must be > 0"});
        if (length(b.center) + b.radius > r + kBoundaryTolerance) out.push_back({name, "blob outside dish"});
        if (!(b.resistance > 0.0)) out.push_back({name, "resistance must be > 0"});
        if (!(b.initial_moisture >= 0.0 && b.initial_moisture <= 1.0)) {
            out.push_back({name, "initial_moisture must lie in [0, 1]"});
        }
        int overlapping = 0;
        for (const auto& e : scene.electrodes) {
            if (circle_overlaps_rect(b.center, b.radius, e.footprint())) ++overlapping;
        }
        if (overlapping > 1) out.push_back({name, "blob overlaps more than one electrode"});
    }

    for (std::size_t i = 0; i < scene.attractants.size(); ++i) {
        const auto& a = scene.attractants[i];
        const std::string name = "attractant " + std::to_string(i) + " at " + fmt_point(a.center);
        if (!(a.strength >= 0.0)) out.push_back({name, "strength must be >= 0"});
        if (!inside(a.center)) out.push_back({name, "source outside dish"});
    }

    for (std::size_t i = 0; i < scene.barriers.size(); ++i) {
        const auto& b = scene.barriers[i];
        const std::string name = "barrier " + std::to_string(i);
        if (!(b.light_transmission >= 0.0 && b.light_transmission <= 1.0)) {
            out.push_back({name, "light_transmission must lie in [0, 1]"});
        }
        if (!(b.gap_height >= 0.0)) out.push_back({name, "gap_height must be >= 0"});
        if (!inside(b.segment.a) || !inside(b.segment.b)) out.push_back({name, "segment outside dish"});
    }

    for (const auto& led : scene.leds) {
        const std::string name = "led " + led.id;
        if (!(led.wavelength > 0.0)) out.push_back({name, "wavelength must be > 0"});
        if (!(led.luminosity > 0.0)) out.push_back({name, "luminosity must be > 0"});
        if (!inside(led.position)) out.push_back({name, "position outside dish"});
    }
    return out;
}

Scene canonicalize(Scene scene) {
    auto point_less = [](Vec2 a, Vec2 b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); };
    std::stable_sort(scene.electrodes.begin(), scene.electrodes.end(),
                     [](const Electrode& a, const Electrode& b) { return a.id < b.id; });
    std::stable_sort(scene.agar_blobs.begin(), scene.agar_blobs.end(),
                     [&](const AgarBlob& a, const AgarBlob& b) { return point_less(a.center, b.center); });
    std::stable_sort(scene.attractants.begin(), scene.attractants.end(),
                     [&](const AttractantSource& a, const AttractantSource& b) {
                         return point_less(a.center, b.center);
                     });
    std::stable_sort(scene.barriers.begin(), scene.barriers.end(), [&](const Barrier& a, const Barrier& b) {
        if (a.segment.a != b.segment.a) return point_less(a.segment.a, b.segment.a);
        return point_less(a.segment.b, b.segment.b);
    });
    std::stable_sort(scene.leds.begin(), scene.leds.end(),
                     [](const Led& a, const Led& b) { return a.id < b.id; });
    return scene;
}

}  // namespace slimegate
