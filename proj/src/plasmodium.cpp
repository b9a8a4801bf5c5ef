#include "slimegate/plasmodium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slimegate {

namespace {

constexpr double kPi = std::numbers::pi;

struct ModeName {
    Mode mode;
    std::string_view name;
};

constexpr ModeName kModeNames[] = {
    {Mode::exploring, "exploring"},
    {Mode::migrating, "migrating"},
    {Mode::withdrawing, "withdrawing"},
    {Mode::sclerotized, "sclerotized"},
    {Mode::fragmented, "fragmented"},
};

bool crosses_impassable(const Scene& scene, Vec2 from, Vec2 to) {
    const Segment move{from, to};
    for (const auto& b : scene.barriers) {
        if (!b.passable_by_plasmodium && segments_intersect(move, b.segment)) return true;
    }
    return false;
}

double overvoltage_excess(const Calibration& c, double supply) {
    if (supply <= c.overvoltage_threshold) return 0.0;
    return (supply - c.overvoltage_threshold) / 12.0;
}

}  // namespace

std::string_view to_string(Mode mode) {
    for (const auto& m : kModeNames) {
        if (m.mode == mode) return m.name;
    }
    return "unknown";
}

std::optional<Mode> mode_from_string(std::string_view name) {
    for (const auto& m : kModeNames) {
        if (m.name == name) return m.mode;
    }
    return std::nullopt;
}

bool is_terminal(Mode mode) { return mode == Mode::sclerotized || mode == Mode::fragmented; }

bool transition_allowed(Mode from, Mode to) {
    switch (from) {
        case Mode::exploring:
            return to == Mode::migrating || to == Mode::sclerotized;
        case Mode::migrating:
            return to == Mode::withdrawing || to == Mode::exploring;
        case Mode::withdrawing:
            return to == Mode::exploring || to == Mode::sclerotized || to == Mode::fragmented;
        case Mode::sclerotized:
        case Mode::fragmented:
            return false;
    }
    return false;
}

void set_mode(PlasmodiumState& state, Mode to) {
    if (state.mode == to) return;
    if (!transition_allowed(state.mode, to)) {
        throw PlasmodiumError("illegal mode transition " + std::string(to_string(state.mode)) + " -> " +
                              std::string(to_string(to)));
    }
    state.history.push_back({state.age, state.mode, to});
    state.mode = to;
}

void TrailGrid::decay(double keep) {
    scale_ *= keep;
    if (scale_ < 1e-150) renormalize();
}

void TrailGrid::renormalize() {
    for (double& v : raw_) v *= scale_;
    scale_ = 1.0;
}

Grid TrailGrid::materialize() const {
    Grid g(spec_);
    for (std::size_t k = 0; k < raw_.size(); ++k) g.values[k] = raw_[k] * scale_;
    return g;
}

PlasmodiumState inoculate_blob(const Scene& scene, int blob, std::size_t mass, std::uint64_t seed,
                               const Calibration& calibration) {
    if (blob < 0 || blob >= static_cast<int>(scene.agar_blobs.size())) {
        throw PlasmodiumError("inoculation blob does not exist");
    }
    if (mass == 0) throw PlasmodiumError("inoculation mass must be > 0");
    const AgarBlob& b = scene.agar_blobs[blob];
    const GridSpec spec = grid_for(scene, calibration.cells_per_mm);

    PlasmodiumState s;
    s.rng_seed = seed;
    s.rng = Rng(seed);
    s.trail = TrailGrid(spec);
    s.residue = Grid(spec);
    s.home_blob = blob;
    s.total_mass = mass;
    s.mode = Mode::exploring;
    s.vigour = std::exp(calibration.vigour_sigma * s.rng.normal());
    s.reserve = calibration.forage_reserve;
    s.agents.reserve(mass);
    for (std::size_t n = 0; n < mass; ++n) {
        Agent a;
        const double r = b.radius * std::sqrt(s.rng.uniform());
        const double theta = s.rng.uniform(0.0, 2.0 * kPi);
        a.position = b.center + Vec2{r * std::cos(theta), r * std::sin(theta)};
        if (!scene.inside_dish(a.position)) a.position = b.center;
        a.heading = wrap_angle(s.rng.uniform(0.0, 2.0 * kPi));
        a.sensor_angle = calibration.sensor_angle;
        a.sensor_offset = calibration.sensor_offset;
        a.lane = n % 2 == 0 ? 1 : -1;
        s.agents.push_back(a);
    }
    return s;
}

PlasmodiumState inoculate(const Scene& scene, const std::string& electrode_id, std::size_t mass, std::uint64_t seed,
                          const Calibration& calibration) {
    if (scene.find_electrode(electrode_id) == nullptr) {
        throw PlasmodiumError("unknown electrode '" + electrode_id + "'");
    }
    const int blob = scene.blob_for_electrode(electrode_id);
    if (blob < 0) throw PlasmodiumError("electrode '" + electrode_id + "' has no agar blob to hold moisture");
    return inoculate_blob(scene, blob, mass, seed, calibration);
}

std::array<Vec2, 3> sensor_positions(const Agent& agent) {
    std::array<Vec2, 3> out;
    const double angles[3] = {agent.heading + agent.sensor_angle, agent.heading, agent.heading - agent.sensor_angle};
    for (int i = 0; i < 3; ++i) {
        out[i] = agent.position + Vec2{std::cos(angles[i]), std::sin(angles[i])} * agent.sensor_offset;
    }
    return out;
}

SensorStimuli sense(const Agent& agent, const Scene& scene, const StimulusFields& fields,
                    const Calibration& calibration, bool may_cross_plastic) {
    SensorStimuli out;
    const auto points = sensor_positions(agent);
    for (int i = 0; i < 3; ++i) {
        Stimulus& s = out[i];
        s.attraction = fields.attractant.sample(points[i]);
        double rep = 0.0;
        for (std::size_t l = 0; l < fields.irradiance.size() && l < scene.leds.size(); ++l) {
            rep += phobia_weight(scene.leds[l].wavelength, calibration) * fields.irradiance[l].sample(points[i]);
        }
        s.repulsion = rep;
        int ci = 0;
        int cj = 0;
        if (fields.spec.locate(points[i], ci, cj)) {
            const std::size_t k = fields.spec.index(ci, cj);
            const bool on_agar = fields.cells->blob[k] >= 0;
            s.moisture_ok = on_agar ? fields.moisture.values[k] >= calibration.viability_threshold : may_cross_plastic;
        } else {
            s.moisture_ok = false;
        }
    }
    return out;
}

StepPotentials compute_potentials(const Scene& scene, const StimulusFields& fields, const Calibration& calibration,
                                  int home_blob) {
    StepPotentials p;
    p.repulsion = repulsion_grid(scene, fields.irradiance, calibration);
    if (p.repulsion.values.empty()) p.repulsion = Grid(fields.spec);
    p.outbound = Grid(fields.spec);
    p.inbound = Grid(fields.spec);
    const Vec2 home = home_blob >= 0 ? scene.agar_blobs[home_blob].center : Vec2{};
    const double a_gain = calibration.attractant_gain / calibration.signal_reference;
    for (int j = 0; j < fields.spec.height; ++j) {
        for (int i = 0; i < fields.spec.width; ++i) {
            const std::size_t k = fields.spec.index(i, j);
            const double rep = p.repulsion.values[k];
            p.outbound.values[k] = a_gain * fields.attractant.values[k] - rep;
            p.inbound.values[k] = -calibration.home_gain * distance(fields.spec.cell_center(i, j), home) - rep;
        }
    }
    if (home_blob >= 0) {
        const AgarBlob& b = scene.agar_blobs[home_blob];
        double best = 0.0;
        constexpr int kProbes = 24;
        for (int n = 0; n < kProbes; ++n) {
            const double t = 2.0 * kPi * n / kProbes;
            const Vec2 probe = b.center + Vec2{std::cos(t), std::sin(t)} * (b.radius + 1.0);
            best = std::max(best, fields.attractant.sample(probe));
        }
        p.margin_signal = std::min(best / calibration.signal_reference, calibration.signal_cap);
        p.home_moisture = fields.moisture.sample(b.center);
    }
    return p;
}

namespace {

struct Kinematics {
    double step;
    double jitter;
    double deposit;
    double lane_turn;  // rad per tick, signed by the agent's lane
};

void move_agent(PlasmodiumState& state, Agent& a, const StepContext& ctx, const Kinematics& kin,
                const std::vector<char>& food_blob) {
    const Calibration& c = ctx.calibration;
    const GridSpec& spec = ctx.fields.spec;
    const CellMap& cells = *ctx.fields.cells;
    const Grid& potential = a.inbound ? ctx.potentials.inbound : ctx.potentials.outbound;

    // Noisy arg-max: Gumbel perturbation turns it into softmax sampling.
    const double ch = std::cos(a.heading);
    const double sh = std::sin(a.heading);
    const double ca = std::cos(a.sensor_angle);
    const double sa = std::sin(a.sensor_angle);
    const Vec2 dirs[3] = {{ch * ca - sh * sa, sh * ca + ch * sa}, {ch, sh}, {ch * ca + sh * sa, sh * ca - ch * sa}};
    int best = 1;
    double best_score = -1e300;
    for (int s = 0; s < 3; ++s) {
        const Vec2 p = a.position + dirs[s] * a.sensor_offset;
        int i = 0;
        int j = 0;
        double v = -1e6;
        if (spec.locate(p, i, j)) {
            const std::size_t k = spec.index(i, j);
            if (cells.inside[k]) {
                const double trail = state.trail.value(k);
                v = potential.values[k] + c.trail_gain * trail / (trail + c.trail_saturation) -
                    c.residue_gain * state.residue.values[k];
            }
        }
        double u = state.rng.uniform();
        while (u <= 0.0) u = state.rng.uniform();
        const double score = c.steering_gain * v - std::log(-std::log(u));
        if (score > best_score) {
            best_score = score;
            best = s;
        }
    }
    double heading = a.heading + (best == 0 ? c.rotation : best == 2 ? -c.rotation : 0.0);
    heading += kin.jitter * state.rng.normal();
    if (!a.retreating) heading += a.lane * kin.lane_turn;
    a.heading = wrap_angle(heading);

    const double len = a.retreating ? c.withdraw_step_length : kin.step;
    const Vec2 next = a.position + Vec2{std::cos(a.heading), std::sin(a.heading)} * len;
    bool ok = ctx.scene.inside_dish(next) && !crosses_impassable(ctx.scene, a.position, next);
    int ni = 0;
    int nj = 0;
    std::size_t nk = 0;
    if (ok) {
        ok = spec.locate(next, ni, nj);
        if (ok) {
            nk = spec.index(ni, nj);
            int ci = 0;
            int cj = 0;
            const bool on_residue = spec.locate(a.position, ci, cj) && state.residue.at(ci, cj) > 0.0;
            ok = cells.inside[nk] && (on_residue || state.residue.values[nk] <= 0.0);
        }
    }
    if (!ok) {
        a.heading = wrap_angle(state.rng.uniform(0.0, 2.0 * kPi));
        return;
    }
    a.position = next;

    const int blob = cells.blob[nk];
    if (!a.inbound && blob >= 0 && blob != state.home_blob && food_blob[blob]) {
        a.inbound = state.rng.bernoulli(1.0 / std::max(1.0, c.food_dwell_ticks));
    } else if (a.inbound && blob == state.home_blob) {
        a.inbound = false;
    }
    if (a.retreating && state.withdrawal_region && !state.withdrawal_region->contains(a.position)) {
        a.retreating = false;
    }
}

void explore_agent(PlasmodiumState& state, Agent& a, const StepContext& ctx, const Kinematics& kin) {
    const Calibration& c = ctx.calibration;
    if (!state.rng.bernoulli(c.explore_step_probability)) return;
    a.heading = wrap_angle(a.heading + kin.jitter * state.rng.normal());
    const AgarBlob& home = ctx.scene.agar_blobs[state.home_blob];
    const Vec2 next = a.position + Vec2{std::cos(a.heading), std::sin(a.heading)} * kin.step;
    if (!home.contains(next) || !ctx.scene.inside_dish(next)) {
        a.heading = wrap_angle(a.heading + kPi);
        return;
    }
    a.position = next;
}

}  // namespace

void step_in_place(PlasmodiumState& state, const StepContext& ctx, int dt) {
    const Calibration& c = ctx.calibration;
    const GridSpec& spec = ctx.fields.spec;
    const double excess = overvoltage_excess(c, ctx.supply_voltage);
    const Kinematics kin{c.step_length, c.jitter * (1.0 + c.overvoltage_jitter_gain * excess),
                         c.deposit * (1.0 + c.overvoltage_deposit_gain * excess), c.overvoltage_lane_turn * excess};

    std::vector<char> food_blob(ctx.scene.agar_blobs.size(), 0);
    for (std::size_t b = 0; b < ctx.scene.agar_blobs.size(); ++b) {
        for (const auto& src : ctx.scene.attractants) {
            if (ctx.scene.agar_blobs[b].contains(src.center)) food_blob[b] = 1;
        }
    }

    for (int t = 0; t < dt; ++t) {
        if (is_terminal(state.mode)) {
            throw PlasmodiumError("cannot step a " + std::string(to_string(state.mode)) + " plasmodium");
        }
        ++state.age;
        state.trail.decay(1.0 - c.trail_decay);

        if (state.mode == Mode::exploring) {
            if (state.reserve > 0.0 && ctx.potentials.home_moisture < c.viability_threshold) {
                set_mode(state, Mode::sclerotized);
                return;
            }
            if (state.age > c.settle_ticks) state.reserve -= state.vigour * ctx.potentials.margin_signal;
        }

        const bool confined = state.mode == Mode::exploring && state.reserve > 0.0;
        const AgarBlob* home = state.home_blob >= 0 ? &ctx.scene.agar_blobs[state.home_blob] : nullptr;
        for (Agent& a : state.agents) {
            if (confined && home != nullptr && home->contains(a.position)) {
                explore_agent(state, a, ctx, kin);
            } else {
                move_agent(state, a, ctx, kin, food_blob);
            }
            int i = 0;
            int j = 0;
            if (spec.locate(a.position, i, j)) state.trail.deposit(spec.index(i, j), kin.deposit);
        }

        if (state.mode == Mode::exploring && state.reserve <= 0.0) {
            set_mode(state, Mode::migrating);
        } else if (state.mode == Mode::withdrawing && state.withdrawal_region) {
            if (occupancy(state, *state.withdrawal_region) < c.withdraw_occupancy * state.withdrawal_start_occupancy) {
                for (Agent& a : state.agents) a.retreating = false;
                if (state.fragment_after_withdrawal) {
                    set_mode(state, Mode::fragmented);
                    return;
                }
                set_mode(state, Mode::exploring);
            }
        }
    }
}

PlasmodiumState step(const PlasmodiumState& state, const StepContext& ctx, int dt) {
    PlasmodiumState next = state;
    step_in_place(next, ctx, dt);
    return next;
}

double occupancy(const PlasmodiumState& state, const Disc& region) {
    if (state.agents.empty()) return 0.0;
    std::size_t inside = 0;
    for (const auto& a : state.agents) {
        if (region.contains(a.position)) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(state.agents.size());
}

Vec2 centroid(const PlasmodiumState& state) {
    Vec2 sum;
    for (const auto& a : state.agents) sum = sum + a.position;
    return state.agents.empty() ? sum : sum * (1.0 / static_cast<double>(state.agents.size()));
}

void trigger_withdrawal_in_place(PlasmodiumState& state, const Disc& lit_region, const Calibration& calibration) {
    bool any = false;
    for (const auto& a : state.agents) {
        if (lit_region.contains(a.position)) {
            any = true;
            break;
        }
    }
    if (!any || is_terminal(state.mode)) return;
    if (state.mode == Mode::exploring) set_mode(state, Mode::migrating);
    set_mode(state, Mode::withdrawing);
    state.withdrawal_region = lit_region;
    state.withdrawal_start_occupancy = occupancy(state, lit_region);
    state.fragment_after_withdrawal = state.rng.bernoulli(calibration.fragmentation_probability);
    for (Agent& a : state.agents) {
        if (lit_region.contains(a.position)) {
            a.retreating = true;
            a.inbound = true;
        }
    }
    // The withdrawn territory keeps a repellent residue for good.
    const GridSpec& spec = state.residue.spec;
    for (int j = 0; j < spec.height; ++j) {
        for (int i = 0; i < spec.width; ++i) {
            if (lit_region.contains(spec.cell_center(i, j))) {
                state.residue.at(i, j) = std::max(state.residue.at(i, j), calibration.residue_strength);
            }
        }
    }
}

PlasmodiumState trigger_withdrawal(const PlasmodiumState& state, const StimulusFields& /*fields*/,
                                   const Disc& lit_region, const Calibration& calibration) {
    PlasmodiumState next = state;
    trigger_withdrawal_in_place(next, lit_region, calibration);
    return next;
}

}  // namespace slimegate
