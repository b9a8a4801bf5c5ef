#include "slimegate/gates.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slimegate/network.hpp"
#include "slimegate/rng.hpp"

namespace slimegate {

namespace {

constexpr double kElectrodeSize = 8.0;
constexpr double kBlobRadius = 5.0;
constexpr double kLitMargin = 3.0;  // lit disc extends this far past the target blob
constexpr double kGreen = 568.0;

AgarBlob blob_at_point(Vec2 c) {
    AgarBlob b;
    b.center = c;
    b.radius = kBlobRadius;
    return b;
}

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

// Cheap pre-check before a flood fill: does any footprint cell carry tube?
bool footprint_reached(const TrailGrid& trail, const Electrode& e, double threshold) {
    const GridSpec& spec = trail.spec();
    int i0 = 0;
    int j0 = 0;
    int i1 = 0;
    int j1 = 0;
    const Vec2 half = e.size * 0.5;
    spec.locate(e.center - half, i0, j0);
    spec.locate(e.center + half, i1, j1);
    for (int j = std::max(0, j0); j <= std::min(spec.height - 1, j1); ++j) {
        for (int i = std::max(0, i0); i <= std::min(spec.width - 1, i1); ++i) {
            if (trail.value(spec.index(i, j)) >= threshold) return true;
        }
    }
    return false;
}

}  // namespace

std::string_view to_string(GateKind kind) { return kind == GateKind::pnot ? "pnot" : "pnand"; }

std::optional<GateKind> gate_kind_from_string(std::string_view name) {
    if (name == "pnot") return GateKind::pnot;
    if (name == "pnand") return GateKind::pnand;
    return std::nullopt;
}

std::vector<std::string> check_harness(const GateHarness& h) {
    std::vector<std::string> out;
    for (const auto& v : validate_scene(h.scene)) out.push_back(v.object + ": " + v.message);
    if (h.scene.find_electrode(h.source_electrode) == nullptr) out.push_back("source electrode missing");
    const std::size_t want = h.kind == GateKind::pnot ? 1 : 2;
    if (h.target_electrodes.size() != want) out.push_back("wrong number of target electrodes");
    for (const auto& t : h.target_electrodes) {
        if (h.scene.find_electrode(t) == nullptr) out.push_back("target electrode " + t + " missing");
    }
    for (const auto& [channel, leds] : h.inputs) {
        if (leds.empty()) out.push_back("input " + channel + " drives no LED");
        for (const auto& id : leds) {
            const bool found = std::any_of(h.scene.leds.begin(), h.scene.leds.end(),
                                           [&](const Led& l) { return l.id == id && l.channel == channel; });
            if (!found) out.push_back("input " + channel + " names unknown LED " + id);
        }
    }
    if (h.kind == GateKind::pnand && h.target_electrodes.size() == 2) {
        const Electrode* y = h.scene.find_electrode(h.target_electrodes[0]);
        const Electrode* z = h.scene.find_electrode(h.target_electrodes[1]);
        bool separated = false;
        if (y != nullptr && z != nullptr) {
            for (const auto& b : h.scene.barriers) {
                if (b.light_transmission < 1.0 && segments_intersect(b.segment, {y->center, z->center})) separated = true;
            }
        }
        if (!separated) out.push_back("no light barrier between the two targets");
    }
    if (h.budget <= 0) out.push_back("budget must be > 0");
    return out;
}

GateHarness build_pnot(double gap, double supply) {
    if (!(gap > 0.0)) throw GateError("gap must be > 0");
    const double d = gap + kElectrodeSize;
    GateHarness h;
    h.kind = GateKind::pnot;
    Scene& s = h.scene;
    const Vec2 x{-0.5 * d, 0.0};
    const Vec2 y{0.5 * d, 0.0};
    s.electrodes = {{"X", x, {kElectrodeSize, kElectrodeSize}}, {"Y", y, {kElectrodeSize, kElectrodeSize}}};
    s.agar_blobs = {blob_at_point(x), blob_at_point(y)};
    s.attractants = {{y, 1.0, "oat flake"}};
    s.leds = {{"LA", y, kGreen, 1000.0, "A"}};
    h.inputs = {{"A", {"LA"}}};
    h.target_electrodes = {"Y"};
    h.output.supply_voltage = supply;
    return h;
}

GateHarness build_pnand(double gap, double supply) {
    if (!(gap > 0.0)) throw GateError("gap must be > 0");
    const double d = gap + kElectrodeSize;
    GateHarness h;
    h.kind = GateKind::pnand;
    Scene& s = h.scene;
    // X at the corner of an L; the card runs along the mirror line between Y and Z.
    const Vec2 x{0.0, 0.0};
    const Vec2 y{-d, 0.0};
    const Vec2 z{0.0, d};
    s.electrodes = {{"X", x, {kElectrodeSize, kElectrodeSize}},
                    {"Y", y, {kElectrodeSize, kElectrodeSize}},
                    {"Z", z, {kElectrodeSize, kElectrodeSize}}};
    s.agar_blobs = {blob_at_point(x), blob_at_point(y), blob_at_point(z)};
    s.attractants = {{y, 1.0, "oat flake"}, {z, 1.0, "oat flake"}};
    const double inner = kBlobRadius + 1.0;
    const double outer = 0.5 * s.dish_diameter * 0.95 / std::sqrt(2.0);
    Barrier card;
    card.segment = {{-inner, inner}, {-outer, outer}};
    s.barriers = {card};
    s.leds = {{"LA", y, kGreen, 1000.0, "A"}, {"LB", z, kGreen, 1000.0, "B"}};
    h.inputs = {{"A", {"LA"}}, {"B", {"LB"}}};
    h.target_electrodes = {"Y", "Z"};
    h.output.supply_voltage = supply;
    return h;
}

GateHarness harness_from_scene(GateKind kind, Scene scene, double supply) {
    GateHarness h;
    h.kind = kind;
    h.scene = std::move(scene);
    for (const auto& e : h.scene.electrodes) {
        if (e.id != h.source_electrode) h.target_electrodes.push_back(e.id);
    }
    for (const auto& l : h.scene.leds) h.inputs[l.channel].push_back(l.id);
    h.output.supply_voltage = supply;
    const auto problems = check_harness(h);
    if (!problems.empty()) throw GateError("scene is not a " + std::string(to_string(kind)) + " gate: " + problems.front());
    return h;
}

void check_inputs(const GateHarness& harness, const InputBits& inputs) {
    for (const auto& [channel, leds] : harness.inputs) {
        auto it = inputs.find(channel);
        if (it == inputs.end()) throw GateError("missing input " + channel);
        if (it->second != 0 && it->second != 1) throw GateError("input " + channel + " must be 0 or 1");
    }
    for (const auto& [channel, bit] : inputs) {
        if (!harness.inputs.count(channel)) throw GateError("unknown input channel " + channel);
    }
}

InputBits parse_inputs(std::string_view text) {
    InputBits out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = trim(text.substr(pos, comma - pos));
        pos = comma + 1;
        if (item.empty()) {
            if (comma >= text.size()) break;
            throw GateError("empty input assignment");
        }
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) throw GateError("input '" + item + "' is not channel=bit");
        const std::string channel = trim(std::string_view(item).substr(0, eq));
        const std::string value = trim(std::string_view(item).substr(eq + 1));
        if (channel.empty() || (value != "0" && value != "1")) throw GateError("input '" + item + "' is not channel=bit");
        if (out.count(channel)) throw GateError("input " + channel + " given twice");
        out[channel] = value == "1" ? 1 : 0;
        if (comma >= text.size()) break;
    }
    return out;
}

std::string format_inputs(const InputBits& inputs) {
    std::string out;
    for (const auto& [channel, bit] : inputs) {
        if (!out.empty()) out += ',';
        out += channel + "=" + std::to_string(bit);
    }
    return out;
}

int ideal_output(GateKind kind, const InputBits& inputs) {
    bool all = true;
    for (const auto& [channel, bit] : inputs) all = all && bit == 1;
    (void)kind;  // NOT and NAND are both "not all inputs high"
    return all ? 0 : 1;
}

std::vector<InputBits> input_rows(const GateHarness& harness) {
    std::vector<std::string> channels;
    for (const auto& [channel, leds] : harness.inputs) channels.push_back(channel);
    std::vector<InputBits> rows;
    const std::size_t n = channels.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        InputBits row;
        for (std::size_t c = 0; c < n; ++c) row[channels[c]] = (mask >> (n - 1 - c)) & 1U ? 1 : 0;
        rows.push_back(row);
    }
    return rows;
}

std::shared_ptr<const Arena> Arena::build(const Scene& scene, const Calibration& calibration, long horizon) {
    auto arena = std::make_shared<Arena>();
    arena->scene = scene;
    arena->calibration = calibration;
    const GridSpec spec = grid_for(scene, calibration.cells_per_mm);
    auto cells = std::make_shared<CellMap>(CellMap::build(scene, spec));
    arena->cells = cells;
    arena->timeline = std::make_shared<AttractantTimeline>(scene, cells, calibration, static_cast<int>(horizon));

    // The urge to leave follows the best individual food cue, so extra food
    // sources elsewhere in the dish do not shorten the dwell.
    const int interval = arena->timeline->interval();
    const std::size_t frames = static_cast<std::size_t>(horizon / interval + 1);
    arena->margin_cue.assign(scene.agar_blobs.size(), std::vector<double>(frames, 0.0));
    const DiffusionParams params = DiffusionParams::from(calibration);
    for (const auto& source : scene.attractants) {
        Scene single = scene;
        single.attractants = {source};
        Grid g(spec);
        for (std::size_t f = 0; f < frames; ++f) {
            if (scene.attractants.size() == 1) {
                g = arena->timeline->at(static_cast<long>(f) * interval);
            } else if (f > 0) {
                diffuse_attractant_in_place(g, *cells, single, interval, params);
            }
            for (std::size_t b = 0; b < scene.agar_blobs.size(); ++b) {
                const AgarBlob& blob = scene.agar_blobs[b];
                double best = 0.0;
                constexpr int kProbes = 24;
                for (int n = 0; n < kProbes; ++n) {
                    const double t = 2.0 * std::numbers::pi * n / kProbes;
                    best = std::max(best, g.sample(blob.center + Vec2{std::cos(t), std::sin(t)} * (blob.radius + 1.0)));
                }
                arena->margin_cue[b][f] = std::max(arena->margin_cue[b][f], best);
            }
        }
    }
    return arena;
}

double Arena::margin_at(int blob, long tick) const {
    if (blob < 0 || blob >= static_cast<int>(margin_cue.size()) || margin_cue[blob].empty()) return 0.0;
    const auto& cue = margin_cue[blob];
    const std::size_t frame = tick <= 0 ? 0 : static_cast<std::size_t>(tick / timeline->interval());
    return cue[std::min(frame, cue.size() - 1)];
}

GateRun::GateRun(const GateHarness& harness, const Calibration& calibration, const InputBits& inputs,
                 std::uint64_t seed)
    : GateRun(harness, Arena::build(harness.scene, calibration, 2 * harness.budget), inputs, seed) {}

GateRun::GateRun(const GateHarness& harness, std::shared_ptr<const Arena> arena, const InputBits& inputs,
                 std::uint64_t seed)
    : harness_(harness), arena_(std::move(arena)) {
    const auto problems = check_harness(harness_);
    if (!problems.empty()) throw GateError(problems.front());
    check_inputs(harness_, inputs);
    const Calibration& c = arena_->calibration;
    state_ = inoculate(harness_.scene, harness_.source_electrode, static_cast<std::size_t>(c.mass), seed, c);
    fields_ = make_fields(harness_.scene, c);
    fields_.cells = arena_->cells;
    set_inputs(inputs);
}

Disc GateRun::target_region(const std::string& target) const {
    const int blob = harness_.scene.blob_for_electrode(target);
    if (blob >= 0) {
        const AgarBlob& b = harness_.scene.agar_blobs[blob];
        return {b.center, b.radius + kLitMargin};
    }
    const Electrode* e = harness_.scene.find_electrode(target);
    return {e->center, 0.5 * std::max(e->size.x, e->size.y) + kLitMargin};
}

void GateRun::apply_leds() {
    LedStates leds;
    for (const auto& [channel, ids] : harness_.inputs) leds[channel] = inputs_.at(channel) == 1;
    fields_.irradiance =
        compute_irradiance(harness_.scene, fields_.spec, *arena_->cells, leds, arena_->calibration);
    lit_targets_.clear();
    for (const auto& t : harness_.target_electrodes) {
        const Disc region = target_region(t);
        for (const auto& l : harness_.scene.leds) {
            auto it = leds.find(l.channel);
            if (it != leds.end() && it->second && region.contains(l.position)) lit_targets_.insert(t);
        }
    }
}

void GateRun::refresh_potentials() {
    potentials_ = compute_potentials(harness_.scene, fields_, arena_->calibration, state_.home_blob);
}

void GateRun::set_inputs(const InputBits& inputs) {
    check_inputs(harness_, inputs);
    const std::set<std::string> lit_before = lit_targets_;
    inputs_ = inputs;
    apply_leds();

    outcome_ = GateOutcome{};
    outcome_.start_tick = tick_;
    outcome_.final_mode = state_.mode;
    outcome_.trace.push_back({tick_, "inputs", format_inputs(inputs_)});
    finished_ = false;
    hold_.clear();
    connected_at_start_ = tick_ > 0 ? connected_targets() : std::set<std::string>{};
    withdrawing_ = false;

    for (const auto& t : lit_targets_) {
        if (lit_before.count(t) || is_terminal(state_.mode)) continue;
        const Disc region = target_region(t);
        if (occupancy(state_, region) <= 0.0) continue;
        const std::size_t changes = state_.history.size();
        trigger_withdrawal_in_place(state_, region, arena_->calibration);
        if (state_.history.size() != changes) {
            withdrawing_ = true;
            outcome_.trace.push_back({tick_, "withdraw", t});
        }
    }

    attractant_frame_ = &arena_->timeline->at(tick_);
    fields_.attractant = *attractant_frame_;
    refresh_potentials();
    if (is_terminal(state_.mode)) close_segment(tick_);
}

std::set<std::string> GateRun::connected_targets() const {
    std::set<std::string> out;
    for (const auto& t : harness_.target_electrodes) {
        if (trail_connects(state_.trail, *arena_->cells, harness_.scene, arena_->calibration.tube_threshold,
                           harness_.source_electrode, t)) {
            out.insert(t);
        }
    }
    return out;
}

OutputReading GateRun::reading() const {
    const Calibration& c = arena_->calibration;
    ConductiveNetwork net = extract_network(state_.trail.materialize(), harness_.scene, c.tube_threshold, c);
    const int src = net.find(harness_.source_electrode);
    // Tubules are counted on the tube network alone, before the output wiring joins the targets.
    int tubules = 0;
    for (const auto& t : harness_.target_electrodes) tubules = std::max(tubules, count_tubules(net, src, net.find(t)));
    // Targets are wired together into the output line, each through its own blob.
    const int out = net.add_node("out", {});
    for (const auto& t : harness_.target_electrodes) {
        const int blob = harness_.scene.blob_for_electrode(t);
        const double r = blob >= 0 ? harness_.scene.agar_blobs[blob].resistance : 0.0;
        net.add_edge(net.find(t), out, 0.0, r > 0.0 ? 1.0 / r : 1e12);
    }
    Resistance total = network_resistance(net, src, out);
    const int src_blob = harness_.scene.blob_for_electrode(harness_.source_electrode);
    if (total && src_blob >= 0) *total += harness_.scene.agar_blobs[src_blob].resistance;
    OutputReading r = read_output(total, harness_.output.supply_voltage, harness_.output.load,
                                  harness_.output.logic_threshold);
    r.tubule_count = total ? tubules : 0;
    return r;
}

void GateRun::close_segment(long tick) {
    finished_ = true;
    outcome_.end_tick = tick;
    outcome_.final_mode = state_.mode;
    outcome_.failed = !left_home_;
    outcome_.final_reading = reading();
    outcome_.logic_output = outcome_.failed ? 0 : outcome_.final_reading.logic_level;
    outcome_.trace.push_back({tick, "end", outcome_.completed ? "completed" : std::string(to_string(state_.mode))});
}

void GateRun::step() {
    if (is_terminal(state_.mode)) return;
    const Calibration& c = arena_->calibration;
    ++tick_;

    const Grid* frame = &arena_->timeline->at(tick_);
    if (frame != attractant_frame_) {
        attractant_frame_ = frame;
        fields_.attractant = *frame;
        refresh_potentials();
    }
    potentials_.margin_signal =
        std::min(arena_->margin_at(state_.home_blob, tick_) / c.signal_reference, c.signal_cap);
    potentials_.home_moisture = blob_moisture(harness_.scene.agar_blobs[state_.home_blob],
                                              static_cast<double>(tick_), c);
    if (tick_ % std::max(1, static_cast<int>(c.moisture_refresh_ticks)) == 0) {
        fields_.moisture = Grid(fields_.spec);
        for (std::size_t k = 0; k < fields_.moisture.values.size(); ++k) {
            const int b = arena_->cells->blob[k];
            if (b >= 0) fields_.moisture.values[k] = blob_moisture(harness_.scene.agar_blobs[b], tick_, c);
        }
    }

    const std::size_t changes = state_.history.size();
    const StepContext ctx{harness_.scene, fields_, potentials_, c, harness_.output.supply_voltage};
    step_in_place(state_, ctx, 1);
    for (std::size_t i = changes; i < state_.history.size(); ++i) {
        const ModeChange& m = state_.history[i];
        if (m.to == Mode::migrating) left_home_ = true;
        if (!finished_) {
            outcome_.trace.push_back({tick_, "mode", std::string(to_string(m.to))});
            if (m.from == Mode::withdrawing && withdrawing_ && !outcome_.withdrawal_ticks) {
                outcome_.withdrawal_ticks = tick_ - outcome_.start_tick;
            }
        }
    }
    if (finished_) return;

    for (const auto& t : lit_targets_) {
        if (connected_at_start_.count(t)) continue;
        outcome_.max_lit_target_occupancy =
            std::max(outcome_.max_lit_target_occupancy, occupancy(state_, target_region(t)));
    }

    // A reset completes only once the lit target has been cleared; a dark
    // target that was already wired then counts as the new output.
    const bool clearing = withdrawing_ && !outcome_.withdrawal_ticks;
    if ((state_.mode != Mode::exploring || left_home_) && !clearing) {
        const double threshold = c.tube_threshold;
        for (const auto& t : harness_.target_electrodes) {
            if (connected_at_start_.count(t) && lit_targets_.count(t)) continue;
            bool connected = false;
            if (footprint_reached(state_.trail, *harness_.scene.find_electrode(t), threshold)) {
                connected = trail_connects(state_.trail, *arena_->cells, harness_.scene, threshold,
                                           harness_.source_electrode, t);
            }
            long& hold = hold_[t];
            hold = connected ? hold + 1 : 0;
            if (connected && lit_targets_.count(t)) outcome_.lit_target_connected = true;
            if (hold >= static_cast<long>(c.completion_hold_ticks) && !outcome_.completed) {
                outcome_.completed = true;
                outcome_.target = t;
                outcome_.propagation_delay = tick_ - outcome_.start_tick;
                outcome_.trace.push_back({tick_, "complete", t});
            }
        }
    }

    if (outcome_.completed || is_terminal(state_.mode) || tick_ - outcome_.start_tick >= harness_.budget) {
        close_segment(tick_);
    }
}

const GateOutcome& GateRun::finish_segment() {
    while (!finished_) {
        if (is_terminal(state_.mode)) {
            close_segment(tick_);
            break;
        }
        step();
    }
    return outcome_;
}

GateOutcome run_gate(const GateHarness& harness, const InputBits& inputs, std::uint64_t seed,
                     const Calibration& calibration) {
    GateRun run(harness, calibration, inputs, seed);
    return run.finish_segment();
}

GateOutcome run_gate(const GateHarness& harness, std::shared_ptr<const Arena> arena, const InputBits& inputs,
                     std::uint64_t seed) {
    GateRun run(harness, std::move(arena), inputs, seed);
    return run.finish_segment();
}

GateOutcome reset_gate(GateRun& run, const InputBits& new_inputs) {
    if (run.terminal()) throw GateError("cannot reset a " + std::string(to_string(run.state().mode)) + " plasmodium");
    if (!run.segment_finished()) run.finish_segment();
    if (run.outcome().failed) throw GateError("cannot reset a failed run");
    if (run.terminal()) throw GateError("cannot reset a " + std::string(to_string(run.state().mode)) + " plasmodium");
    run.set_inputs(new_inputs);
    return run.finish_segment();
}

std::vector<ScriptStep> parse_script(std::string_view text) {
    std::vector<ScriptStep> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto words = split_words(line);
        if (words.empty()) continue;
        if (words.size() != 2) throw GateError("script line " + std::to_string(number) + ": expected 'tick inputs'");
        ScriptStep s;
        const auto* first = words[0].data();
        const auto* last = first + words[0].size();
        const auto [ptr, ec] = std::from_chars(first, last, s.tick);
        if (ec != std::errc() || ptr != last || s.tick < 0) {
            throw GateError("script line " + std::to_string(number) + ": bad tick '" + words[0] + "'");
        }
        s.inputs = parse_inputs(words[1]);
        if (!out.empty() && s.tick < out.back().tick) {
            throw GateError("script line " + std::to_string(number) + ": ticks must not decrease");
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_script(const std::vector<ScriptStep>& script) {
    std::string out;
    for (const auto& s : script) out += std::to_string(s.tick) + " " + format_inputs(s.inputs) + "\n";
    return out;
}

GateOutcome run_script(const GateHarness& harness, std::shared_ptr<const Arena> arena, const InputBits& initial,
                       const std::vector<ScriptStep>& script, std::uint64_t seed) {
    InputBits start = initial;
    std::size_t next = 0;
    while (next < script.size() && script[next].tick == 0) start = script[next++].inputs;
    GateRun run(harness, std::move(arena), start, seed);
    for (; next < script.size(); ++next) {
        while (run.tick() < script[next].tick && !run.terminal()) run.step();
        if (run.terminal()) break;
        run.set_inputs(script[next].inputs);
    }
    return run.finish_segment();
}

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TruthTable truth_table(const GateHarness& harness, int trials, std::uint64_t seed, const Calibration& calibration) {
    if (trials < 1) throw GateError("trials must be >= 1");
    return truth_table(harness, Arena::build(harness.scene, calibration, 2 * harness.budget), trials, seed);
}

TruthTable truth_table(const GateHarness& harness, std::shared_ptr<const Arena> arena, int trials, std::uint64_t seed) {
    if (trials < 1) throw GateError("trials must be >= 1");
    TruthTable table;
    table.kind = harness.kind;
    const auto rows = input_rows(harness);
    std::vector<GateOutcome> outcomes(rows.size() * static_cast<std::size_t>(trials));
    parallel_for(static_cast<int>(outcomes.size()), [&](int i) {
        const std::size_t row = static_cast<std::size_t>(i) / trials;
        const int trial = i % trials;
        outcomes[i] = run_gate(harness, arena, rows[row], derive_seed(seed, static_cast<std::uint64_t>(trial)));
    });
    for (std::size_t r = 0; r < rows.size(); ++r) {
        TruthRow row;
        row.inputs = rows[r];
        row.ideal = ideal_output(harness.kind, rows[r]);
        row.trials = trials;
        std::vector<double> delays;
        double tubules = 0.0;
        for (int t = 0; t < trials; ++t) {
            GateOutcome& o = outcomes[r * trials + t];
            if (o.logic_output == row.ideal) ++row.correct;
            if (o.failed) ++row.failed;
            if (o.completed) {
                ++row.completed;
                delays.push_back(static_cast<double>(*o.propagation_delay));
                tubules += o.final_reading.tubule_count;
            }
            o.trace.clear();
            row.outcomes.push_back(std::move(o));
        }
        if (!delays.empty()) {
            double sum = 0.0;
            for (double d : delays) sum += d;
            row.mean_delay = sum / static_cast<double>(delays.size());
            row.mean_tubules = tubules / static_cast<double>(delays.size());
        }
        row.median_delay = median(delays);
        table.rows.push_back(std::move(row));
    }
    return table;
}

NetlistError::NetlistError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

Netlist parse_netlist(std::string_view text) {
    Netlist n;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto words = split_words(line);
        if (words.empty()) continue;
        const std::string kind = words[0];
        words.erase(words.begin());
        if (kind == "input") {
            n.inputs.insert(n.inputs.end(), words.begin(), words.end());
        } else if (kind == "output") {
            n.outputs.insert(n.outputs.end(), words.begin(), words.end());
        } else if (kind == "nand") {
            if (words.size() != 3) throw NetlistError(number, "nand takes <out> <in1> <in2>");
            n.gates.push_back({words[0], words[1], words[2]});
        } else {
            throw NetlistError(number, "unknown statement '" + kind + "'");
        }
    }
    return n;
}

Netlist half_adder_netlist() {
    return parse_netlist(R"(# one-bit half adder from NAND gates only
input a b
output sum carry
nand na a a
nand nb b b
nand t1 a nb
nand t2 na b
nand sum t1 t2
nand c1 a b
nand carry c1 c1
)");
}

CascadeEstimate estimate_cascade(const Netlist& netlist, double dish_diameter, double median_gate_delay,
                                 double margin) {
    std::map<std::string, int> driver;
    for (std::size_t g = 0; g < netlist.gates.size(); ++g) {
        if (!driver.emplace(netlist.gates[g].out, static_cast<int>(g)).second) {
            throw NetlistError(0, "signal '" + netlist.gates[g].out + "' has two drivers");
        }
    }
    const std::set<std::string> inputs(netlist.inputs.begin(), netlist.inputs.end());
    // Longest path by memoised DFS; state 1 marks the current path.
    std::vector<int> depth(netlist.gates.size(), 0);
    std::vector<int> state(netlist.gates.size(), 0);
    auto visit = [&](auto&& self, int g) -> int {
        if (state[g] == 2) return depth[g];
        if (state[g] == 1) throw NetlistError(0, "netlist is cyclic at '" + netlist.gates[g].out + "'");
        state[g] = 1;
        int d = 0;
        for (const auto& in : {netlist.gates[g].in1, netlist.gates[g].in2}) {
            auto it = driver.find(in);
            if (it != driver.end()) {
                d = std::max(d, self(self, it->second));
            } else if (!inputs.count(in)) {
                throw NetlistError(0, "signal '" + in + "' is never driven");
            }
        }
        state[g] = 2;
        depth[g] = d + 1;
        return depth[g];
    };
    CascadeEstimate e;
    e.gates = static_cast<int>(netlist.gates.size());
    for (std::size_t g = 0; g < netlist.gates.size(); ++g) e.depth = std::max(e.depth, visit(visit, static_cast<int>(g)));
    const double side = (dish_diameter + margin) / 1000.0;
    e.area_m2 = e.gates * side * side;
    e.delay_ticks = e.depth * median_gate_delay;
    return e;
}

}  // namespace slimegate
