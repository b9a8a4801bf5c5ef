#include "slimegate/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "slimegate/config.hpp"
#include "slimegate/parallel.hpp"
#include "slimegate/rng.hpp"

namespace slimegate {

namespace {

constexpr double kSquareArea = 250.0;  // mm^2 of each agar square
constexpr double kPoleOffset = 34.0;   // mm from the dish centre
constexpr double kCardOffset = 20.0;
constexpr double kLedSpread = 4.0;     // the two LEDs of a pole sit this far either side
constexpr double kCentreVolume = 4.0;  // ml
constexpr double kMarkerSize = 8.0;
constexpr long kColonizeCheck = 10;  // ticks between pole occupancy checks

struct NamedColour {
    double wavelength;
    std::string_view name;
};

constexpr NamedColour kColourNames[] = {{466.0, "blue"}, {568.0, "green"}, {585.0, "yellow"}, {626.0, "red"}};

double occupied_share(const PlasmodiumState& state, const AgarBlob& blob) {
    return occupancy(state, Disc{blob.center, blob.radius});
}

}  // namespace

std::string colour_name(double wavelength) {
    for (const auto& c : kColourNames) {
        if (c.wavelength == wavelength) return std::string(c.name);
    }
    if (wavelength <= 0.0) return "dark";
    return format_number(wavelength) + " nm";
}

std::optional<double> parse_colour(std::string_view text) {
    std::string lower;
    for (char ch : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    for (const auto& c : kColourNames) {
        if (lower == c.name) return c.wavelength;
    }
    if (lower == "dark") return 0.0;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(lower.data(), lower.data() + lower.size(), v);
    if (ec != std::errc{} || end != lower.data() + lower.size() || v < 0.0) return std::nullopt;
    return v;
}

// ---------------------------------------------------------------- phototaxis

GateHarness phototaxis_harness(double colour_a, double colour_b, const PhototaxisOptions& options) {
    if (!(options.luminosity > 0.0)) throw ExperimentError("luminosity must be > 0");
    if (!(options.attractant > 0.0)) throw ExperimentError("attractant must be > 0");
    if (!(options.colonize_fraction > 0.0 && options.colonize_fraction <= 1.0)) {
        throw ExperimentError("colonize fraction must lie in (0, 1]");
    }
    if (options.budget <= 0) throw ExperimentError("budget must be > 0");

    GateHarness h;
    h.kind = GateKind::pnand;
    h.budget = options.budget;
    Scene& s = h.scene;
    const double radius = std::sqrt(kSquareArea / std::numbers::pi);
    const Vec2 west{-kPoleOffset, 0.0};
    const Vec2 east{kPoleOffset, 0.0};
    auto square = [&](Vec2 c, double volume) {
        AgarBlob b;
        b.center = c;
        b.radius = radius;
        b.volume = volume;
        return b;
    };
    const Vec2 marker{kMarkerSize, kMarkerSize};
    s.electrodes = {{"X", {}, marker}, {"A", west, marker}, {"B", east, marker}};
    s.agar_blobs = {square({}, kCentreVolume), square(west, 2.0), square(east, 2.0)};
    s.attractants = {{west, options.attractant, "oat flake"}, {east, options.attractant, "oat flake"}};
    const double reach = 0.98 * std::sqrt(s.dish_radius() * s.dish_radius() - kCardOffset * kCardOffset);
    Barrier west_card;
    west_card.segment = {{-kCardOffset, -reach}, {-kCardOffset, reach}};
    Barrier east_card;
    east_card.segment = {{kCardOffset, -reach}, {kCardOffset, reach}};
    s.barriers = {west_card, east_card};
    // A dark pole still carries its LEDs; they are simply never switched on.
    const double wa = colour_a > 0.0 ? colour_a : kLedColours[1];
    const double wb = colour_b > 0.0 ? colour_b : kLedColours[1];
    s.leds = {{"A1", west + Vec2{0.0, kLedSpread}, wa, options.luminosity, "A"},
              {"A2", west - Vec2{0.0, kLedSpread}, wa, options.luminosity, "A"},
              {"B1", east + Vec2{0.0, kLedSpread}, wb, options.luminosity, "B"},
              {"B2", east - Vec2{0.0, kLedSpread}, wb, options.luminosity, "B"}};
    h.inputs = {{"A", {"A1", "A2"}}, {"B", {"B1", "B2"}}};
    h.target_electrodes = {"A", "B"};
    return h;
}

InputBits phototaxis_inputs(double colour_a, double colour_b) {
    return {{"A", colour_a > 0.0 ? 1 : 0}, {"B", colour_b > 0.0 ? 1 : 0}};
}

std::string_view to_string(Choice choice) {
    switch (choice) {
        case Choice::a:
            return "A";
        case Choice::b:
            return "B";
        case Choice::neither:
            break;
    }
    return "neither";
}

std::shared_ptr<const Arena> phototaxis_arena(const Calibration& calibration, const PhototaxisOptions& options) {
    const GateHarness h = phototaxis_harness(kLedColours[0], kLedColours[1], options);
    return Arena::build(h.scene, calibration, 2 * h.budget);
}

PhototaxisResult phototaxis_trial(double colour_a, double colour_b, std::uint64_t seed,
                                  const Calibration& calibration, const PhototaxisOptions& options) {
    return phototaxis_trial(colour_a, colour_b, seed, phototaxis_arena(calibration, options), options);
}

PhototaxisResult phototaxis_trial(double colour_a, double colour_b, std::uint64_t seed,
                                  std::shared_ptr<const Arena> arena, const PhototaxisOptions& options) {
    const GateHarness h = phototaxis_harness(colour_a, colour_b, options);
    GateRun run(h, std::move(arena), phototaxis_inputs(colour_a, colour_b), seed);
    const AgarBlob& pole_a = h.scene.agar_blobs[1];
    const AgarBlob& pole_b = h.scene.agar_blobs[2];

    PhototaxisResult r;
    while (run.tick() < options.budget && !run.terminal()) {
        run.step();
        if (run.tick() % kColonizeCheck != 0) continue;
        r.occupancy_a = occupied_share(run.state(), pole_a);
        r.occupancy_b = occupied_share(run.state(), pole_b);
        const bool a = r.occupancy_a >= options.colonize_fraction;
        const bool b = r.occupancy_b >= options.colonize_fraction;
        if (a || b) {
            r.choice = a && (!b || r.occupancy_a >= r.occupancy_b) ? Choice::a : Choice::b;
            break;
        }
    }
    r.decided_at = run.tick();
    r.final_mode = run.state().mode;
    for (const auto& m : run.state().history) {
        if (m.to == Mode::migrating) {
            r.departure = m.tick;
            break;
        }
    }
    return r;
}

int Ranking::min_gap() const {
    if (order.size() < 2) return 0;
    int gap = order[0].phobia_points - order[1].phobia_points;
    for (std::size_t i = 1; i + 1 < order.size(); ++i) gap = std::min(gap, order[i].phobia_points - order[i + 1].phobia_points);
    return gap;
}

Ranking rank_colours(int trials, std::uint64_t seed, const Calibration& calibration, const PhototaxisOptions& options) {
    if (trials < 1) throw ExperimentError("trials must be >= 1");
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < kLedColours.size(); ++i) {
        for (std::size_t j = i + 1; j < kLedColours.size(); ++j) pairs.emplace_back(kLedColours[i], kLedColours[j]);
    }
    const auto arena = phototaxis_arena(calibration, options);
    std::vector<PhototaxisResult> results(pairs.size() * static_cast<std::size_t>(trials));
    parallel_for(static_cast<int>(results.size()), [&](int i) {
        const auto& [a, b] = pairs[static_cast<std::size_t>(i) / trials];
        results[i] = phototaxis_trial(a, b, derive_seed(seed, static_cast<std::uint64_t>(i % trials)), arena, options);
    });

    Ranking ranking;
    std::map<double, int> points;
    for (double c : kLedColours) points[c] = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        PairTally tally{pairs[p].first, pairs[p].second, 0, 0, 0};
        for (int t = 0; t < trials; ++t) {
            const PhototaxisResult& r = results[p * trials + t];
            TrialRecord rec;
            rec.experiment = "phototaxis";
            rec.seed = derive_seed(seed, static_cast<std::uint64_t>(t));
            rec.config = colour_name(tally.colour_a) + " vs " + colour_name(tally.colour_b);
            rec.duration = r.decided_at;
            rec.metrics["occupancy_a"] = r.occupancy_a;
            rec.metrics["occupancy_b"] = r.occupancy_b;
            if (r.departure) rec.metrics["departure"] = static_cast<double>(*r.departure);
            switch (r.choice) {
                case Choice::a:
                    ++tally.chose_a;
                    ++points[tally.colour_b];
                    rec.outcome = colour_name(tally.colour_a);
                    break;
                case Choice::b:
                    ++tally.chose_b;
                    ++points[tally.colour_a];
                    rec.outcome = colour_name(tally.colour_b);
                    break;
                case Choice::neither:
                    ++tally.neither;
                    rec.outcome = "neither";
                    break;
            }
            ranking.records.push_back(std::move(rec));
        }
        ranking.decided += tally.chose_a + tally.chose_b;
        ranking.pairs.push_back(tally);
    }
    for (const auto& [c, n] : points) ranking.order.push_back({c, n});
    std::stable_sort(ranking.order.begin(), ranking.order.end(),
                     [](const ColourScore& x, const ColourScore& y) { return x.phobia_points > y.phobia_points; });
    return ranking;
}

// ------------------------------------------------------------ fault tolerance

std::string_view to_string(FaultVariable variable) {
    switch (variable) {
        case FaultVariable::luminosity:
            return "luminosity";
        case FaultVariable::gap:
            return "gap";
        case FaultVariable::voltage:
            break;
    }
    return "voltage";
}

std::optional<FaultVariable> fault_variable_from_string(std::string_view name) {
    if (name == "luminosity") return FaultVariable::luminosity;
    if (name == "gap") return FaultVariable::gap;
    if (name == "voltage") return FaultVariable::voltage;
    return std::nullopt;
}

GateHarness fault_harness(GateKind kind, FaultVariable variable, double level) {
    auto build = [&](double gap, double supply) { return kind == GateKind::pnot ? build_pnot(gap, supply) : build_pnand(gap, supply); };
    switch (variable) {
        case FaultVariable::gap:
            if (!(level > 0.0)) throw ExperimentError("gap level must be > 0");
            return build(level, 9.0);
        case FaultVariable::voltage:
            if (!(level > 0.0)) throw ExperimentError("voltage level must be > 0");
            return build(10.0, level);
        case FaultVariable::luminosity:
            break;
    }
    GateHarness h = build(10.0, 9.0);
    for (auto& led : h.scene.leds) {
        led.luminosity += level;
        if (!(led.luminosity > 0.0)) throw ExperimentError("luminosity level leaves an LED dark");
    }
    return h;
}

FaultSweep fault_sweep(FaultVariable variable, const std::vector<double>& levels, int trials, std::uint64_t seed,
                       const Calibration& calibration) {
    if (levels.empty()) throw ExperimentError("no levels to sweep");
    if (trials < 1) throw ExperimentError("trials must be >= 1");
    FaultSweep sweep;
    sweep.variable = variable;
    // Only the gap moves the geometry; every other level reuses one arena per gate.
    std::map<std::pair<int, double>, std::shared_ptr<const Arena>> arenas;
    for (double level : levels) {
        FaultLevel out;
        out.level = level;
        std::vector<double> delays;
        double tubules = 0.0;
        for (GateKind kind : {GateKind::pnot, GateKind::pnand}) {
            const GateHarness h = fault_harness(kind, variable, level);
            const std::pair<int, double> key{static_cast<int>(kind), variable == FaultVariable::gap ? level : 0.0};
            auto& arena = arenas[key];
            if (!arena) arena = Arena::build(h.scene, calibration, 2 * h.budget);
            TruthTable table = truth_table(h, arena, trials, seed);
            for (const auto& row : table.rows) {
                out.trials += row.trials;
                out.failures += row.trials - row.correct;
                for (const auto& o : row.outcomes) {
                    if (!o.completed) continue;
                    ++out.completed;
                    delays.push_back(static_cast<double>(*o.propagation_delay));
                    tubules += o.final_reading.tubule_count;
                }
            }
            out.tables.push_back(std::move(table));
        }
        out.median_delay = median(delays);
        out.mean_tubules = out.completed > 0 ? tubules / out.completed : 0.0;
        sweep.levels.push_back(std::move(out));
    }
    return sweep;
}

ZTest two_proportion_z_test(int x1, int n1, int x2, int n2) {
    if (n1 <= 0 || n2 <= 0 || x1 < 0 || x2 < 0 || x1 > n1 || x2 > n2) {
        throw ExperimentError("two-proportion test needs 0 <= x <= n and n > 0");
    }
    const double p1 = static_cast<double>(x1) / n1;
    const double p2 = static_cast<double>(x2) / n2;
    const double pooled = static_cast<double>(x1 + x2) / (n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    ZTest t;
    if (se <= 0.0) return t;  // identical all-or-nothing samples
    t.z = (p1 - p2) / se;
    t.p = std::erfc(std::abs(t.z) / std::numbers::sqrt2);
    return t;
}

// ------------------------------------------------------------------- reuse

ReuseReport reuse_campaign(int seeds, std::uint64_t seed, const Calibration& calibration) {
    if (seeds < 1) throw ExperimentError("seeds must be >= 1");
    const GateHarness pnand = build_pnand();
    const GateHarness pnot = build_pnot();
    // Resets run past the first budget, so the field timeline covers two more.
    const auto pnand_arena = Arena::build(pnand.scene, calibration, 3 * pnand.budget);
    const auto pnot_arena = Arena::build(pnot.scene, calibration, 3 * pnot.budget);

    struct Slot {
        std::optional<long> fresh_delay;
        std::optional<ReuseTrial> trial;
        bool pnot_attempted = false;
        bool pnot_low = false;
        std::string pnot_note;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(seeds));
    parallel_for(seeds, [&](int i) {
        Slot& slot = slots[i];
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        {
            GateRun run(pnand, pnand_arena, {{"A", 0}, {"B", 0}}, s);
            const GateOutcome first = run.finish_segment();
            if (first.completed && !run.terminal()) {
                slot.fresh_delay = first.propagation_delay;
                ReuseTrial t;
                t.seed = s;
                t.first_target = first.target;
                t.fresh_delay = *first.propagation_delay;
                const InputBits flip = first.target == "Y" ? InputBits{{"A", 1}, {"B", 0}} : InputBits{{"A", 0}, {"B", 1}};
                const GateOutcome r = reset_gate(run, flip);
                t.withdrawal_ticks = r.withdrawal_ticks;
                t.reset_completed = r.completed;
                t.reset_delay = r.propagation_delay;
                t.reset_target = r.target;
                t.reset_logic = r.logic_output;
                t.final_mode = run.state().mode;
                slot.trial = t;
            } else if (first.completed) {
                slot.fresh_delay = first.propagation_delay;
            }
        }
        {
            GateRun run(pnot, pnot_arena, {{"A", 0}}, s);
            const GateOutcome first = run.finish_segment();
            if (!first.completed || run.terminal()) return;
            slot.pnot_attempted = true;
            reset_gate(run, {{"A", 1}});
            if (run.terminal()) {
                // A plasmodium that fragments on withdrawal cannot answer again.
                slot.pnot_low = true;
                slot.pnot_note = std::string(to_string(run.state().mode));
                return;
            }
            const GateOutcome again = reset_gate(run, {{"A", 0}});
            slot.pnot_low = again.logic_output == 0;
            slot.pnot_note = again.logic_output == 0 ? "stayed low" : "reconnected";
        }
    });

    ReuseReport report;
    report.seeds = seeds;
    std::vector<double> reset_delays;
    for (int i = 0; i < seeds; ++i) {
        const Slot& slot = slots[i];
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        if (slot.fresh_delay) report.fresh_delays.push_back(static_cast<double>(*slot.fresh_delay));
        if (slot.trial) {
            const ReuseTrial& t = *slot.trial;
            if (t.withdrawal_ticks && *t.withdrawal_ticks >= kWithdrawalWindowMin &&
                *t.withdrawal_ticks <= kWithdrawalWindowMax) {
                ++report.withdrawal_in_window;
            }
            if (t.reset_completed) reset_delays.push_back(static_cast<double>(*t.reset_delay));
            TrialRecord rec;
            rec.experiment = "reuse-pnand";
            rec.seed = s;
            rec.config = "complete on " + t.first_target + ", then light it";
            rec.outcome = t.reset_completed ? "rewired to " + t.reset_target : std::string(to_string(t.final_mode));
            rec.duration = t.fresh_delay + t.reset_delay.value_or(0);
            rec.metrics["fresh_delay"] = static_cast<double>(t.fresh_delay);
            if (t.withdrawal_ticks) rec.metrics["withdrawal"] = static_cast<double>(*t.withdrawal_ticks);
            if (t.reset_delay) rec.metrics["reset_delay"] = static_cast<double>(*t.reset_delay);
            rec.metrics["reset_logic"] = t.reset_logic;
            report.records.push_back(std::move(rec));
            report.pnand.push_back(t);
        }
        if (slot.pnot_attempted) {
            ++report.pnot_attempted;
            if (slot.pnot_low) ++report.pnot_rereset_low;
            TrialRecord rec;
            rec.experiment = "reuse-pnot";
            rec.seed = s;
            rec.config = "A=0, A=1, A=0";
            rec.outcome = slot.pnot_note;
            report.records.push_back(std::move(rec));
        }
    }
    report.fresh_median = median(report.fresh_delays);
    report.reset_median = median(reset_delays);
    return report;
}

// ------------------------------------------------------------- calibration

namespace {

constexpr std::array<double, 4> kExpectedOrder{568.0, 626.0, 585.0, 466.0};

double pnot_row0_failure(const Calibration& c, double gap, int trials, std::uint64_t seed,
                         std::vector<double>* delays) {
    const GateHarness h = build_pnot(gap);
    const TruthTable t = truth_table(h, trials, seed, c);
    for (const auto& row : t.rows) {
        if (row.inputs.at("A") != 0) continue;
        if (delays != nullptr) {
            for (const auto& o : row.outcomes) {
                if (o.completed) delays->push_back(static_cast<double>(*o.propagation_delay));
            }
        }
        return 1.0 - row.success_rate();
    }
    return 1.0;
}

struct SearchParameter {
    std::string_view name;
    double* (*get)(Calibration&);
};

const SearchParameter kSearch[] = {
    {"phobia_466", [](Calibration& c) { return &c.phobia[0].weight; }},
    {"phobia_568", [](Calibration& c) { return &c.phobia[1].weight; }},
    {"phobia_585", [](Calibration& c) { return &c.phobia[2].weight; }},
    {"phobia_626", [](Calibration& c) { return &c.phobia[3].weight; }},
    {"forage_reserve", [](Calibration& c) { return &c.forage_reserve; }},
    {"vigour_sigma", [](Calibration& c) { return &c.vigour_sigma; }},
    {"desiccation_horizon", [](Calibration& c) { return &c.desiccation_horizon; }},
};

double total(const std::map<std::string, double>& residuals) {
    double sum = 0.0;
    for (const auto& [k, v] : residuals) sum += v;
    return sum;
}

}  // namespace

std::map<std::string, double> target_residuals(const Calibration& calibration,
                                               const std::vector<CalibrationTarget>& targets, int trials,
                                               std::uint64_t seed) {
    std::map<std::string, double> out;
    std::optional<double> row0;
    std::vector<double> delays;
    for (const auto& t : targets) {
        double residual = 0.0;
        if (t.statistic == "ranking_gap") {
            const Ranking r = rank_colours(trials, seed, calibration);
            std::map<double, int> points;
            for (const auto& s : r.order) points[s.wavelength] = s.phobia_points;
            double gap = 1e9;
            for (std::size_t i = 0; i + 1 < kExpectedOrder.size(); ++i) {
                gap = std::min(gap, static_cast<double>(points[kExpectedOrder[i]] - points[kExpectedOrder[i + 1]]));
            }
            residual = std::max(0.0, t.value - gap);
        } else if (t.statistic == "pnot_failure" || t.statistic == "delay_window") {
            if (!row0) row0 = pnot_row0_failure(calibration, 10.0, trials, seed, &delays);
            if (t.statistic == "pnot_failure") {
                residual = std::max(0.0, std::abs(*row0 - t.value) - t.tolerance);
            } else {
                int inside = 0;
                for (double d : delays) inside += d >= 1440.0 && d <= 5760.0;
                const double share = delays.empty() ? 0.0 : static_cast<double>(inside) / delays.size();
                residual = std::max(0.0, t.value - share);
            }
        } else if (t.statistic == "gap20_failure") {
            const double f = pnot_row0_failure(calibration, 20.0, trials, seed, nullptr);
            residual = std::max(0.0, std::abs(f - t.value) - t.tolerance);
        } else {
            throw ExperimentError("unknown calibration statistic '" + t.statistic + "'");
        }
        out[t.statistic] = residual;
    }
    return out;
}

CalibrationFit calibrate(const Calibration& start, const std::vector<CalibrationTarget>& targets,
                         const FitOptions& options) {
    if (!check_calibration(start).empty()) throw ExperimentError("start calibration is invalid");
    CalibrationFit fit;
    fit.calibration = start;
    if (targets.empty()) return fit;

    fit.residuals = target_residuals(start, targets, options.trials, options.seed);
    fit.evaluations = 1;
    double best = total(fit.residuals);
    const std::size_t n = std::size(kSearch);
    for (int e = 0; e < options.budget && best > 0.0; ++e) {
        Calibration candidate = fit.calibration;
        const SearchParameter& p = kSearch[static_cast<std::size_t>(e / 2) % n];
        double* v = p.get(candidate);
        *v *= e % 2 == 0 ? 1.25 : 0.8;
        if (!check_calibration(candidate).empty()) continue;
        auto residuals = target_residuals(candidate, targets, options.trials, options.seed);
        ++fit.evaluations;
        const double score = total(residuals);
        if (score < best) {
            best = score;
            fit.calibration = candidate;
            fit.residuals = std::move(residuals);
        }
    }
    for (const auto& [name, r] : fit.residuals) {
        if (r > 0.0) fit.violations.push_back(name + " misses its target by " + format_number(r));
    }
    return fit;
}

}  // namespace slimegate
