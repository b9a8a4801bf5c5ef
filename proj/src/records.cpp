#include "slimegate/records.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "slimegate/rng.hpp"
#include "slimegate/scene_config.hpp"

namespace slimegate {

namespace {

using Json = nlohmann::ordered_json;

constexpr long kScriptHorizonBudgets = 4;

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_json(const std::optional<long>& v) { return v ? Json(*v) : Json(nullptr); }

Json reading_json(const OutputReading& r) {
    return {{"resistance", optional_json(r.resistance)},
            {"output_voltage", r.output_voltage},
            {"logic_level", r.logic_level},
            {"tubule_count", r.tubule_count}};
}

Json outcome_json(const GateOutcome& o) {
    return {{"logic_output", o.logic_output},
            {"completed", o.completed},
            {"failed", o.failed},
            {"propagation_delay", optional_json(o.propagation_delay)},
            {"final_reading", reading_json(o.final_reading)},
            {"target", o.target},
            {"final_mode", std::string(to_string(o.final_mode))},
            {"start_tick", o.start_tick},
            {"end_tick", o.end_tick},
            {"withdrawal_ticks", optional_json(o.withdrawal_ticks)},
            {"max_lit_target_occupancy", o.max_lit_target_occupancy},
            {"lit_target_connected", o.lit_target_connected}};
}

Json trial_json(const TrialRecord& r) {
    Json metrics = Json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    return {{"record", "trial"},   {"experiment", r.experiment}, {"seed", r.seed},          {"config", r.config},
            {"outcome", r.outcome}, {"duration", r.duration},     {"metrics", std::move(metrics)}};
}

Json header(std::string_view command, std::uint64_t seed, const Calibration& calibration) {
    return {{"record", "header"},
            {"tool", "slimegate"},
            {"version", kToolVersion},
            {"command", command},
            {"seed", seed},
            {"calibration_digest", calibration_digest(calibration)},
            {"calibration", emit_calibration(calibration)}};
}

void add_scene(Json& h, const GateHarness& harness, const std::optional<std::string>& scene_text) {
    h["scene_source"] = scene_text ? "file" : "default";
    h["scene_digest"] = scene_digest(harness.scene);
    if (scene_text) h["scene"] = emit_config(harness.scene);
}

std::string lines(const std::vector<Json>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string maybe(const std::optional<double>& v, int digits = 0) { return v ? fixed(*v, digits) : "-"; }

GateHarness harness_with(GateKind kind, const std::optional<std::string>& scene_text, std::optional<long> budget) {
    GateHarness h = scene_text ? harness_from_scene(kind, scene_from_config(*scene_text))
                               : (kind == GateKind::pnot ? build_pnot() : build_pnand());
    if (budget) {
        if (*budget <= 0) throw GateError("budget must be > 0");
        h.budget = *budget;
    }
    return h;
}

Json truth_row_json(const TruthRow& row) {
    return {{"inputs", format_inputs(row.inputs)},
            {"ideal", row.ideal},
            {"trials", row.trials},
            {"correct", row.correct},
            {"completed", row.completed},
            {"failed", row.failed},
            {"success_rate", row.success_rate()},
            {"mean_delay", optional_json(row.mean_delay)},
            {"median_delay", optional_json(row.median_delay)},
            {"mean_tubules", row.mean_tubules}};
}

void truth_trials(const TruthTable& table, std::uint64_t seed, std::string_view prefix, std::vector<Json>& rows) {
    for (const auto& row : table.rows) {
        for (std::size_t t = 0; t < row.outcomes.size(); ++t) {
            const GateOutcome& o = row.outcomes[t];
            TrialRecord r;
            r.experiment = std::string(prefix) + std::string(to_string(table.kind));
            r.seed = derive_seed(seed, t);
            r.config = format_inputs(row.inputs);
            r.outcome = o.completed ? "completed" : o.failed ? "failed" : std::string(to_string(o.final_mode));
            r.duration = o.end_tick - o.start_tick;
            r.metrics["logic"] = o.logic_output;
            r.metrics["voltage"] = o.final_reading.output_voltage;
            r.metrics["tubules"] = o.final_reading.tubule_count;
            if (o.propagation_delay) r.metrics["delay"] = static_cast<double>(*o.propagation_delay);
            rows.push_back(trial_json(r));
        }
    }
}

std::string truth_text(const TruthTable& table) {
    std::ostringstream out;
    out << to_string(table.kind) << " truth table\n";
    out << "inputs      ideal  correct  completed  median delay  mean tubules\n";
    for (const auto& row : table.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-10s  %5d  %3d/%-3d  %9d  %12s  %12s\n", format_inputs(row.inputs).c_str(),
                      row.ideal, row.correct, row.trials, row.completed, maybe(row.median_delay).c_str(),
                      fixed(row.mean_tubules).c_str());
        out << line;
    }
    return out.str();
}

CampaignResult phototaxis_campaign(const CampaignSpec& spec) {
    PhototaxisOptions options;
    if (spec.budget) options.budget = *spec.budget;
    const Ranking ranking = rank_colours(spec.trials, spec.seed, spec.calibration, options);

    Json h = header("campaign", spec.seed, spec.calibration);
    h["campaign"] = "phototaxis";
    h["trials"] = spec.trials;
    h["budget"] = options.budget;
    std::vector<Json> rows{h};
    for (const auto& r : ranking.records) rows.push_back(trial_json(r));

    Json order = Json::array();
    for (const auto& s : ranking.order) {
        order.push_back({{"colour", colour_name(s.wavelength)}, {"wavelength", s.wavelength}, {"phobia_points", s.phobia_points}});
    }
    Json pairs = Json::array();
    for (const auto& p : ranking.pairs) {
        pairs.push_back({{"a", colour_name(p.colour_a)},
                         {"b", colour_name(p.colour_b)},
                         {"chose_a", p.chose_a},
                         {"chose_b", p.chose_b},
                         {"neither", p.neither}});
    }
    rows.push_back({{"record", "summary"},
                    {"order", std::move(order)},
                    {"pairs", std::move(pairs)},
                    {"decided", ranking.decided},
                    {"min_gap", ranking.min_gap()}});

    std::ostringstream text;
    text << "phototaxis ranking, " << spec.trials << " trials per pair (most avoided first)\n";
    for (const auto& s : ranking.order) {
        char line[80];
        std::snprintf(line, sizeof line, "  %-7s %4.0f nm  %3d phobia points\n", colour_name(s.wavelength).c_str(),
                      s.wavelength, s.phobia_points);
        text << line;
    }
    text << "pairs (A vs B: chose A / chose B / neither)\n";
    for (const auto& p : ranking.pairs) {
        char line[96];
        std::snprintf(line, sizeof line, "  %-6s vs %-6s  %3d / %3d / %3d\n", colour_name(p.colour_a).c_str(),
                      colour_name(p.colour_b).c_str(), p.chose_a, p.chose_b, p.neither);
        text << line;
    }
    text << "decided " << ranking.decided << ", smallest adjacent gap " << ranking.min_gap() << "\n";
    return {lines(rows), text.str()};
}

CampaignResult truth_campaign(const CampaignSpec& spec) {
    const GateHarness h = harness_with(spec.kind, spec.scene_text, spec.budget);
    const TruthTable table = truth_table(h, spec.trials, spec.seed, spec.calibration);

    Json head = header("campaign", spec.seed, spec.calibration);
    head["campaign"] = "truth";
    head["gate"] = to_string(spec.kind);
    head["trials"] = spec.trials;
    head["budget"] = h.budget;
    add_scene(head, h, spec.scene_text);
    std::vector<Json> rows{head};
    truth_trials(table, spec.seed, "truth-", rows);
    Json table_rows = Json::array();
    for (const auto& row : table.rows) table_rows.push_back(truth_row_json(row));
    rows.push_back({{"record", "summary"}, {"gate", to_string(spec.kind)}, {"rows", std::move(table_rows)}});
    return {lines(rows), truth_text(table)};
}

CampaignResult fault_campaign(const CampaignSpec& spec) {
    const FaultSweep sweep = fault_sweep(spec.variable, spec.levels, spec.trials, spec.seed, spec.calibration);

    Json head = header("campaign", spec.seed, spec.calibration);
    head["campaign"] = "fault";
    head["variable"] = to_string(spec.variable);
    head["levels"] = spec.levels;
    head["trials"] = spec.trials;
    std::vector<Json> rows{head};
    Json levels = Json::array();
    std::ostringstream text;
    text << "fault sweep over " << to_string(spec.variable) << ", " << spec.trials << " trials per row\n";
    text << "level     failures  rate   completed  median delay  mean tubules  z vs first  p\n";
    const FaultLevel& first = sweep.levels.front();
    for (const auto& level : sweep.levels) {
        for (const auto& t : level.tables) truth_trials(t, spec.seed, "fault-" + fixed(level.level, 1) + "-", rows);
        const ZTest z = two_proportion_z_test(level.failures, level.trials, first.failures, first.trials);
        levels.push_back({{"level", level.level},
                          {"trials", level.trials},
                          {"failures", level.failures},
                          {"failure_rate", level.failure_rate()},
                          {"completed", level.completed},
                          {"median_delay", optional_json(level.median_delay)},
                          {"mean_tubules", level.mean_tubules},
                          {"z_vs_first", z.z},
                          {"p_vs_first", z.p}});
        char line[160];
        std::snprintf(line, sizeof line, "%-8s  %4d/%-4d %5.3f  %9d  %12s  %12s  %10s  %.4f\n", fixed(level.level, 1).c_str(),
                      level.failures, level.trials, level.failure_rate(), level.completed,
                      maybe(level.median_delay).c_str(), fixed(level.mean_tubules).c_str(), fixed(z.z).c_str(), z.p);
        text << line;
    }
    rows.push_back({{"record", "summary"}, {"variable", to_string(spec.variable)}, {"levels", std::move(levels)}});
    return {lines(rows), text.str()};
}

CampaignResult reuse_campaign_record(const CampaignSpec& spec) {
    const ReuseReport report = reuse_campaign(spec.trials, spec.seed, spec.calibration);

    Json head = header("campaign", spec.seed, spec.calibration);
    head["campaign"] = "reuse";
    head["trials"] = spec.trials;
    std::vector<Json> rows{head};
    for (const auto& r : report.records) rows.push_back(trial_json(r));
    int reset_completed = 0;
    for (const auto& t : report.pnand) reset_completed += t.reset_completed;
    rows.push_back({{"record", "summary"},
                    {"seeds", report.seeds},
                    {"pnand_reset", report.pnand.size()},
                    {"reset_completed", reset_completed},
                    {"withdrawal_in_window", report.withdrawal_in_window},
                    {"fresh_median", optional_json(report.fresh_median)},
                    {"reset_median", optional_json(report.reset_median)},
                    {"pnot_attempted", report.pnot_attempted},
                    {"pnot_rereset_low", report.pnot_rereset_low}});

    std::ostringstream text;
    text << "reuse over " << report.seeds << " seeds\n";
    text << "  PNAND reset runs            " << report.pnand.size() << "\n";
    text << "  withdrawal in 120-360 ticks " << report.withdrawal_in_window << "\n";
    text << "  rewired after reset         " << reset_completed << "\n";
    text << "  median delay fresh / reset  " << maybe(report.fresh_median) << " / " << maybe(report.reset_median) << "\n";
    text << "  PNOT re-reset left low      " << report.pnot_rereset_low << "/" << report.pnot_attempted << "\n";
    return {lines(rows), text.str()};
}

std::vector<Json> parse_lines(std::string_view record) {
    std::vector<Json> rows;
    std::size_t pos = 0;
    while (pos < record.size()) {
        std::size_t end = record.find('\n', pos);
        if (end == std::string_view::npos) end = record.size();
        const std::string_view line = record.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        Json row = Json::parse(line, nullptr, false);
        if (row.is_discarded()) break;  // a torn final line from an interrupted run
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
T field(const Json& h, const char* key) {
    if (!h.contains(key)) throw RecordError(std::string("record header lacks '") + key + "'");
    try {
        return h.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw RecordError(std::string("record header has a malformed '") + key + "'");
    }
}

Calibration header_calibration(const Json& h) {
    Calibration c = calibration_from_config(field<std::string>(h, "calibration"));
    if (calibration_digest(c) != field<std::string>(h, "calibration_digest")) {
        throw RecordError("calibration digest does not match the recorded calibration");
    }
    return c;
}

std::optional<std::string> header_scene(const Json& h) {
    if (!h.contains("scene_source")) return std::nullopt;
    if (field<std::string>(h, "scene_source") == "file") return field<std::string>(h, "scene");
    return std::nullopt;
}

GateKind header_gate(const Json& h) {
    const auto kind = gate_kind_from_string(field<std::string>(h, "gate"));
    if (!kind) throw RecordError("record header names an unknown gate");
    return *kind;
}

void check_scene_digest(const Json& h, const GateHarness& harness) {
    if (h.contains("scene_digest") && scene_digest(harness.scene) != field<std::string>(h, "scene_digest")) {
        throw RecordError("scene digest does not match the scene this build produces");
    }
}

}  // namespace

long arena_horizon(const GateHarness& harness, bool scripted) {
    return (scripted ? kScriptHorizonBudgets : 2) * harness.budget;
}

std::string outcome_to_json(const GateOutcome& outcome) { return outcome_json(outcome).dump(); }

GateHarness harness_for(const RunSpec& spec) { return harness_with(spec.kind, spec.scene_text, spec.budget); }

RunResult execute_run(const RunSpec& spec) {
    const GateHarness h = harness_for(spec);
    const bool scripted = !spec.script.empty();
    const auto arena = Arena::build(h.scene, spec.calibration, arena_horizon(h, scripted));

    // Mirrors run_script so a record replays through either path.
    InputBits start = spec.inputs;
    std::size_t next = 0;
    while (next < spec.script.size() && spec.script[next].tick == 0) start = spec.script[next++].inputs;
    GateRun run(h, arena, start, spec.seed);
    for (; next < spec.script.size(); ++next) {
        while (run.tick() < spec.script[next].tick && !run.terminal()) run.step();
        if (run.terminal()) break;
        run.set_inputs(spec.script[next].inputs);
    }
    RunResult result;
    result.outcome = run.finish_segment();

    Json head = header("run", spec.seed, spec.calibration);
    head["gate"] = to_string(spec.kind);
    head["inputs"] = format_inputs(spec.inputs);
    Json script = Json::array();
    for (const auto& s : spec.script) script.push_back({{"tick", s.tick}, {"inputs", format_inputs(s.inputs)}});
    head["script"] = std::move(script);
    head["budget"] = h.budget;
    head["grid"] = spec.grid;
    add_scene(head, h, spec.scene_text);

    std::vector<Json> rows{head};
    for (const auto& e : result.outcome.trace) {
        rows.push_back({{"record", "event"}, {"tick", e.tick}, {"kind", e.kind}, {"detail", e.detail}});
    }
    if (spec.grid) {
        const Grid g = run.state().trail.materialize();
        rows.push_back({{"record", "grid"},
                        {"tick", run.tick()},
                        {"w", g.spec.width},
                        {"h", g.spec.height},
                        {"cells_per_mm", g.spec.cells_per_mm},
                        {"origin", {g.spec.origin.x, g.spec.origin.y}},
                        {"cells", g.values}});
    }
    rows.push_back({{"record", "summary"}, {"outcome", outcome_json(result.outcome)}});
    result.record = lines(rows);
    return result;
}

std::string_view to_string(Campaign campaign) {
    switch (campaign) {
        case Campaign::phototaxis:
            return "phototaxis";
        case Campaign::truth:
            return "truth";
        case Campaign::fault:
            return "fault";
        case Campaign::reuse:
            break;
    }
    return "reuse";
}

std::optional<Campaign> campaign_from_string(std::string_view name) {
    for (Campaign c : {Campaign::phototaxis, Campaign::truth, Campaign::fault, Campaign::reuse}) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

CampaignResult execute_campaign(const CampaignSpec& spec) {
    if (spec.trials < 1) throw ExperimentError("trials must be >= 1");
    switch (spec.campaign) {
        case Campaign::phototaxis:
            return phototaxis_campaign(spec);
        case Campaign::truth:
            return truth_campaign(spec);
        case Campaign::fault:
            return fault_campaign(spec);
        case Campaign::reuse:
            break;
    }
    return reuse_campaign_record(spec);
}

std::vector<double> parse_levels(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view item = text.substr(pos, end - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw ExperimentError("bad level '" + std::string(item) + "'");
        }
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

ReplayReport replay_record(std::string_view record) {
    const std::vector<Json> rows = parse_lines(record);
    if (rows.empty() || !rows.front().is_object() || rows.front().value("record", "") != "header") {
        throw RecordError("record does not start with a header");
    }
    const Json& h = rows.front();
    ReplayReport report;
    for (const auto& r : rows) {
        if (r.is_object() && r.value("record", "") == "summary") report.recorded = r.dump();
    }

    const std::string command = field<std::string>(h, "command");
    std::string replayed;
    if (command == "run") {
        RunSpec spec;
        spec.kind = header_gate(h);
        spec.inputs = parse_inputs(field<std::string>(h, "inputs"));
        spec.seed = field<std::uint64_t>(h, "seed");
        spec.budget = field<long>(h, "budget");
        spec.scene_text = header_scene(h);
        spec.calibration = header_calibration(h);
        spec.grid = field<bool>(h, "grid");
        for (const auto& s : field<Json>(h, "script")) {
            spec.script.push_back({field<long>(s, "tick"), parse_inputs(field<std::string>(s, "inputs"))});
        }
        check_scene_digest(h, harness_for(spec));
        replayed = execute_run(spec).record;
    } else if (command == "campaign") {
        CampaignSpec spec;
        const auto campaign = campaign_from_string(field<std::string>(h, "campaign"));
        if (!campaign) throw RecordError("record header names an unknown campaign");
        spec.campaign = *campaign;
        spec.seed = field<std::uint64_t>(h, "seed");
        spec.trials = field<int>(h, "trials");
        spec.calibration = header_calibration(h);
        if (spec.campaign == Campaign::truth) {
            spec.kind = header_gate(h);
            spec.scene_text = header_scene(h);
            spec.budget = field<long>(h, "budget");
            check_scene_digest(h, harness_with(spec.kind, spec.scene_text, spec.budget));
        } else if (spec.campaign == Campaign::phototaxis) {
            spec.budget = field<long>(h, "budget");
        } else if (spec.campaign == Campaign::fault) {
            const auto variable = fault_variable_from_string(field<std::string>(h, "variable"));
            if (!variable) throw RecordError("record header names an unknown fault variable");
            spec.variable = *variable;
            spec.levels = field<std::vector<double>>(h, "levels");
        }
        replayed = execute_campaign(spec).record;
    } else {
        throw RecordError("record header names an unknown command '" + command + "'");
    }
    const std::vector<Json> again = parse_lines(replayed);
    report.replayed = again.back().dump();
    report.match = !report.recorded.empty() && report.recorded == report.replayed;
    return report;
}

}  // namespace slimegate
