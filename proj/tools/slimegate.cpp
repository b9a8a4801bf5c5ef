#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "slimegate/config.hpp"
#include "slimegate/records.hpp"
#include "slimegate/scene_config.hpp"

namespace fs = std::filesystem;
using namespace slimegate;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;
constexpr const char* kOutDirEnv = "SLIMEGATE_OUT_DIR";

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("cannot write " + path.string());
}

fs::path output_path(const std::string& flag, const std::string& default_name) {
    if (!flag.empty()) return flag;
    const char* dir = std::getenv(kOutDirEnv);
    return fs::path(dir != nullptr && *dir != '\0' ? dir : ".") / default_name;
}

struct Common {
    std::uint64_t seed = 1;
    long budget = 0;
    std::string calibration;
    std::string scene;
    std::string out;
    int trials = 40;
    std::string gate;

    Calibration load_calibration() const {
        return calibration.empty() ? Calibration{} : calibration_from_config(read_file(calibration));
    }
    std::optional<std::string> load_scene() const {
        if (scene.empty()) return std::nullopt;
        std::string text = read_file(scene);
        scene_from_config(text);  // validate before any simulation starts
        return text;
    }
    std::optional<long> budget_flag() const { return budget > 0 ? std::optional<long>(budget) : std::nullopt; }
};

GateKind parse_gate(const std::string& name) {
    const auto kind = gate_kind_from_string(name);
    if (!kind) throw UsageError("--gate must be pnot or pnand");
    return *kind;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Random seed (u64)");
    app->add_option("--budget", c.budget, "Ticks per run segment")->check(CLI::PositiveNumber);
    app->add_option("--calibration", c.calibration, "Calibration file");
    app->add_option("--out", c.out, std::string("Record path (default: $") + kOutDirEnv + "/<name>.jsonl)");
}

int run_command(const Common& c, const std::string& inputs, const std::string& script_path, bool grid) {
    RunSpec spec;
    spec.kind = parse_gate(c.gate);
    spec.seed = c.seed;
    spec.budget = c.budget_flag();
    spec.calibration = c.load_calibration();
    spec.scene_text = c.load_scene();
    spec.grid = grid;
    if (!script_path.empty()) spec.script = parse_script(read_file(script_path));
    const GateHarness harness = harness_for(spec);
    try {
        spec.inputs = parse_inputs(inputs);
        check_inputs(harness, spec.inputs);
    } catch (const GateError& e) {
        throw UsageError(std::string("--in: ") + e.what());
    }
    for (const auto& s : spec.script) check_inputs(harness, s.inputs);

    const RunResult r = execute_run(spec);
    const fs::path path = output_path(c.out, "run-" + c.gate + "-" + std::to_string(c.seed) + ".jsonl");
    write_file(path, r.record);
    const GateOutcome& o = r.outcome;
    std::printf("%s %s seed %llu: logic %d, %s", c.gate.c_str(), format_inputs(spec.inputs).c_str(),
                static_cast<unsigned long long>(c.seed), o.logic_output,
                o.completed ? ("completed on " + o.target).c_str() : std::string(to_string(o.final_mode)).c_str());
    if (o.propagation_delay) std::printf(" after %ld ticks", *o.propagation_delay);
    std::printf(", %.3f V, %d tubule(s)\nrecord %s\n", o.final_reading.output_voltage, o.final_reading.tubule_count,
                path.string().c_str());
    return 0;
}

int campaign_command(const Common& c, const std::string& name, const std::string& var, const std::string& levels) {
    CampaignSpec spec;
    const auto campaign = campaign_from_string(name);
    if (!campaign) throw UsageError("unknown campaign '" + name + "' (phototaxis, truth, fault, reuse)");
    spec.campaign = *campaign;
    spec.trials = c.trials;
    spec.seed = c.seed;
    spec.calibration = c.load_calibration();
    std::string label = name;
    switch (spec.campaign) {
        case Campaign::truth:
            spec.kind = parse_gate(c.gate);
            spec.scene_text = c.load_scene();
            spec.budget = c.budget_flag();
            label += "-" + c.gate;
            break;
        case Campaign::phototaxis:
            spec.budget = c.budget_flag();
            break;
        case Campaign::fault: {
            if (var.empty()) throw UsageError("fault needs --var luminosity|gap|voltage");
            const auto v = fault_variable_from_string(var);
            if (!v) throw UsageError("--var must be luminosity, gap or voltage");
            spec.variable = *v;
            if (levels.empty()) throw UsageError("fault needs --levels");
            try {
                spec.levels = parse_levels(levels);
            } catch (const ExperimentError& e) {
                throw UsageError(e.what());
            }
            label += "-" + var;
            break;
        }
        case Campaign::reuse:
            break;
    }
    const bool scene_used = spec.campaign == Campaign::truth;
    const bool budget_used = spec.campaign == Campaign::truth || spec.campaign == Campaign::phototaxis;
    if (!c.scene.empty() && !scene_used) throw UsageError("--scene applies to run and truth only");
    if (c.budget > 0 && !budget_used) throw UsageError("--budget applies to run, truth and phototaxis only");

    const CampaignResult r = execute_campaign(spec);
    const fs::path path = output_path(c.out, "campaign-" + label + "-" + std::to_string(c.seed) + ".jsonl");
    write_file(path, r.record);
    std::cout << r.summary << "record " << path.string() << "\n";
    return 0;
}

int replay_command(const std::string& record_path) {
    const ReplayReport r = replay_record(read_file(record_path));
    if (r.match) {
        std::cout << "replay matches " << record_path << "\n";
        return 0;
    }
    std::cout << "replay differs from " << record_path << "\nrecorded: " << r.recorded << "\nreplayed: " << r.replayed
              << "\n";
    return kExitMismatch;
}

int cascade_command(const std::string& netlist_path, double dish, double delay) {
    const Netlist n = netlist_path.empty() ? half_adder_netlist() : parse_netlist(read_file(netlist_path));
    const CascadeEstimate e = estimate_cascade(n, dish, delay);
    std::printf("%d NAND gates in %.0f mm dishes: %.3f m^2 of bench, depth %d, %.0f ticks (%.1f days)\n", e.gates, dish,
                e.area_m2, e.depth, e.delay_ticks, e.delay_ticks / 1440.0);
    return 0;
}

int calibrate_command(const Common& c, const std::vector<std::string>& target_texts, int fit_budget) {
    std::vector<CalibrationTarget> targets;
    for (const auto& text : target_texts) {
        // statistic=value[:tolerance]
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw UsageError("--target must be statistic=value[:tolerance]");
        CalibrationTarget t;
        t.statistic = text.substr(0, eq);
        const std::string rest = text.substr(eq + 1);
        const auto colon = rest.find(':');
        try {
            t.value = std::stod(rest.substr(0, colon));
            if (colon != std::string::npos) t.tolerance = std::stod(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("bad number in --target " + text);
        }
        targets.push_back(t);
    }
    FitOptions options;
    options.budget = fit_budget;
    options.trials = c.trials;
    options.seed = c.seed;
    const CalibrationFit fit = calibrate(c.load_calibration(), targets, options);
    const fs::path path = output_path(c.out, "calibration.conf");
    write_file(path, emit_calibration(fit.calibration));
    for (const auto& [name, r] : fit.residuals) std::printf("%-14s residual %.4f\n", name.c_str(), r);
    for (const auto& v : fit.violations) std::printf("violation: %s\n", v.c_str());
    std::printf("%d evaluations, calibration %s\n", fit.evaluations, path.string().c_str());
    return fit.satisfied() ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optically coupled slime-mould logic gate simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common c;
    std::string inputs;
    std::string script;
    bool grid = false;
    auto* run = app.add_subcommand("run", "Run one gate and write its record");
    add_common(run, c);
    run->add_option("--gate", c.gate, "pnot or pnand")->required();
    run->add_option("--in", inputs, "Initial inputs, e.g. A=1,B=0")->required();
    run->add_option("--scene", c.scene, "Custom scene file");
    run->add_option("--script", script, "Input changes, one 'tick channel=bit,...' per line");
    run->add_flag("--grid", grid, "Append the final trail grid to the record");

    std::string campaign_name;
    std::string var;
    std::string levels;
    auto* campaign = app.add_subcommand("campaign", "Run an experiment campaign");
    campaign->add_option("name", campaign_name, "phototaxis, truth, fault or reuse")->required();
    add_common(campaign, c);
    campaign->add_option("--gate", c.gate, "pnot or pnand (truth)");
    campaign->add_option("--trials", c.trials, "Trials per pair, row, level or seeds for reuse")->check(CLI::PositiveNumber);
    campaign->add_option("--scene", c.scene, "Custom scene file (truth)");
    campaign->add_option("--var", var, "Fault variable: luminosity, gap or voltage");
    campaign->add_option("--levels", levels, "Comma-separated fault levels");

    std::string record;
    auto* replay = app.add_subcommand("replay", "Re-simulate a record and compare its final summary");
    replay->add_option("record", record, "Record file")->required();

    std::string netlist;
    double dish = 90.0;
    double delay = kMedianGateDelay;
    auto* cascade = app.add_subcommand("cascade", "Bench area and delay of a NAND netlist");
    cascade->add_option("--netlist", netlist, "Netlist file (default: half adder)");
    cascade->add_option("--dish", dish, "Dish diameter, mm")->check(CLI::PositiveNumber);
    cascade->add_option("--delay", delay, "Median gate delay, ticks")->check(CLI::PositiveNumber);

    std::vector<std::string> targets;
    int fit_budget = FitOptions{}.budget;
    auto* fit = app.add_subcommand("calibrate", "Fit a calibration to named targets");
    add_common(fit, c);
    fit->add_option("--target", targets, "statistic=value[:tolerance]");
    fit->add_option("--trials", c.trials, "Seeds per statistic")->check(CLI::PositiveNumber);
    fit->add_option("--fit-budget", fit_budget, "Candidate evaluations")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run) return run_command(c, inputs, script, grid);
        if (*campaign) return campaign_command(c, campaign_name, var, levels);
        if (*replay) return replay_command(record);
        if (*cascade) return cascade_command(netlist, dish, delay);
        if (*fit) return calibrate_command(c, targets, fit_budget);
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "io: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SceneValidationError& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        // Gate, script, netlist, experiment and record errors all describe bad input.
        std::cerr << "config: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitUsage;
}
