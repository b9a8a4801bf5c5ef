#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slimegate/calibration.hpp"
#include "slimegate/experiments.hpp"
#include "slimegate/gates.hpp"

namespace slimegate {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// A record that cannot be parsed or replayed.
class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a single gate run depends on. A run without a script is a plain
/// run_gate; with one it follows the scripted input changes.
struct RunSpec {
    GateKind kind = GateKind::pnot;
    InputBits inputs;
    std::vector<ScriptStep> script;
    std::uint64_t seed = 0;
    std::optional<long> budget;            // overrides the harness budget
    std::optional<std::string> scene_text;  // custom scene; default layout otherwise
    Calibration calibration;
    bool grid = false;                     // append the final trail grid as a row
};

GateHarness harness_for(const RunSpec& spec);

/// Field horizon for a run. Scripted runs and live sessions use a longer,
/// fixed horizon so a session and its exported script see identical fields.
long arena_horizon(const GateHarness& harness, bool scripted);

struct RunResult {
    GateOutcome outcome;
    std::string record;  // JSON lines
};

RunResult execute_run(const RunSpec& spec);

/// The outcome object a run record's summary line carries.
std::string outcome_to_json(const GateOutcome& outcome);

enum class Campaign { phototaxis, truth, fault, reuse };
std::string_view to_string(Campaign campaign);
std::optional<Campaign> campaign_from_string(std::string_view name);

struct CampaignSpec {
    Campaign campaign = Campaign::truth;
    GateKind kind = GateKind::pnot;  // truth only
    int trials = 40;                 // per pair, per row, per level or seeds for reuse
    std::uint64_t seed = 0;
    std::optional<long> budget;
    std::optional<std::string> scene_text;  // truth only
    Calibration calibration;
    FaultVariable variable = FaultVariable::gap;
    std::vector<double> levels;
};

struct CampaignResult {
    std::string record;   // JSON lines: header, one row per trial, summary
    std::string summary;  // human-readable table
};

CampaignResult execute_campaign(const CampaignSpec& spec);

/// Parses "10,15,20".
std::vector<double> parse_levels(std::string_view text);

struct ReplayReport {
    bool match = false;
    std::string recorded;  // summary line from the record
    std::string replayed;  // summary line from the new execution
};

/// Re-executes the command named by the record's header and compares the
/// final summaries. Tolerates a missing or truncated tail only by reporting a
/// mismatch; a missing header is a RecordError.
ReplayReport replay_record(std::string_view record);

}  // namespace slimegate
