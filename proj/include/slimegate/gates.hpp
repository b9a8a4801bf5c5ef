#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slimegate/calibration.hpp"
#include "slimegate/circuit.hpp"
#include "slimegate/fields.hpp"
#include "slimegate/parallel.hpp"
#include "slimegate/plasmodium.hpp"
#include "slimegate/scene.hpp"

namespace slimegate {

enum class GateKind { pnot, pnand };

std::string_view to_string(GateKind kind);
std::optional<GateKind> gate_kind_from_string(std::string_view name);

struct OutputCircuit {
    double supply_voltage = 9.0;
    double load = 10000.0;         // ohm
    double logic_threshold = 0.5;  // volts
    bool operator==(const OutputCircuit&) const = default;
};

struct GateHarness {
    GateKind kind = GateKind::pnot;
    Scene scene;
    std::map<std::string, std::vector<std::string>> inputs;  // channel -> LED ids
    std::string source_electrode = "X";
    std::vector<std::string> target_electrodes;
    OutputCircuit output;
    long budget = 8640;  // ticks per run segment
    bool operator==(const GateHarness&) const = default;
};

class GateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Harness invariants on top of validate_scene.
std::vector<std::string> check_harness(const GateHarness& harness);

/// Electrode gap is the edge-to-edge distance between footprints.
GateHarness build_pnot(double gap = 10.0, double supply = 9.0);
GateHarness build_pnand(double gap = 10.0, double supply = 9.0);
/// Wraps a custom scene: source X, every other electrode a target, one
/// input per LED channel. Throws GateError when the result is not a gate.
GateHarness harness_from_scene(GateKind kind, Scene scene, double supply = 9.0);

using InputBits = std::map<std::string, int>;  // channel -> 0 or 1

/// Throws GateError unless `inputs` sets every channel of the harness to 0 or 1.
void check_inputs(const GateHarness& harness, const InputBits& inputs);
InputBits parse_inputs(std::string_view text);  // "A=1,B=0"
std::string format_inputs(const InputBits& inputs);
int ideal_output(GateKind kind, const InputBits& inputs);
/// Every input combination, first channel most significant.
std::vector<InputBits> input_rows(const GateHarness& harness);

struct TraceEvent {
    long tick = 0;
    std::string kind;
    std::string detail;
    bool operator==(const TraceEvent&) const = default;
};

struct GateOutcome {
    int logic_output = 0;
    bool completed = false;
    bool failed = false;  // never left the inoculation blob
    std::optional<long> propagation_delay;
    OutputReading final_reading;
    std::string target;  // electrode the completing tube reached
    Mode final_mode = Mode::exploring;
    long start_tick = 0;
    long end_tick = 0;
    std::optional<long> withdrawal_ticks;  // reset only: time to clear the lit target
    double max_lit_target_occupancy = 0.0;
    bool lit_target_connected = false;
    std::vector<TraceEvent> trace;
    bool operator==(const GateOutcome&) const = default;
};

/// Read-only resources shared by every run on one scene and calibration.
struct Arena {
    Scene scene;
    Calibration calibration;
    std::shared_ptr<const CellMap> cells;
    std::shared_ptr<const AttractantTimeline> timeline;
    // Strongest single-source attractant at each blob margin, per timeline frame.
    std::vector<std::vector<double>> margin_cue;

    double margin_at(int blob, long tick) const;

    static std::shared_ptr<const Arena> build(const Scene& scene, const Calibration& calibration, long horizon);
};

/// Live simulation of one harness. Each input change opens a new segment
/// that ends on completion (a tube to a target that was not connected when
/// the segment opened), on a terminal mode, or when the budget runs out.
class GateRun {
public:
    GateRun(const GateHarness& harness, const Calibration& calibration, const InputBits& inputs, std::uint64_t seed);
    GateRun(const GateHarness& harness, std::shared_ptr<const Arena> arena, const InputBits& inputs,
            std::uint64_t seed);

    /// Applies new LED states at the current tick boundary and opens a segment.
    void set_inputs(const InputBits& inputs);
    /// One tick. No-op once the plasmodium is terminal.
    void step();
    /// Steps until the open segment finishes.
    const GateOutcome& finish_segment();

    long tick() const { return tick_; }
    bool segment_finished() const { return finished_; }
    const GateOutcome& outcome() const { return outcome_; }
    const InputBits& inputs() const { return inputs_; }
    const GateHarness& harness() const { return harness_; }
    const Arena& arena() const { return *arena_; }
    const PlasmodiumState& state() const { return state_; }
    const StimulusFields& fields() const { return fields_; }
    bool terminal() const { return is_terminal(state_.mode); }

    /// Targets whose footprint the thresholded trail connects to the source.
    std::set<std::string> connected_targets() const;
    OutputReading reading() const;
    /// Lit disc around a target electrode's blob.
    Disc target_region(const std::string& target) const;

private:
    void apply_leds();
    void refresh_potentials();
    void close_segment(long tick);

    GateHarness harness_;
    std::shared_ptr<const Arena> arena_;
    InputBits inputs_;
    PlasmodiumState state_;
    StimulusFields fields_;
    StepPotentials potentials_;
    const Grid* attractant_frame_ = nullptr;
    long tick_ = 0;

    GateOutcome outcome_;
    bool finished_ = false;
    std::set<std::string> connected_at_start_;
    std::set<std::string> lit_targets_;
    std::map<std::string, long> hold_;  // consecutive connected ticks per target
    bool left_home_ = false;
    bool withdrawing_ = false;
};

/// Fresh run from inoculation until completion or budget.
GateOutcome run_gate(const GateHarness& harness, const InputBits& inputs, std::uint64_t seed,
                     const Calibration& calibration = {});
GateOutcome run_gate(const GateHarness& harness, std::shared_ptr<const Arena> arena, const InputBits& inputs,
                     std::uint64_t seed);

/// Flips the inputs of a live run and simulates the new segment. Throws
/// GateError when the previous segment failed or the plasmodium is terminal.
GateOutcome reset_gate(GateRun& run, const InputBits& new_inputs);

struct ScriptStep {
    long tick = 0;
    InputBits inputs;
    bool operator==(const ScriptStep&) const = default;
};

/// Parses "tick channel=bit,..." lines ('#' comments). Ticks must not decrease.
std::vector<ScriptStep> parse_script(std::string_view text);
std::string format_script(const std::vector<ScriptStep>& script);

/// Applies each scripted input change at its tick, then finishes the last
/// segment. A step at tick 0 sets the initial inputs.
GateOutcome run_script(const GateHarness& harness, std::shared_ptr<const Arena> arena, const InputBits& initial,
                       const std::vector<ScriptStep>& script, std::uint64_t seed);

struct TruthRow {
    InputBits inputs;
    int ideal = 0;
    int trials = 0;
    int correct = 0;    // logic output matched the ideal table
    int completed = 0;
    int failed = 0;
    std::optional<double> mean_delay;
    std::optional<double> median_delay;
    double mean_tubules = 0.0;  // over completed runs
    std::vector<GateOutcome> outcomes;

    double success_rate() const { return trials > 0 ? static_cast<double>(correct) / trials : 0.0; }
};

struct TruthTable {
    GateKind kind = GateKind::pnot;
    std::vector<TruthRow> rows;
};

/// Trial t of every row uses seed derive_seed(seed, t), so rows share their
/// random streams. Trials run on all hardware threads; results are ordered
/// by trial index.
TruthTable truth_table(const GateHarness& harness, int trials, std::uint64_t seed, const Calibration& calibration = {});
/// Same, on a prebuilt arena whose geometry matches the harness.
TruthTable truth_table(const GateHarness& harness, std::shared_ptr<const Arena> arena, int trials, std::uint64_t seed);

std::optional<double> median(std::vector<double> values);

struct NandGate {
    std::string out;
    std::string in1;
    std::string in2;
    bool operator==(const NandGate&) const = default;
};

struct Netlist {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<NandGate> gates;
    bool operator==(const Netlist&) const = default;
};

class NetlistError : public std::runtime_error {
public:
    NetlistError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

Netlist parse_netlist(std::string_view text);
Netlist half_adder_netlist();

struct CascadeEstimate {
    int gates = 0;
    double area_m2 = 0.0;
    int depth = 0;
    double delay_ticks = 0.0;
    bool operator==(const CascadeEstimate&) const = default;
};

inline constexpr double kCascadeMargin = 180.0;  // mm of bench space around each dish
inline constexpr double kMedianGateDelay = 4320.0;

/// Pure arithmetic: area = gates * (dish + margin)^2, delay = depth * median
/// gate delay. Throws NetlistError for cycles or undriven signals.
CascadeEstimate estimate_cascade(const Netlist& netlist, double dish_diameter, double median_gate_delay = kMedianGateDelay,
                                 double margin = kCascadeMargin);

}  // namespace slimegate
