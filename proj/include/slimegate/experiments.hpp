#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slimegate/calibration.hpp"
#include "slimegate/gates.hpp"

namespace slimegate {

class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One row of a campaign results table.
struct TrialRecord {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string config;
    std::string outcome;  // closed vocabulary per experiment
    long duration = 0;    // ticks
    std::map<std::string, double> metrics;
    bool operator==(const TrialRecord&) const = default;
};

// ---------------------------------------------------------------- phototaxis

inline constexpr std::array<double, 4> kLedColours{466.0, 568.0, 585.0, 626.0};

/// "blue", "green", "yellow", "red" for the four LED colours, else "<nm> nm".
std::string colour_name(double wavelength);
/// Accepts a colour name or a wavelength in nm.
std::optional<double> parse_colour(std::string_view text);

struct PhototaxisOptions {
    double luminosity = 180.0;         // mcd per LED, two LEDs per pole
    double attractant = 4.0;           // oat-flake strength on each pole
    double colonize_fraction = 0.25;   // share of the plasmodium on a pole that counts as a choice
    long budget = 8640;
    bool operator==(const PhototaxisOptions&) const = default;
};

/// Central inoculation square with attractant poles at 3 and 9 o'clock, each
/// behind a card and lit by two LEDs. Pole A (west) takes `colour_a`, pole B
/// (east) `colour_b`; a wavelength <= 0 leaves that pole dark. Electrodes X,
/// A and B only mark the three agar squares.
GateHarness phototaxis_harness(double colour_a, double colour_b, const PhototaxisOptions& options = {});
/// LED inputs that light every pole with a colour.
InputBits phototaxis_inputs(double colour_a, double colour_b);

enum class Choice { a, b, neither };
std::string_view to_string(Choice choice);

struct PhototaxisResult {
    Choice choice = Choice::neither;
    long decided_at = 0;           // tick of colonization, or the budget
    std::optional<long> departure;  // tick the plasmodium left the centre
    double occupancy_a = 0.0;
    double occupancy_b = 0.0;
    Mode final_mode = Mode::exploring;
    bool operator==(const PhototaxisResult&) const = default;
};

PhototaxisResult phototaxis_trial(double colour_a, double colour_b, std::uint64_t seed,
                                  const Calibration& calibration = {}, const PhototaxisOptions& options = {});
/// Shares an arena built from any phototaxis harness with the same options.
PhototaxisResult phototaxis_trial(double colour_a, double colour_b, std::uint64_t seed,
                                  std::shared_ptr<const Arena> arena, const PhototaxisOptions& options = {});
std::shared_ptr<const Arena> phototaxis_arena(const Calibration& calibration, const PhototaxisOptions& options = {});

struct PairTally {
    double colour_a = 0.0;
    double colour_b = 0.0;
    int chose_a = 0;
    int chose_b = 0;
    int neither = 0;
    bool operator==(const PairTally&) const = default;
};

struct ColourScore {
    double wavelength = 0.0;
    int phobia_points = 0;
    bool operator==(const ColourScore&) const = default;
};

struct Ranking {
    std::vector<ColourScore> order;  // most avoided first
    std::vector<PairTally> pairs;
    std::vector<TrialRecord> records;
    int decided = 0;
    /// Smallest point difference between adjacent ranks.
    int min_gap() const;
};

/// Every unordered colour pair, `trials` seeds each; the avoided colour of
/// each decided trial earns one phobia point. Trial t of every pair uses
/// seed derive_seed(seed, t).
Ranking rank_colours(int trials, std::uint64_t seed, const Calibration& calibration = {},
                     const PhototaxisOptions& options = {});

// ------------------------------------------------------------ fault tolerance

enum class FaultVariable { luminosity, gap, voltage };
std::string_view to_string(FaultVariable variable);
std::optional<FaultVariable> fault_variable_from_string(std::string_view name);

/// Gate harness with one fault variable set: luminosity is mcd added to every
/// LED, gap the electrode gap in mm, voltage the output supply.
GateHarness fault_harness(GateKind kind, FaultVariable variable, double level);

struct FaultLevel {
    double level = 0.0;
    int trials = 0;    // runs over every row of both gates
    int failures = 0;  // runs whose logic output missed the ideal table
    int completed = 0;
    std::optional<double> median_delay;
    double mean_tubules = 0.0;  // over completed runs
    std::vector<TruthTable> tables;

    double failure_rate() const { return trials > 0 ? static_cast<double>(failures) / trials : 0.0; }
};

struct FaultSweep {
    FaultVariable variable = FaultVariable::gap;
    std::vector<FaultLevel> levels;
};

FaultSweep fault_sweep(FaultVariable variable, const std::vector<double>& levels, int trials, std::uint64_t seed,
                       const Calibration& calibration = {});

struct ZTest {
    double z = 0.0;
    double p = 1.0;  // two-sided
};

/// Pooled two-proportion z-test of x1/n1 against x2/n2.
ZTest two_proportion_z_test(int x1, int n1, int x2, int n2);

// ------------------------------------------------------------------- reuse

inline constexpr long kWithdrawalWindowMin = 120;  // 2 h
inline constexpr long kWithdrawalWindowMax = 360;  // 6 h

struct ReuseTrial {
    std::uint64_t seed = 0;
    std::string first_target;
    long fresh_delay = 0;
    std::optional<long> withdrawal_ticks;
    bool reset_completed = false;
    std::optional<long> reset_delay;
    std::string reset_target;
    int reset_logic = 0;
    Mode final_mode = Mode::exploring;
};

struct ReuseReport {
    int seeds = 0;
    std::vector<ReuseTrial> pnand;      // fresh runs that completed, then reprogrammed
    std::vector<double> fresh_delays;   // every completed fresh PNAND run
    int withdrawal_in_window = 0;
    std::optional<double> fresh_median;
    std::optional<double> reset_median;
    int pnot_attempted = 0;             // PNOT runs that completed and were reset
    int pnot_rereset_low = 0;           // of those, re-reset left logic 0
    std::vector<TrialRecord> records;
};

/// PNAND: run (0,0) fresh; once it completes, light the reached target and
/// record withdrawal and re-migration to the other one. PNOT: complete on
/// input 0, reset with input 1, then try input 0 again.
ReuseReport reuse_campaign(int seeds, std::uint64_t seed, const Calibration& calibration = {});

// ------------------------------------------------------------- calibration

/// Named statistics the fitter can target:
///   ranking_gap   phototaxis order Green, Red, Yellow, Blue with adjacent gap >= value
///   pnot_failure  PNOT input-0 failure rate within value +- tolerance
///   delay_window  share of completed PNOT delays inside 1-4 days >= value
///   gap20_failure PNOT input-0 failure rate at a 20 mm gap within value +- tolerance
struct CalibrationTarget {
    std::string statistic;
    double value = 0.0;
    double tolerance = 0.0;
    bool operator==(const CalibrationTarget&) const = default;
};

struct CalibrationFit {
    Calibration calibration;
    std::map<std::string, double> residuals;  // 0 when the target is met
    std::vector<std::string> violations;
    int evaluations = 0;
    bool satisfied() const { return violations.empty(); }
};

struct FitOptions {
    int budget = 12;        // candidate evaluations
    int trials = 20;        // seeds per statistic
    std::uint64_t seed = 1;
};

/// Coordinate search over the phobia weights and the reluctance parameters.
/// With no targets the start calibration comes back unchanged.
CalibrationFit calibrate(const Calibration& start, const std::vector<CalibrationTarget>& targets,
                         const FitOptions& options = {});
std::map<std::string, double> target_residuals(const Calibration& calibration,
                                               const std::vector<CalibrationTarget>& targets, int trials,
                                               std::uint64_t seed);

}  // namespace slimegate
