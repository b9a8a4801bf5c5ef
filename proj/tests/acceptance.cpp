// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "slimegate/experiments.hpp"
#include "slimegate/gates.hpp"
#include "slimegate/records.hpp"

using namespace slimegate;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kTrials = 40;
constexpr std::uint64_t kSeed = 1;
constexpr double kDayTicks = 1440.0;

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Command {
    int status = -1;
    std::string output;
};

Command shell(const std::string& cmd) {
    Command c;
    FILE* p = popen((cmd + " 2>&1").c_str(), "r");
    if (p == nullptr) return c;
    std::array<char, 4096> buf;
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) c.output.append(buf.data(), n);
    const int raw = pclose(p);
    c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return c;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json last_json_line(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string last;
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    return json::parse(last);
}

double rate(int k, int n) { return n > 0 ? static_cast<double>(k) / n : 0.0; }

Verdict phototaxis(const fs::path& work) {
    const fs::path out = work / "phototaxis.jsonl";
    const auto start = std::chrono::steady_clock::now();
    const Command c = shell(std::string(SLIMEGATE_CLI) + " campaign phototaxis --trials 40 --seed 1 --out " + out.string());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.status != 0) return {false, "cli exited " + std::to_string(c.status) + ": " + c.output};
    const json s = last_json_line(slurp(out));
    std::string order;
    std::vector<int> points;
    for (const auto& o : s["order"]) {
        if (!order.empty()) order += " > ";
        order += o["colour"].get<std::string>() + " " + std::to_string(o["phobia_points"].get<int>());
        points.push_back(o["phobia_points"]);
    }
    bool exact = s["order"].size() == 4;
    const std::array<const char*, 4> expected{"green", "red", "yellow", "blue"};
    for (std::size_t i = 0; exact && i < 4; ++i) exact = s["order"][i]["colour"] == expected[i];
    const int gap = s["min_gap"];
    return {exact && gap >= 4 && secs < 60.0, fmt("%s, min gap %d, %.1f s", order.c_str(), gap, secs)};
}

struct Baseline {
    TruthTable pnot;
    TruthTable pnand;
};

Verdict pnot_truth(const Baseline& b) {
    const TruthRow& zero = b.pnot.rows[0];
    const TruthRow& one = b.pnot.rows[1];
    int completions = 0;
    int inside = 0;
    for (const auto* row : {&zero, &one}) {
        for (const auto& o : row->outcomes) {
            if (!o.completed || !o.propagation_delay) continue;
            ++completions;
            inside += *o.propagation_delay >= kDayTicks && *o.propagation_delay <= 4 * kDayTicks;
        }
    }
    const double r1 = one.success_rate();
    const double r0 = zero.success_rate();
    const double window = rate(inside, completions);
    return {r1 == 1.0 && std::abs(r0 - 0.75) <= 0.10 && window >= 0.80,
            fmt("in 1 -> 0 in %.0f%%, in 0 -> 1 in %.0f%%, %d/%d delays in [1440, 5760]", 100 * r1, 100 * r0, inside,
                completions)};
}

Verdict pnand_truth(const Baseline& b) {
    const double ref = b.pnot.rows[0].success_rate();
    std::array<double, 4> r{};
    for (int i = 0; i < 4; ++i) r[i] = b.pnand.rows[i].success_rate();
    bool pass = r[3] == 1.0 && std::abs(r[1] - r[2]) < 0.10;
    for (int i = 0; i < 3; ++i) pass = pass && std::abs(r[i] - ref) <= 0.10;
    return {pass, fmt("00 %.0f%%, 01 %.0f%%, 10 %.0f%%, 11 -> 0 in %.0f%%, PNOT row 0 %.0f%%", 100 * r[0], 100 * r[1],
                      100 * r[2], 100 * r[3], 100 * ref)};
}

Verdict reset() {
    const ReuseReport r = reuse_campaign(kTrials, kSeed);
    const int n = static_cast<int>(r.pnand.size());
    const double in_window = rate(r.withdrawal_in_window, n);
    const bool faster = r.fresh_median && r.reset_median && *r.reset_median < *r.fresh_median;
    const bool rereset = r.pnot_attempted > 0 && r.pnot_rereset_low == r.pnot_attempted;
    return {n > 0 && in_window >= 0.90 && faster && rereset,
            fmt("withdrawal in 120-360 ticks %d/%d, median delay reset %.0f vs fresh %.0f, PNOT re-reset low %d/%d",
                r.withdrawal_in_window, n, r.reset_median.value_or(NAN), r.fresh_median.value_or(NAN),
                r.pnot_rereset_low, r.pnot_attempted)};
}

Verdict fault() {
    const FaultSweep gap = fault_sweep(FaultVariable::gap, {10.0, 20.0}, kTrials, kSeed);
    const FaultLevel& g10 = gap.levels[0];
    const FaultLevel& g20 = gap.levels[1];
    const ZTest zg = two_proportion_z_test(g20.failures, g20.trials, g10.failures, g10.trials);

    const FaultSweep lum = fault_sweep(FaultVariable::luminosity, {0.0, 50.0}, kTrials, kSeed);
    const FaultLevel& l0 = lum.levels[0];
    const FaultLevel& l50 = lum.levels[1];
    const ZTest zl = two_proportion_z_test(l50.failures, l50.trials, l0.failures, l0.trials);

    const FaultSweep volt = fault_sweep(FaultVariable::voltage, {9.0, 24.0}, kTrials, kSeed);
    const double t9 = volt.levels[0].mean_tubules;
    const double t24 = volt.levels[1].mean_tubules;

    const bool pass = g20.failure_rate() > g10.failure_rate() && zg.p < 0.05 && zl.p >= 0.05 && t24 > 1.0 &&
                      std::abs(t9 - 1.0) <= 0.1;
    return {pass, fmt("gap 20 fails %d/%d vs gap 10 %d/%d (p %.2g); +50 mcd %d/%d vs %d/%d (p %.2g); tubules 24 V %.2f "
                      "vs 9 V %.2f",
                      g20.failures, g20.trials, g10.failures, g10.trials, zg.p, l50.failures, l50.trials, l0.failures,
                      l0.trials, zl.p, t24, t9)};
}

Verdict circuit() {
    const Scene scene = build_pnot().scene;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> g(1e-6, 1e-3);
    double worst = 0.0;
    int connected = 0;
    bool agree = true;
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> nodes(2, 20);
        const int n = nodes(gen);
        ConductiveNetwork net;
        net.add_node("X", {}, true);
        net.add_node("Y", {}, true);
        for (int i = 2; i < n; ++i) net.add_node("J" + std::to_string(i), {});
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::uniform_int_distribution<int> count(n / 2, 2 * n);
        const int m = count(gen);
        for (int e = 0; e < m; ++e) net.add_edge(pick(gen), pick(gen), 1.0, g(gen));
        const Resistance got = path_resistance(net, scene, "X", "Y");
        const auto tubes = oracle::pinv_resistance(net, 0, 1);
        if (got.has_value() != tubes.has_value()) {
            agree = false;
            continue;
        }
        if (!got) continue;
        ++connected;
        const double expected = 18000.0 + *tubes + 18000.0;
        worst = std::max(worst, std::abs(*got - expected) / expected);
    }
    bool exact = true;
    for (double r : {Calibration{}.tube_resistance, 1000.0, 12500.0, 250000.0}) {
        ConductiveNetwork single;
        const int x = single.add_node("X", {}, true);
        const int y = single.add_node("Y", {}, true);
        single.add_edge(x, y, 10.0, 1.0 / r);
        const Resistance total = path_resistance(single, scene, "X", "Y");
        exact = exact && total && *total == 18000.0 + r + 18000.0;
    }
    return {agree && worst <= 1e-9 && exact,
            fmt("%d connected graphs, worst relative error %.2e, single tube exact: %s", connected, worst,
                exact ? "yes" : "no")};
}

Verdict cascade() {
    const CascadeEstimate e = estimate_cascade(half_adder_netlist(), 90.0);
    const Command c = shell(std::string(SLIMEGATE_CLI) + " cascade --dish 90");
    const bool cli = c.status == 0 && c.output.find("0.510 m^2") != std::string::npos &&
                     c.output.find("depth 3") != std::string::npos;
    return {e.gates == 7 && std::abs(e.area_m2 - 0.5) <= 0.1 && cli,
            fmt("%d gates, %.3f m^2, depth %d; cli: %s", e.gates, e.area_m2, e.depth,
                c.output.substr(0, c.output.find('\n')).c_str())};
}

Verdict determinism(const fs::path& work) {
    std::vector<std::string> notes;
    bool pass = true;

    // Library: a fresh run, a scripted reset and a truth campaign.
    RunSpec plain;
    plain.kind = GateKind::pnand;
    plain.inputs = {{"A", 0}, {"B", 1}};
    plain.seed = 11;
    RunSpec scripted;
    scripted.kind = GateKind::pnot;
    scripted.inputs = {{"A", 0}};
    scripted.seed = 7;
    scripted.script = parse_script("0 A=0\n4000 A=1\n");
    scripted.grid = true;
    int runs_ok = 0;
    for (const RunSpec& spec : {plain, scripted}) {
        const RunResult a = execute_run(spec);
        const RunResult b = execute_run(spec);
        runs_ok += a.record == b.record && replay_record(a.record).match;
    }
    pass = pass && runs_ok == 2;
    notes.push_back(fmt("runs identical and replayed %d/2", runs_ok));

    CampaignSpec truth;
    truth.campaign = Campaign::truth;
    truth.kind = GateKind::pnot;
    truth.trials = 3;
    truth.seed = 5;
    const CampaignResult t1 = execute_campaign(truth);
    const bool campaign_ok = t1.record == execute_campaign(truth).record && replay_record(t1.record).match;
    pass = pass && campaign_ok;
    notes.push_back(std::string("campaign ") + (campaign_ok ? "ok" : "differs"));

    // CLI: two executions to files, then replay of one of them.
    const fs::path a = work / "det-a.jsonl";
    const fs::path b = work / "det-b.jsonl";
    const std::string run = std::string(SLIMEGATE_CLI) + " run --gate pnand --in A=1,B=0 --seed 42 --out ";
    const Command ca = shell(run + a.string());
    const Command cb = shell(run + b.string());
    const bool bytes = ca.status == 0 && cb.status == 0 && slurp(a) == slurp(b) && !slurp(a).empty();
    const Command rp = shell(std::string(SLIMEGATE_CLI) + " replay " + a.string());
    pass = pass && bytes && rp.status == 0;
    notes.push_back(std::string("cli files ") + (bytes ? "byte-identical" : "differ") + ", cli replay exit " +
                    std::to_string(rp.status));

    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
    return {pass, detail};
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / ("slimegate-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(work);

    report("phototaxis ranking", [&] { return phototaxis(work); });

    Baseline base;
    const GateHarness pnot = build_pnot();
    const GateHarness pnand = build_pnand();
    base.pnot = truth_table(pnot, kTrials, kSeed);
    base.pnand = truth_table(pnand, kTrials, kSeed);
    report("PNOT truth behaviour", [&] { return pnot_truth(base); });
    report("PNAND truth behaviour", [&] { return pnand_truth(base); });
    report("reset and reprogram", reset);
    report("fault tolerance", fault);
    report("circuit oracle equivalence", circuit);
    report("cascade estimate", cascade);
    report("determinism and replay", [&] { return determinism(work); });

    std::error_code ec;
    fs::remove_all(work, ec);
    return failures;
}
