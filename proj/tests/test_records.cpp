#include "doctest.h"

#include "json.hpp"
#include "slimegate/records.hpp"
#include "slimegate/scene_config.hpp"

using namespace slimegate;

namespace {

RunSpec pnot_spec() {
    RunSpec spec;
    spec.kind = GateKind::pnot;
    spec.inputs = {{"A", 0}};
    spec.seed = 7;
    spec.budget = 4000;
    return spec;
}

std::string last_line(const std::string& text) {
    const std::size_t end = text.find_last_not_of('\n');
    const std::size_t start = text.rfind('\n', end);
    return text.substr(start == std::string::npos ? 0 : start + 1, end - (start == std::string::npos ? 0 : start + 1) + 1);
}

}  // namespace

TEST_CASE("two executions with the same seed are byte-identical") {
    const RunResult a = execute_run(pnot_spec());
    const RunResult b = execute_run(pnot_spec());
    CHECK(a.record == b.record);
    RunSpec other = pnot_spec();
    other.seed = 8;
    CHECK(execute_run(other).record != a.record);

    const auto header = nlohmann::json::parse(a.record.substr(0, a.record.find('\n')));
    CHECK(header["record"] == "header");
    CHECK(header["command"] == "run");
    CHECK(header["seed"] == 7);
    CHECK(header["calibration_digest"] == calibration_digest(Calibration{}));
    const auto summary = nlohmann::json::parse(last_line(a.record));
    CHECK(summary["record"] == "summary");
    CHECK(summary["outcome"]["logic_output"] == a.outcome.logic_output);
}

TEST_CASE("a run record replays to the same summary") {
    RunSpec spec = pnot_spec();
    spec.script = parse_script("0 A=0\n2500 A=1\n");
    spec.grid = true;
    const RunResult r = execute_run(spec);
    const ReplayReport report = replay_record(r.record);
    CHECK(report.match);
    CHECK(report.recorded == report.replayed);
    CHECK(report.recorded == last_line(r.record));
}

TEST_CASE("a custom scene travels inside the record") {
    RunSpec spec = pnot_spec();
    spec.scene_text = emit_config(build_pnot(12.0).scene);
    spec.budget = 1500;
    const RunResult r = execute_run(spec);
    CHECK(replay_record(r.record).match);
}

TEST_CASE("tampered and truncated records do not replay") {
    const RunResult r = execute_run(pnot_spec());
    std::string tampered = r.record;
    const std::size_t at = tampered.rfind("\"end_tick\":");
    REQUIRE(at != std::string::npos);
    tampered.insert(at + 11, "1");
    CHECK_FALSE(replay_record(tampered).match);

    // Cut in the middle of the summary line: the torn line is ignored.
    const std::string torn = r.record.substr(0, r.record.size() - 20);
    const ReplayReport report = replay_record(torn);
    CHECK_FALSE(report.match);

    CHECK_THROWS_AS(replay_record(""), RecordError);
    CHECK_THROWS_AS(replay_record("{\"record\":\"summary\"}\n"), RecordError);

    // A calibration that no longer matches its digest is refused.
    std::string drifted = r.record;
    const std::size_t digest = drifted.find(calibration_digest(Calibration{}));
    REQUIRE(digest != std::string::npos);
    drifted.replace(digest, 4, "0000");
    CHECK_THROWS_AS(replay_record(drifted), RecordError);
}

TEST_CASE("campaign records replay") {
    CampaignSpec spec;
    spec.campaign = Campaign::truth;
    spec.kind = GateKind::pnot;
    spec.trials = 2;
    spec.seed = 3;
    spec.budget = 3000;
    const CampaignResult a = execute_campaign(spec);
    CHECK(a.record == execute_campaign(spec).record);
    CHECK_FALSE(a.summary.empty());
    CHECK(replay_record(a.record).match);
}

TEST_CASE("campaign names and level lists") {
    for (Campaign c : {Campaign::phototaxis, Campaign::truth, Campaign::fault, Campaign::reuse}) {
        CHECK(campaign_from_string(to_string(c)) == c);
    }
    CHECK_FALSE(campaign_from_string("cascade").has_value());
    CHECK(parse_levels("10,15, 20") == std::vector<double>{10.0, 15.0, 20.0});
    CHECK_THROWS(parse_levels("10,,20"));
    CHECK_THROWS(parse_levels("ten"));
}
