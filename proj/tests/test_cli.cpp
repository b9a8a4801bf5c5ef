#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Command {
    int status = -1;
    std::string output;
};

Command cli(const std::string& args, const std::string& env = "") {
    Command c;
    const std::string cmd = env + (env.empty() ? "" : " ") + SLIMEGATE_CLI + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
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

void spit(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("slimegate-cli-" + std::to_string(::getpid()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(cli("").status == 2);
    CHECK(cli("run --gate pnot").status == 2);                // --in missing
    CHECK(cli("run --gate pnot --in A=1 --bogus").status == 2);
    CHECK(cli("run --gate xor --in A=1").status == 2);
    CHECK(cli("run --gate pnot --in A=7").status == 2);
    CHECK(cli("run --gate pnot --in B=1").status == 2);       // channel the gate lacks
    CHECK(cli("campaign nonsense").status == 2);
    CHECK(cli("campaign fault --trials 1").status == 2);      // --var missing
    CHECK(cli("campaign fault --var humidity --levels 1").status == 2);
    CHECK(cli("campaign reuse --budget 100").status == 2);
    CHECK(cli("run --gate pnot --in A=1 --budget -5").status == 2);
    CHECK(cli("--help").status == 0);
}

TEST_CASE("config errors exit 3 and I/O errors exit 4") {
    TempDir t;
    spit(t.path / "bad.conf", "phobia_466 = -1\n");
    spit(t.path / "broken.scene", "dish_diameter = [\n");
    spit(t.path / "script.txt", "10 A=1\n5 A=0\n");
    CHECK(cli("run --gate pnot --in A=1 --calibration " + (t.path / "bad.conf").string()).status == 3);
    CHECK(cli("run --gate pnot --in A=1 --scene " + (t.path / "broken.scene").string()).status == 3);
    CHECK(cli("run --gate pnot --in A=1 --script " + (t.path / "script.txt").string()).status == 3);
    spit(t.path / "not-a-record.jsonl", "{\"record\":\"summary\"}\n");
    CHECK(cli("replay " + (t.path / "not-a-record.jsonl").string()).status == 3);

    CHECK(cli("run --gate pnot --in A=1 --calibration " + (t.path / "missing.conf").string()).status == 4);
    CHECK(cli("replay " + (t.path / "missing.jsonl").string()).status == 4);
    spit(t.path / "file", "x");
    CHECK(cli("run --gate pnot --in A=1 --budget 50 --out " + (t.path / "file" / "sub" / "r.jsonl").string()).status == 4);
}

TEST_CASE("run writes to --out or the environment's output directory") {
    TempDir t;
    const fs::path out = t.path / "explicit.jsonl";
    const Command a = cli("run --gate pnot --in A=0 --seed 3 --budget 300 --out " + out.string());
    CHECK(a.status == 0);
    CHECK(fs::exists(out));
    CHECK(a.output.find("logic") != std::string::npos);

    const fs::path dir = t.path / "records";
    const Command b = cli("run --gate pnot --in A=0 --seed 3 --budget 300", "SLIMEGATE_OUT_DIR=" + dir.string());
    CHECK(b.status == 0);
    REQUIRE(fs::exists(dir / "run-pnot-3.jsonl"));
    CHECK(slurp(dir / "run-pnot-3.jsonl") == slurp(out));

    CHECK(cli("replay " + out.string()).status == 0);
    // A doctored summary is reported as a mismatch.
    std::string text = slurp(out);
    const auto at = text.rfind("\"end_tick\":");
    REQUIRE(at != std::string::npos);
    text.insert(at + 11, "9");
    spit(t.path / "doctored.jsonl", text);
    CHECK(cli("replay " + (t.path / "doctored.jsonl").string()).status == 1);
}

TEST_CASE("every campaign runs from the command line") {
    TempDir t;
    const std::string out = " --out " + (t.path / "c.jsonl").string();
    CHECK(cli("campaign truth --gate pnand --trials 1 --budget 300" + out).status == 0);
    CHECK(cli("campaign phototaxis --trials 1 --budget 300" + out).status == 0);
    CHECK(cli("campaign fault --var gap --levels 10,20 --trials 1" + out).status == 0);
    CHECK(cli("replay " + (t.path / "c.jsonl").string()).status == 0);
    CHECK(cli("campaign reuse --trials 1" + out).status == 0);
    CHECK(cli("run --gate pnot --in A=0 --seed 2 --budget 500 --script " + (t.path / "nothing").string()).status == 4);
}

TEST_CASE("cascade and calibrate") {
    const Command c = cli("cascade");
    CHECK(c.status == 0);
    CHECK(c.output.find("0.510 m^2") != std::string::npos);
    CHECK(c.output.find("depth 3") != std::string::npos);
    TempDir t;
    spit(t.path / "chain.net", "input a\noutput y\nnand n1 a a\nnand y n1 n1\n");
    const Command chain = cli("cascade --netlist " + (t.path / "chain.net").string());
    CHECK(chain.status == 0);
    CHECK(chain.output.find("depth 2") != std::string::npos);
    spit(t.path / "cycle.net", "input a\noutput y\nnand y a w\nnand w y a\n");
    CHECK(cli("cascade --netlist " + (t.path / "cycle.net").string()).status == 3);

    const fs::path cal = t.path / "fit.conf";
    CHECK(cli("calibrate --out " + cal.string()).status == 0);
    CHECK(fs::exists(cal));
    CHECK(cli("run --gate pnot --in A=1 --budget 100 --calibration " + cal.string() + " --out " +
              (t.path / "r.jsonl").string())
              .status == 0);
    CHECK(cli("calibrate --target nonsense=1").status == 3);
    CHECK(cli("calibrate --target pnot_failure").status == 2);
}
