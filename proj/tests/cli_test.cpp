// Spawns the installed CLI binary and checks exit codes, output schemas and
// stdout determinism.

#include <array>
#include <cstdio>
#include <string>

#include <doctest.h>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(MEANQUAD_CLI_PATH) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string data(const char* name) {
    return std::string(MEANQUAD_TEST_DATA) + "/" + name;
}

}  // namespace

TEST_CASE("synthesize emits the step rule with equal weights") {
    const RunResult r = run("synthesize --config " + data("step.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"reduced\":false") != std::string::npos);
    CHECK(r.output.find("\"weights\":[0.5") != std::string::npos);
}

TEST_CASE("integrate prints the moment targets") {
    const RunResult r = run("integrate --config " + data("moments.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"target\":[0.5,0.333333333") != std::string::npos);
}

TEST_CASE("verify accepts what synthesize emits") {
    const std::string rule_path = "/tmp/meanquad_cli_test_rule.json";
    const RunResult synth =
        run("synthesize --config " + data("step.json") + " --output " + rule_path);
    REQUIRE(synth.exit_code == 0);
    const RunResult veri = run("verify --config " + data("step.json") + " --rule " + rule_path);
    CHECK(veri.exit_code == 0);
    CHECK(veri.output.find("\"pass\":true") != std::string::npos);
    std::remove(rule_path.c_str());
}

TEST_CASE("check subcommand reports properties") {
    const RunResult fap = run("check --config " + data("discrete.json") + " --property fap");
    CHECK(fap.exit_code == 0);
    CHECK(fap.output.find("\"passed\":true") != std::string::npos);

    const RunResult hull = run("check --config " + data("moments.json") + " --property hull");
    CHECK(hull.exit_code == 0);
}

TEST_CASE("usage and config errors exit with code two") {
    CHECK(run("synthesize --config " + data("missing_file.json")).exit_code == 2);
    CHECK(run("synthesize --config " + data("bad_tolerance.json")).exit_code == 2);
    CHECK(run("synthesize").exit_code == 2);
    CHECK(run("frobnicate --config x").exit_code == 2);
}

TEST_CASE("stdout is byte-identical across runs") {
    const std::string args = "synthesize --config " + data("circle.json");
    const RunResult a = run(args);
    const RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(!a.output.empty());
}

TEST_CASE("trace lines land on stderr") {
    const RunResult quiet = run("synthesize --config " + data("step.json") + " --trace");
    CHECK(quiet.exit_code == 0);
    CHECK(quiet.output.find("\"round\"") == std::string::npos);  // stdout stays clean

    const RunResult merged = run("synthesize --config " + data("step.json") + " --trace", true);
    CHECK(merged.exit_code == 0);
    CHECK(merged.output.find("\"round\":1") != std::string::npos);
    CHECK(merged.output.find("\"theta\":") != std::string::npos);
}

TEST_CASE("unnormalized rules carry the raw mass") {
    const RunResult r = run("synthesize --config " + data("step.json") + " --unnormalized");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"total_mass\":2") != std::string::npos);
}
