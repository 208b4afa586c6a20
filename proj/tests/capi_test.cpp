#include <cmath>
#include <cstring>
#include <string>

#include <doctest.h>

#include "meanquad/meanquad.h"

namespace {

constexpr const char* kStepConfig =
    R"json({"domain":{"type":"interval","a":-1,"b":1},"density":null,)json"
    R"json("functions":[{"expr":"2*step(t)-1","continuous":false}],)json"
    R"json("tolerance":1e-9,"resolution":4096,"seed":0})json";

struct ConfigHandle {
    mq_config* ptr = nullptr;
    ~ConfigHandle() { mq_config_free(ptr); }
};

struct RuleHandle {
    mq_rule* ptr = nullptr;
    ~RuleHandle() { mq_rule_free(ptr); }
};

std::string take_string(char* s) {
    std::string out = s ? s : "";
    mq_string_free(s);
    return out;
}

}  // namespace

TEST_CASE("config parse and synthesis through the C surface") {
    ConfigHandle config;
    REQUIRE(mq_config_parse(kStepConfig, &config.ptr) == MQ_OK);

    RuleHandle rule;
    REQUIRE(mq_synthesize(config.ptr, &rule.ptr, nullptr) == MQ_OK);

    const std::string json = take_string(mq_rule_to_json(rule.ptr));
    CHECK(json.find("\"reduced\":false") != std::string::npos);
    CHECK(json.find("\"total_mass\":1") != std::string::npos);
    CHECK(json.find("\"nodes\":[[") != std::string::npos);

    int pass = 0;
    char* report = nullptr;
    REQUIRE(mq_verify(config.ptr, rule.ptr, &report, &pass) == MQ_OK);
    CHECK(pass == 1);
    CHECK(take_string(report).find("\"pass\":true") != std::string::npos);
}

TEST_CASE("synthesis output is byte-identical across calls") {
    ConfigHandle config;
    REQUIRE(mq_config_parse(kStepConfig, &config.ptr) == MQ_OK);
    std::string first, second;
    for (int i = 0; i < 2; ++i) {
        RuleHandle rule;
        REQUIRE(mq_synthesize(config.ptr, &rule.ptr, nullptr) == MQ_OK);
        (i == 0 ? first : second) = take_string(mq_rule_to_json(rule.ptr));
    }
    CHECK(first == second);
    CHECK(!first.empty());
}

TEST_CASE("rule JSON parses back through the C surface") {
    ConfigHandle config;
    REQUIRE(mq_config_parse(kStepConfig, &config.ptr) == MQ_OK);
    RuleHandle rule;
    REQUIRE(mq_synthesize(config.ptr, &rule.ptr, nullptr) == MQ_OK);
    const std::string json = take_string(mq_rule_to_json(rule.ptr));

    RuleHandle reparsed;
    REQUIRE(mq_rule_parse(json.c_str(), &reparsed.ptr) == MQ_OK);
    CHECK(take_string(mq_rule_to_json(reparsed.ptr)) == json);
}

TEST_CASE("malformed JSON surfaces a parse error with a position") {
    mq_config* config = nullptr;
    CHECK(mq_config_parse("{\"domain\":", &config) == MQ_ERROR_PARSE);
    CHECK(config == nullptr);
    CHECK(mq_last_error_position() >= 0);
    CHECK(std::strlen(mq_last_error_message()) > 0);
}

TEST_CASE("bad expressions surface parse errors with positions") {
    mq_config* config = nullptr;
    const char* text =
        R"json({"domain":{"type":"interval","a":0,"b":1},"functions":[{"expr":"2t"}]})json";
    CHECK(mq_config_parse(text, &config) == MQ_ERROR_PARSE);
    CHECK(mq_last_error_position() >= 0);
}

TEST_CASE("invalid tolerances are config errors") {
    const char* text =
        R"json({"domain":{"type":"interval","a":0,"b":1},"functions":[{"expr":"t"}],"tolerance":-1})json";
    mq_config* config = nullptr;
    CHECK(mq_config_parse(text, &config) == MQ_ERROR_CONFIG);

    ConfigHandle good;
    REQUIRE(mq_config_parse(kStepConfig, &good.ptr) == MQ_OK);
    CHECK(mq_config_set_tolerance(good.ptr, -5.0) == MQ_ERROR_CONFIG);
    CHECK(mq_config_set_tolerance(good.ptr, 1e-8) == MQ_OK);
}

TEST_CASE("mean vectors come back as JSON") {
    const char* text =
        R"json({"domain":{"type":"interval","a":0,"b":1},)json"
        R"json("functions":[{"expr":"t"},{"expr":"t^2"},{"expr":"t^3"}]})json";
    ConfigHandle config;
    REQUIRE(mq_config_parse(text, &config.ptr) == MQ_OK);
    char* json = nullptr;
    REQUIRE(mq_integrate(config.ptr, &json) == MQ_OK);
    const std::string out = take_string(json);
    CHECK(out.find("\"target\":[0.5,0.333333333") != std::string::npos);
    CHECK(out.find("\"function_evals\":") != std::string::npos);
}

TEST_CASE("property checks run by name") {
    const char* discrete =
        R"json({"domain":{"type":"discrete","atoms":[{"point":[-1],"mass":0.5},{"point":[1],"mass":0.5}]},)json"
        R"json("functions":[{"expr":"abs(t)"}]})json";
    ConfigHandle config;
    REQUIRE(mq_config_parse(discrete, &config.ptr) == MQ_OK);

    int pass = 0;
    char* report = nullptr;
    REQUIRE(mq_check(config.ptr, "fap", &report, &pass) == MQ_OK);
    CHECK(pass == 1);
    CHECK(take_string(report).find("\"property\":\"fap\"") != std::string::npos);

    REQUIRE(mq_check(config.ptr, "markov", &report, &pass) == MQ_OK);
    CHECK(pass == 1);
    mq_string_free(report);

    REQUIRE(mq_check(config.ptr, "hull", &report, &pass) == MQ_OK);
    CHECK(pass == 1);
    mq_string_free(report);

    CHECK(mq_check(config.ptr, "bogus", &report, &pass) == MQ_ERROR_CONFIG);
}

TEST_CASE("the trace channel returns JSON lines") {
    ConfigHandle config;
    REQUIRE(mq_config_parse(kStepConfig, &config.ptr) == MQ_OK);
    RuleHandle rule;
    char* trace = nullptr;
    REQUIRE(mq_synthesize(config.ptr, &rule.ptr, &trace) == MQ_OK);
    const std::string lines = take_string(trace);
    CHECK(lines.find("\"round\":1") != std::string::npos);
    CHECK(lines.find("\"theta\":") != std::string::npos);
}
