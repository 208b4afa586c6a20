// Command-line front end for the meanquad shared library. Talks to the
// library exclusively through the C API in meanquad/meanquad.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "meanquad/meanquad.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContractFailure = 1;
constexpr int kExitUsage = 2;

int exit_code_for(mq_status status) {
    switch (status) {
        case MQ_OK: return kExitOk;
        case MQ_ERROR_PARSE:
        case MQ_ERROR_CONFIG: return kExitUsage;
        default: return kExitContractFailure;
    }
}

void report_error(const char* stage, mq_status status) {
    std::cerr << "error (" << stage << "): " << mq_last_error_message();
    if (status == MQ_ERROR_PARSE && mq_last_error_position() >= 0)
        std::cerr << " at position " << mq_last_error_position();
    std::cerr << "\n";
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

bool write_output(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text << "\n";
        return true;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file " << output_path << "\n";
        return false;
    }
    out << text << "\n";
    return true;
}

struct ConfigOverrides {
    double tolerance = -1.0;
    long resolution = -1;
    long max_evals = -1;
    long long seed = -1;
};

// Loads a config file and applies flag overrides. Returns nullptr (with the
// exit code filled in) on failure.
mq_config* load_config(const std::string& path, const ConfigOverrides& ov, int& exit_code) {
    const auto text = read_file(path);
    if (!text) {
        std::cerr << "error: cannot read config file " << path << "\n";
        exit_code = kExitUsage;
        return nullptr;
    }
    mq_config* config = nullptr;
    if (mq_status s = mq_config_parse(text->c_str(), &config); s != MQ_OK) {
        report_error("config", s);
        exit_code = exit_code_for(s);
        return nullptr;
    }
    mq_status s = MQ_OK;
    if (ov.tolerance > 0.0) s = mq_config_set_tolerance(config, ov.tolerance);
    if (s == MQ_OK && ov.resolution > 0) s = mq_config_set_resolution(config, ov.resolution);
    if (s == MQ_OK && ov.max_evals > 0) s = mq_config_set_max_evals(config, ov.max_evals);
    if (s == MQ_OK && ov.seed >= 0) s = mq_config_set_seed(config, (uint64_t)ov.seed);
    if (s != MQ_OK) {
        report_error("config", s);
        mq_config_free(config);
        exit_code = exit_code_for(s);
        return nullptr;
    }
    exit_code = kExitOk;
    return config;
}

int run_synthesize(const std::string& config_path, const std::string& output_path, bool trace,
                   bool unnormalized, const ConfigOverrides& ov) {
    int code = kExitOk;
    mq_config* config = load_config(config_path, ov, code);
    if (!config) return code;
    if (unnormalized) mq_config_set_unnormalized(config, 1);

    mq_rule* rule = nullptr;
    char* trace_text = nullptr;
    const mq_status s = mq_synthesize(config, &rule, trace ? &trace_text : nullptr);
    if (s != MQ_OK) {
        report_error("synthesize", s);
        mq_config_free(config);
        return exit_code_for(s);
    }
    if (trace && trace_text) std::cerr << trace_text;

    char* json = mq_rule_to_json(rule);
    const bool written = json && write_output(json, output_path);
    mq_string_free(json);
    mq_string_free(trace_text);
    mq_rule_free(rule);
    mq_config_free(config);
    return written ? kExitOk : kExitContractFailure;
}

int run_verify(const std::string& config_path, const std::string& rule_path,
               const ConfigOverrides& ov) {
    int code = kExitOk;
    mq_config* config = load_config(config_path, ov, code);
    if (!config) return code;

    const auto rule_text = read_file(rule_path);
    if (!rule_text) {
        std::cerr << "error: cannot read rule file " << rule_path << "\n";
        mq_config_free(config);
        return kExitUsage;
    }
    mq_rule* rule = nullptr;
    if (mq_status s = mq_rule_parse(rule_text->c_str(), &rule); s != MQ_OK) {
        report_error("rule", s);
        mq_config_free(config);
        return exit_code_for(s);
    }

    char* report = nullptr;
    int pass = 0;
    const mq_status s = mq_verify(config, rule, &report, &pass);
    if (s == MQ_OK && report) std::cout << report << "\n";
    if (s != MQ_OK) report_error("verify", s);
    mq_string_free(report);
    mq_rule_free(rule);
    mq_config_free(config);
    if (s != MQ_OK) return exit_code_for(s);
    return pass ? kExitOk : kExitContractFailure;
}

int run_integrate(const std::string& config_path, const ConfigOverrides& ov) {
    int code = kExitOk;
    mq_config* config = load_config(config_path, ov, code);
    if (!config) return code;

    char* json = nullptr;
    const mq_status s = mq_integrate(config, &json);
    if (s == MQ_OK && json) std::cout << json << "\n";
    if (s != MQ_OK) report_error("integrate", s);
    mq_string_free(json);
    mq_config_free(config);
    return exit_code_for(s);
}

int run_check(const std::string& config_path, const std::string& property,
              const ConfigOverrides& ov) {
    int code = kExitOk;
    mq_config* config = load_config(config_path, ov, code);
    if (!config) return code;

    char* report = nullptr;
    int pass = 0;
    const mq_status s = mq_check(config, property.c_str(), &report, &pass);
    if (s == MQ_OK && report) std::cout << report << "\n";
    if (s != MQ_OK) report_error("check", s);
    mq_string_free(report);
    mq_config_free(config);
    if (s != MQ_OK) return exit_code_for(s);
    return pass ? kExitOk : kExitContractFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shared-weight quadrature rules from convex-combination reduction"};
    app.require_subcommand(1);

    ConfigOverrides ov;
    std::string config_path, output_path, rule_path, property;
    bool trace = false, unnormalized = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config JSON file")->required();
        cmd->add_option("--tolerance", ov.tolerance, "override the config tolerance");
        cmd->add_option("--resolution", ov.resolution, "override the config resolution");
        cmd->add_option("--max-evals", ov.max_evals, "override the integration budget");
        cmd->add_option("--seed", ov.seed, "override the config seed");
    };

    CLI::App* synth = app.add_subcommand("synthesize", "synthesize a quadrature rule");
    add_common(synth);
    synth->add_option("--output", output_path, "write the rule JSON here instead of stdout");
    synth->add_flag("--trace", trace, "emit per-round trace JSON lines on stderr");
    synth->add_flag("--unnormalized", unnormalized,
                    "weights sum to the raw measure mass instead of 1");

    CLI::App* veri = app.add_subcommand("verify", "re-verify an emitted rule");
    add_common(veri);
    veri->add_option("--rule", rule_path, "rule JSON file")->required();

    CLI::App* integ = app.add_subcommand("integrate", "compute the mean vector only");
    add_common(integ);

    CLI::App* check = app.add_subcommand("check", "run an axiom property check");
    add_common(check);
    check->add_option("--property", property, "markov, fap or hull")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (synth->parsed()) return run_synthesize(config_path, output_path, trace, unnormalized, ov);
    if (veri->parsed()) return run_verify(config_path, rule_path, ov);
    if (integ->parsed()) return run_integrate(config_path, ov);
    if (check->parsed()) return run_check(config_path, property, ov);
    return kExitUsage;
}
