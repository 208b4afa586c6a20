#include "meanquad/meanquad.h"

#include <cstring>
#include <new>
#include <string>

#include "axioms.hpp"
#include "json_io.hpp"
#include "pipeline.hpp"

struct mq_config {
    meanquad::pipeline::RunConfig value;
};

struct mq_rule {
    meanquad::pipeline::QuadratureRule value;
};

namespace {

thread_local std::string g_error_message;
thread_local long g_error_position = -1;

void clear_error() {
    g_error_message.clear();
    g_error_position = -1;
}

mq_status status_code(meanquad::Status s) {
    using meanquad::Status;
    switch (s) {
        case Status::ok: return MQ_OK;
        case Status::parse_error: return MQ_ERROR_PARSE;
        case Status::config_error: return MQ_ERROR_CONFIG;
        case Status::eval_error: return MQ_ERROR_EVAL;
        case Status::numeric_error: return MQ_ERROR_NUMERIC;
        case Status::tolerance_error: return MQ_ERROR_TOLERANCE;
    }
    return MQ_ERROR_INTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
mq_status guarded(F&& body) {
    clear_error();
    try {
        return body();
    } catch (const meanquad::Error& e) {
        g_error_message = e.what();
        g_error_position = e.position();
        return status_code(e.status());
    } catch (const std::exception& e) {
        g_error_message = e.what();
        return MQ_ERROR_INTERNAL;
    } catch (...) {
        g_error_message = "unknown error";
        return MQ_ERROR_INTERNAL;
    }
}

mq_status require(bool ok, const char* message) {
    if (ok) return MQ_OK;
    g_error_message = message;
    g_error_position = -1;
    return MQ_ERROR_CONFIG;
}

}  // namespace

extern "C" {

mq_status mq_config_parse(const char* json_text, mq_config** out_config) {
    if (mq_status s = require(json_text && out_config, "null argument"); s != MQ_OK) return s;
    *out_config = nullptr;
    return guarded([&] {
        auto parsed = meanquad::io::parse_config(json_text);
        *out_config = new mq_config{std::move(parsed)};
        return MQ_OK;
    });
}

void mq_config_free(mq_config* config) {
    delete config;
}

mq_status mq_config_set_tolerance(mq_config* config, double tolerance) {
    if (mq_status s = require(config != nullptr, "null config"); s != MQ_OK) return s;
    if (mq_status s = require(tolerance > 0.0, "tolerance must be positive"); s != MQ_OK) return s;
    config->value.tolerance = tolerance;
    return MQ_OK;
}

mq_status mq_config_set_resolution(mq_config* config, long resolution) {
    if (mq_status s = require(config != nullptr, "null config"); s != MQ_OK) return s;
    if (mq_status s = require(resolution >= long(config->value.n()) + 2,
                              "resolution must be at least n+2");
        s != MQ_OK)
        return s;
    config->value.resolution = resolution;
    return MQ_OK;
}

mq_status mq_config_set_max_evals(mq_config* config, long max_evals) {
    if (mq_status s = require(config != nullptr, "null config"); s != MQ_OK) return s;
    if (mq_status s = require(max_evals > 0, "max_evals must be positive"); s != MQ_OK) return s;
    config->value.max_evals = max_evals;
    return MQ_OK;
}

mq_status mq_config_set_seed(mq_config* config, uint64_t seed) {
    if (mq_status s = require(config != nullptr, "null config"); s != MQ_OK) return s;
    config->value.seed = seed;
    return MQ_OK;
}

mq_status mq_config_set_unnormalized(mq_config* config, int unnormalized) {
    if (mq_status s = require(config != nullptr, "null config"); s != MQ_OK) return s;
    config->value.unnormalized = unnormalized != 0;
    return MQ_OK;
}

mq_status mq_synthesize(const mq_config* config, mq_rule** out_rule, char** out_trace_jsonl) {
    if (mq_status s = require(config && out_rule, "null argument"); s != MQ_OK) return s;
    *out_rule = nullptr;
    if (out_trace_jsonl) *out_trace_jsonl = nullptr;
    return guarded([&] {
        meanquad::pipeline::SynthesisTrace trace;
        auto rule = meanquad::pipeline::synthesize(config->value,
                                                   out_trace_jsonl ? &trace : nullptr);
        if (out_trace_jsonl) {
            *out_trace_jsonl = dup_string(meanquad::io::emit_trace_lines(trace));
        }
        *out_rule = new mq_rule{std::move(rule)};
        return MQ_OK;
    });
}

mq_status mq_rule_parse(const char* json_text, mq_rule** out_rule) {
    if (mq_status s = require(json_text && out_rule, "null argument"); s != MQ_OK) return s;
    *out_rule = nullptr;
    return guarded([&] {
        auto rule = meanquad::io::parse_rule(json_text);
        *out_rule = new mq_rule{std::move(rule)};
        return MQ_OK;
    });
}

void mq_rule_free(mq_rule* rule) {
    delete rule;
}

char* mq_rule_to_json(const mq_rule* rule) {
    if (!rule) return nullptr;
    return dup_string(meanquad::io::emit_rule(rule->value));
}

mq_status mq_verify(const mq_config* config, const mq_rule* rule, char** out_report_json,
                    int* out_pass) {
    if (mq_status s = require(config && rule, "null argument"); s != MQ_OK) return s;
    if (out_report_json) *out_report_json = nullptr;
    if (out_pass) *out_pass = 0;
    return guarded([&] {
        const auto report = meanquad::pipeline::verify(rule->value, config->value);
        if (out_report_json) *out_report_json = dup_string(meanquad::io::emit_verification(report));
        if (out_pass) *out_pass = report.pass ? 1 : 0;
        return MQ_OK;
    });
}

mq_status mq_integrate(const mq_config* config, char** out_json) {
    if (mq_status s = require(config && out_json, "null argument"); s != MQ_OK) return s;
    *out_json = nullptr;
    return guarded([&] {
        meanquad::integrate::Options opts;
        opts.tol = config->value.tolerance;
        opts.max_evals = config->value.max_evals;
        const auto mean = meanquad::integrate::mean_vector(config->value.asts(),
                                                           config->value.measure, opts);
        *out_json = dup_string(meanquad::io::emit_mean(mean));
        return MQ_OK;
    });
}

mq_status mq_check(const mq_config* config, const char* property, char** out_report_json,
                   int* out_pass) {
    if (mq_status s = require(config && property, "null argument"); s != MQ_OK) return s;
    if (out_report_json) *out_report_json = nullptr;
    if (out_pass) *out_pass = 0;
    return guarded([&] {
        const std::string which = property;
        meanquad::axioms::PropertyReport report;
        const auto& cfg = config->value;
        if (which == "markov") {
            const double epsilons[] = {0.25, 0.5, 1.0, 2.0};
            report = meanquad::axioms::check_markov(cfg.functions.at(0).ast, cfg.measure,
                                                    epsilons, cfg.tolerance / 10.0);
        } else if (which == "fap") {
            report = meanquad::axioms::check_fap(cfg.measure, 200, cfg.seed);
        } else if (which == "hull") {
            report = meanquad::axioms::check_hull_membership(cfg.asts(), cfg.measure,
                                                             cfg.tolerance, cfg.resolution);
        } else {
            throw meanquad::config_error("unknown property \"" + which +
                                         "\"; expected markov, fap or hull");
        }
        if (out_report_json) *out_report_json = dup_string(meanquad::io::emit_property_report(report));
        if (out_pass) *out_pass = report.passed ? 1 : 0;
        return MQ_OK;
    });
}

const char* mq_last_error_message(void) {
    return g_error_message.c_str();
}

long mq_last_error_position(void) {
    return g_error_position;
}

void mq_string_free(char* text) {
    ::operator delete(text);
}

}  // extern "C"
