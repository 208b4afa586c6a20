#include "json_io.hpp"

#include <cstdio>

#include <json.hpp>

namespace meanquad::io {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num_list(std::span<const double> values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ",";
        s += num(values[i]);
    }
    s += "]";
    return s;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw config_error(std::string("missing field \"") + key + "\"");
    return *it;
}

double number_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) throw config_error(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

std::vector<double> number_array(const json& v, const char* what) {
    if (!v.is_array() || v.empty())
        throw config_error(std::string(what) + " must be a nonempty array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw config_error(std::string(what) + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

expr::Ast parse_expression(const json& v, const std::string& where) {
    if (!v.is_string()) throw config_error(where + " must be an expression string");
    try {
        return expr::parse(v.get<std::string>());
    } catch (const Error& e) {
        throw Error(e.status(), where + ": " + e.what(), e.position());
    }
}

domain::MeasureSpec parse_domain(const json& root) {
    const json& dom = field(root, "domain");
    if (!dom.is_object()) throw config_error("\"domain\" must be an object");
    const json& type = field(dom, "type");
    if (!type.is_string()) throw config_error("domain \"type\" must be a string");
    const std::string kind = type.get<std::string>();

    // Density accepted at the top level or inside the domain object.
    std::optional<expr::Ast> density;
    const json* dens = nullptr;
    if (auto it = root.find("density"); it != root.end() && !it->is_null()) dens = &*it;
    if (auto it = dom.find("density"); it != dom.end() && !it->is_null()) {
        if (dens) throw config_error("density given both at the top level and inside the domain");
        dens = &*it;
    }
    if (dens) density = parse_expression(*dens, "density");

    if (kind == "interval") {
        return domain::MeasureSpec::interval(number_field(dom, "a"), number_field(dom, "b"),
                                             std::move(density));
    }
    if (kind == "box") {
        return domain::MeasureSpec::box(number_array(field(dom, "lo"), "domain \"lo\""),
                                        number_array(field(dom, "hi"), "domain \"hi\""),
                                        std::move(density));
    }
    if (kind == "discrete") {
        if (density) throw config_error("discrete domains do not take a density");
        const json& atoms = field(dom, "atoms");
        if (!atoms.is_array() || atoms.empty())
            throw config_error("discrete \"atoms\" must be a nonempty array");
        std::vector<domain::Point> points;
        std::vector<double> masses;
        for (const json& a : atoms) {
            domain::Point p;
            p.coords = number_array(field(a, "point"), "atom \"point\"");
            points.push_back(std::move(p));
            masses.push_back(number_field(a, "mass"));
        }
        return domain::MeasureSpec::discrete(std::move(points), std::move(masses));
    }
    throw config_error("unknown domain type \"" + kind + "\"");
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Status::parse_error, e.what(), long(e.byte));
    }
}

}  // namespace

pipeline::RunConfig parse_config(const std::string& text) {
    const json root = parse_json_text(text);
    if (!root.is_object()) throw config_error("config must be a JSON object");

    pipeline::RunConfig config(parse_domain(root));

    const json& fns = field(root, "functions");
    if (!fns.is_array() || fns.empty())
        throw config_error("\"functions\" must be a nonempty array");
    for (std::size_t k = 0; k < fns.size(); ++k) {
        const json& f = fns[k];
        if (!f.is_object()) throw config_error("each function must be an object");
        pipeline::FunctionSpec spec;
        const json& e = field(f, "expr");
        spec.ast = parse_expression(e, "functions[" + std::to_string(k) + "].expr");
        spec.source = e.get<std::string>();
        if (auto it = f.find("continuous"); it != f.end()) {
            if (!it->is_boolean()) throw config_error("\"continuous\" must be a boolean");
            spec.continuous = it->get<bool>();
        }
        config.functions.push_back(std::move(spec));
    }

    if (auto it = root.find("tolerance"); it != root.end() && !it->is_null()) {
        if (!it->is_number()) throw config_error("\"tolerance\" must be a number");
        config.tolerance = it->get<double>();
    }
    if (auto it = root.find("resolution"); it != root.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw config_error("\"resolution\" must be an integer");
        config.resolution = it->get<long>();
    }
    if (auto it = root.find("max_evals"); it != root.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw config_error("\"max_evals\" must be an integer");
        config.max_evals = it->get<long>();
    }
    if (auto it = root.find("seed"); it != root.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw config_error("\"seed\" must be an integer");
        config.seed = it->get<std::uint64_t>();
    }
    if (auto it = root.find("unnormalized"); it != root.end() && !it->is_null()) {
        if (!it->is_boolean()) throw config_error("\"unnormalized\" must be a boolean");
        config.unnormalized = it->get<bool>();
    }

    config.validate();
    return config;
}

pipeline::QuadratureRule parse_rule(const std::string& text) {
    const json root = parse_json_text(text);
    if (!root.is_object()) throw config_error("rule must be a JSON object");

    pipeline::QuadratureRule rule;
    const json& nodes = field(root, "nodes");
    if (!nodes.is_array()) throw config_error("rule \"nodes\" must be an array");
    for (const json& nd : nodes) {
        domain::Point p;
        p.coords = number_array(nd, "rule node");
        rule.nodes.push_back(std::move(p));
    }
    rule.weights = number_array(field(root, "weights"), "rule \"weights\"");
    rule.target = number_array(field(root, "target"), "rule \"target\"");
    rule.residual = number_field(root, "residual");
    const json& reduced = field(root, "reduced");
    if (!reduced.is_boolean()) throw config_error("rule \"reduced\" must be a boolean");
    rule.reduced = reduced.get<bool>();
    rule.total_mass = number_field(root, "total_mass");
    if (rule.nodes.size() != rule.weights.size())
        throw config_error("rule nodes and weights differ in length");
    return rule;
}

std::string emit_rule(const pipeline::QuadratureRule& rule) {
    std::string s = "{\"nodes\":[";
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        if (i) s += ",";
        s += num_list(rule.nodes[i].coords);
    }
    s += "],\"weights\":";
    s += num_list(rule.weights);
    s += ",\"target\":";
    s += num_list(rule.target);
    s += ",\"residual\":";
    s += num(rule.residual);
    s += ",\"reduced\":";
    s += rule.reduced ? "true" : "false";
    s += ",\"total_mass\":";
    s += num(rule.total_mass);
    s += "}";
    return s;
}

std::string emit_mean(const integrate::MeanVector& mean) {
    std::string s = "{\"target\":";
    s += num_list(mean.values);
    s += ",\"error_estimate\":";
    s += num_list(mean.error_estimate);
    s += ",\"function_evals\":";
    s += std::to_string(mean.function_evals);
    s += "}";
    return s;
}

std::string emit_verification(const pipeline::VerificationReport& report) {
    std::string s = "{\"pass\":";
    s += report.pass ? "true" : "false";
    s += ",\"target_recomputed\":";
    s += num_list(report.target_recomputed);
    s += ",\"combination_sum\":";
    s += num_list(report.combination_sum);
    s += ",\"target_discrepancy\":";
    s += num_list(report.target_discrepancy);
    s += ",\"combination_discrepancy\":";
    s += num_list(report.combination_discrepancy);
    s += ",\"weight_sum\":";
    s += num(report.weight_sum);
    s += ",\"residual_recomputed\":";
    s += num(report.residual_recomputed);
    s += ",\"tolerance\":";
    s += num(report.tolerance);
    s += "}";
    return s;
}

std::string emit_property_report(const axioms::PropertyReport& report) {
    std::string s = "{\"property\":\"";
    s += escape(report.property_name);
    s += "\",\"cases_run\":";
    s += std::to_string(report.cases_run);
    s += ",\"failures\":[";
    for (std::size_t i = 0; i < report.failures.size(); ++i) {
        if (i) s += ",";
        s += "{\"input\":\"";
        s += escape(report.failures[i].input);
        s += "\",\"observed\":";
        s += num(report.failures[i].observed);
        s += ",\"bound\":";
        s += num(report.failures[i].bound);
        s += "}";
    }
    s += "],\"passed\":";
    s += report.passed ? "true" : "false";
    s += "}";
    return s;
}

std::string emit_trace_lines(const pipeline::SynthesisTrace& trace) {
    std::string s;
    for (const carath::PruneRound& r : trace.prune_rounds) {
        s += "{\"round\":";
        s += std::to_string(r.round);
        s += ",\"atoms\":";
        s += std::to_string(r.atoms_after);
        s += ",\"theta\":";
        s += num(r.theta);
        s += ",\"eliminated\":[";
        for (std::size_t i = 0; i < r.eliminated.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(r.eliminated[i]);
        }
        s += "]}\n";
    }
    if (trace.reduction) {
        s += "{\"lambda_zero\":";
        s += num(trace.reduction->lambda_zero);
        s += ",\"vanished_index\":";
        s += std::to_string(trace.reduction->vanished_index);
        s += ",\"crossings_scanned\":";
        s += std::to_string(trace.reduction->crossings_scanned);
        s += ",\"bisection_steps\":";
        s += std::to_string(trace.reduction->bisection_steps);
        s += "}\n";
    }
    return s;
}

}  // namespace meanquad::io
