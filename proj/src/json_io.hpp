#pragma once

#include <string>

#include "axioms.hpp"
#include "integrate.hpp"
#include "pipeline.hpp"

namespace meanquad::io {

// Parses the config schema:
//   {"domain":{"type":"interval","a":-1,"b":1},
//    "density":null,
//    "functions":[{"expr":"2*step(t)-1","continuous":false}],
//    "tolerance":1e-9,"resolution":4096,"seed":0,"unnormalized":false}
// The density may sit at the top level or inside the domain object.
// Malformed JSON or expressions throw Error(parse_error) with a position;
// schema violations throw Error(config_error).
pipeline::RunConfig parse_config(const std::string& text);

// Rule schema:
//   {"nodes":[[...]],"weights":[...],"target":[...],
//    "residual":...,"reduced":true,"total_mass":1.0}
pipeline::QuadratureRule parse_rule(const std::string& text);

// All emitters print doubles with 17 significant digits in a fixed field
// order, so identical inputs produce byte-identical text.
std::string emit_rule(const pipeline::QuadratureRule& rule);
std::string emit_mean(const integrate::MeanVector& mean);
std::string emit_verification(const pipeline::VerificationReport& report);
std::string emit_property_report(const axioms::PropertyReport& report);

// One JSON object per line: prune rounds, then the path-reduction trace.
std::string emit_trace_lines(const pipeline::SynthesisTrace& trace);

}  // namespace meanquad::io
