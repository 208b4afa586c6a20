#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caratheodory.hpp"
#include "combination.hpp"
#include "domain.hpp"
#include "expr.hpp"
#include "path_reduce.hpp"

namespace meanquad::pipeline {

struct FunctionSpec {
    expr::Ast ast;
    std::string source;      // original expression text
    bool continuous = true;  // declared by the user; never inferred
};

struct RunConfig {
    explicit RunConfig(domain::MeasureSpec m) : measure(std::move(m)) {}

    domain::MeasureSpec measure;
    std::vector<FunctionSpec> functions;
    double tolerance = 1e-9;
    long resolution = 4096;
    long max_evals = 20'000'000;  // integrand-evaluation budget per refinement
    std::uint64_t seed = 0;
    bool unnormalized = false;

    std::size_t n() const { return functions.size(); }
    std::vector<expr::Ast> asts() const;
    bool all_continuous() const;

    // Schema-level checks beyond what the types enforce.
    void validate() const;
};

// Final output: nodes tᵢ and weights λᵢ with Σ λᵢ X(tᵢ) ≈ target. Normalized
// rules have total_mass 1; with the unnormalized convention weights sum to
// μ(S) and the target is the raw integral vector.
struct QuadratureRule {
    std::vector<domain::Point> nodes;
    std::vector<double> weights;
    std::vector<double> target;
    double residual = 0.0;  // ‖Σ λᵢ X(tᵢ) − target‖∞, recomputed at emission
    bool reduced = false;   // true iff at most n nodes were achieved
    double total_mass = 1.0;
};

struct SynthesisTrace {
    std::vector<carath::PruneRound> prune_rounds;
    std::optional<reduce::ReductionTrace> reduction;
};

// Full synthesis: mean vector → midpoint atoms → prune → (path reduction when
// every integrand is declared continuous and the domain has paths) → weight
// refit → emission-time residual check against the configured tolerance.
QuadratureRule synthesize(const RunConfig& config, SynthesisTrace* trace = nullptr);

struct VerificationReport {
    bool pass = false;
    std::vector<double> target_recomputed;        // mean at tolerance/10, scaled by total_mass
    std::vector<double> combination_sum;          // Σ λᵢ X(tᵢ) by direct evaluation
    std::vector<double> target_discrepancy;       // |target − recomputed| per component
    std::vector<double> combination_discrepancy;  // |sum − target| per component
    double weight_sum = 0.0;
    double residual_recomputed = 0.0;
    double tolerance = 0.0;
};

// Independent re-check of an emitted rule against its config.
VerificationReport verify(const QuadratureRule& rule, const RunConfig& config);

}  // namespace meanquad::pipeline
