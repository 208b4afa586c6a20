#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "domain.hpp"
#include "expr.hpp"

namespace meanquad::axioms {

struct PropertyFailure {
    std::string input;  // human-readable description of the failing case
    double observed = 0.0;
    double bound = 0.0;
};

struct PropertyReport {
    std::string property_name;
    long cases_run = 0;
    std::vector<PropertyFailure> failures;
    bool passed = false;  // true iff failures is empty
};

// P(X>ε) ≤ E X / ε + 1e-9 for each ε. The function must be nonnegative on
// the domain; this is sampled before the run and a violation is a
// precondition error (config_error).
PropertyReport check_markov(const expr::Ast& fn, const domain::MeasureSpec& measure,
                            std::span<const double> epsilons, double tol = 1e-10);

// Finite additivity, nonnegativity and P(S)=1 on a discrete measure, probed
// with `trials` random disjoint predicate pairs {h<c} / {h>c} built from
// seeded linear functionals of the atom coordinates.
PropertyReport check_fap(const domain::MeasureSpec& measure, long trials, std::uint64_t seed);

// Constructive convex-hull membership: mean → midpoint atoms → prune; the
// pruned combination with nonnegative weights summing to one and residual
// ≤ tol is the certificate.
PropertyReport check_hull_membership(std::span<const expr::Ast> fns,
                                     const domain::MeasureSpec& measure, double tol,
                                     long resolution = 4096);

}  // namespace meanquad::axioms
