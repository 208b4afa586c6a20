#pragma once

#include <span>
#include <vector>

#include "combination.hpp"
#include "domain.hpp"
#include "expr.hpp"

namespace meanquad::integrate {

// Normalized mean E X = (E X₁,…,E Xₙ) with per-component error estimates.
struct MeanVector {
    std::vector<double> values;
    std::vector<double> error_estimate;
    long function_evals = 0;
};

struct Options {
    double tol = 1e-9;             // per-component absolute tolerance on the mean
    long max_evals = 20'000'000;   // refinement budget in integrand evaluations
};

// Carries the best estimate out of a refinement that ran out of budget.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(std::string message, MeanVector best)
        : Error(Status::numeric_error, std::move(message)), best_(std::move(best)) {}

    const MeanVector& best() const { return best_; }

private:
    MeanVector best_;
};

// Mean of each fn under the normalized measure. Discrete measures are summed
// exactly; interval/box measures use adaptive bisection with an embedded
// 15-point Gauss–Kronrod pair per cell (tensor-product cells for boxes).
MeanVector mean_vector(std::span<const expr::Ast> fns, const domain::MeasureSpec& measure,
                       const Options& opts = {});

// μ(S) before normalization: exact volume (or discrete mass total) when no
// density is present, otherwise the integral of the density.
double measure_mass_raw(const domain::MeasureSpec& measure, const Options& opts = {});

// Discretizes the measure into a convex combination whose weighted image sum
// reproduces `target` up to a discretization residual: midpoints of a uniform
// partition weighted by local measure. Discrete measures pass through
// unchanged. `resolution` counts cells (per-axis counts are derived for
// boxes) and must be at least n+2.
ConvexCombination riemann_atoms(std::span<const expr::Ast> fns, const domain::MeasureSpec& measure,
                                std::span<const double> target, long resolution);

// riemann_atoms with the resolution doubled (atom count capped at 2^20) until
// the discretization residual is at most residual_target. Throws
// Error(numeric_error) suggesting a larger resolution when the cap is hit.
ConvexCombination riemann_atoms_auto(std::span<const expr::Ast> fns,
                                     const domain::MeasureSpec& measure,
                                     std::span<const double> target, double residual_target,
                                     long initial_resolution);

// P(pred) on an interval/box measure by adaptive integration of the
// indicator against the density. Used by domain::prob.
double indicator_probability(const domain::MeasureSpec& measure, const domain::Predicate& pred,
                             double tol);

}  // namespace meanquad::integrate
