#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "combination.hpp"

namespace meanquad::carath {

// One elimination round, for the optional --trace output and for auditing
// weight-mass conservation.
struct PruneRound {
    long round = 0;
    std::size_t atoms_after = 0;
    double theta = 0.0;
    std::vector<std::size_t> eliminated;  // original atom indices
    double weight_sum = 0.0;              // tracked Σw after the round
};

// Reduces a convex combination to at most n+1 atoms (n = target dimension)
// while preserving the weighted image sum: repeatedly finds an affine
// dependence among the first n+2 surviving atoms and shifts weight along it
// until one or more weights hit zero. Deterministic: the dependence solve is
// column-pivoted, and ties in the shift ratio eliminate the smallest index.
//
// Postconditions: atoms ≤ n+1, weights ≥ 0 summing to 1 within 1e-12,
// residual ≤ input residual + 1e-10·(1+‖target‖∞). Violations throw
// Error(numeric_error); the function never silently returns more than n+1
// atoms.
ConvexCombination prune(const ConvexCombination& comb, std::vector<PruneRound>* trace = nullptr);

// Single dependence elimination across all `atoms` at once (not windowed).
// Used for the hyperplane-degenerate branch of the path reduction, where
// n+1 translated images span less than n dimensions. Returns false when no
// numerically trustworthy dependence exists. `translated_dim` is n; images
// are taken relative to `target`.
bool shift_out_dependence(std::vector<WeightedAtom>& atoms, std::span<const double> target);

}  // namespace meanquad::carath
