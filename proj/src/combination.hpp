#pragma once

#include <cmath>
#include <vector>

#include "domain.hpp"

namespace meanquad {

// One node of a discrete convex representation: where it sits, how much it
// carries, and the image vector X(point).
struct WeightedAtom {
    domain::Point point;
    double weight;
    std::vector<double> image;
};

// Finite convex combination Σ wᵢ·X(tᵢ) ≈ target with wᵢ ≥ 0, Σwᵢ = 1.
struct ConvexCombination {
    std::vector<WeightedAtom> atoms;
    std::vector<double> target;
    double residual = 0.0;  // ‖Σ wᵢ·imageᵢ − target‖∞
};

inline std::vector<double> weighted_image_sum(const ConvexCombination& c) {
    std::vector<double> s(c.target.size(), 0.0);
    for (const WeightedAtom& a : c.atoms) {
        for (std::size_t k = 0; k < s.size(); ++k) s[k] += a.weight * a.image[k];
    }
    return s;
}

inline double weight_sum(const ConvexCombination& c) {
    double s = 0.0;
    for (const WeightedAtom& a : c.atoms) s += a.weight;
    return s;
}

inline double recompute_residual(ConvexCombination& c) {
    const std::vector<double> s = weighted_image_sum(c);
    double r = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) r = std::max(r, std::abs(s[k] - c.target[k]));
    c.residual = r;
    return r;
}

}  // namespace meanquad
