#pragma once

#include <optional>
#include <span>
#include <vector>

#include "combination.hpp"
#include "expr.hpp"
#include "linalg.hpp"

namespace meanquad::reduce {

// Coordinate system used by the reduction: images translated by -target,
// with the images of every atom except the distinguished one as the vector
// basis. The distinguished atom's coordinates are all negative whenever the
// combination has strictly positive weights and full-dimensional images.
struct BarycentricFrame {
    std::vector<double> target;
    linalg::Matrix basis;                  // n×n, column j = translated basis image
    linalg::LuFactorization factor;
    std::vector<std::size_t> basis_atoms;  // indices into the source combination
    std::size_t distinguished = 0;
    std::vector<double> negative_coords;   // coordinates of the distinguished image
};

// Builds the frame with the given distinguished atom. Fails (nullopt) when
// the basis is singular or its condition estimate exceeds 1e12, or when the
// distinguished coordinates are not all negative.
std::optional<BarycentricFrame> build_frame(const ConvexCombination& comb,
                                            std::size_t distinguished);

// Coordinates p with Σ pⱼ·basisⱼ = v, where v is already translated
// (v = x - target). Plain linear solve against the cached factorization.
std::vector<double> barycentric(const BarycentricFrame& frame, std::span<const double> v);

struct ReductionTrace {
    double lambda_zero = 0.0;
    std::size_t vanished_index = 0;  // position k within the frame basis
    long crossings_scanned = 0;      // grid points examined before the hit
    long bisection_steps = 0;
};

struct Crossing {
    ReductionTrace trace;
    domain::Point point;               // t̄ = path(λ₀)
    std::vector<double> coords;        // barycentric coordinates at t̄
    double tol_zero = 0.0;
};

// First λ in (0,1] where some barycentric coordinate of the path image
// vanishes: a uniform grid scan (1024 points, doubled to 65536 on a miss)
// finds the earliest sign change or |fⱼ| ≤ tol_zero, then bisection narrows
// the bracket below 1e-14 and polishes the vanishing coordinate. Fails when
// no crossing is detectable or the coordinates at the hit are inconsistent.
std::optional<Crossing> first_zero_crossing(const BarycentricFrame& frame,
                                            std::span<const expr::Ast> fns,
                                            const domain::PathSpec& path);

struct ReduceResult {
    ConvexCombination comb;
    bool reduced = false;
    std::optional<ReductionTrace> trace;
};

// Reduces an (n+1)-atom combination over a path-connected domain with
// continuous integrands to at most n atoms. Tries atom 0 as the
// distinguished point and walks toward each basis atom in turn, falling back
// across distinguished/partner choices on numerical failure; when the
// translated images span less than n dimensions one atom is eliminated
// directly through the dependence shift. Never returns a wrong answer: if
// every route fails the input comes back unchanged with reduced=false.
ReduceResult reduce(const ConvexCombination& comb, std::span<const expr::Ast> fns,
                    const domain::MeasureSpec& measure);

}  // namespace meanquad::reduce
