#include "caratheodory.hpp"

#include <cmath>

#include "linalg.hpp"

namespace meanquad::carath {

namespace {

constexpr double kDropWeight = 1e-15;

// γ with Σγᵢ = 0 and Σγᵢ·imageᵢ = 0 across the chosen atoms (images taken
// relative to `shift`, which does not change the solution set but keeps the
// system well scaled). Empty on numerical failure.
std::vector<double> affine_dependence(std::span<const WeightedAtom* const> picked,
                                      std::span<const double> shift) {
    const std::size_t n = shift.size();
    const std::size_t m = picked.size();
    linalg::Matrix sys(n + 1, m);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t r = 0; r < n; ++r) sys.at(r, c) = picked[c]->image[r] - shift[r];
        sys.at(n, c) = 1.0;
    }
    const double pivot_tol = 1e-12 * sys.max_abs();
    auto gamma = linalg::null_vector(sys, pivot_tol);
    if (!gamma) return {};

    // Orient so a positive entry exists; the shift ratio needs one.
    double max_pos = 0.0, max_neg = 0.0;
    for (double g : *gamma) {
        max_pos = std::max(max_pos, g);
        max_neg = std::max(max_neg, -g);
    }
    if (max_pos < max_neg) {
        for (double& g : *gamma) g = -g;
        std::swap(max_pos, max_neg);
    }
    if (!(max_pos > 0.0)) return {};
    return std::move(*gamma);
}

// θ-shift along γ: weights stay nonnegative and at least the ratio-minimizing
// atom drops to exactly zero. Ties eliminate the smallest index.
struct ShiftOutcome {
    double theta = 0.0;
    bool ok = false;
};

ShiftOutcome apply_shift(std::span<WeightedAtom* const> picked, std::span<const double> gamma) {
    ShiftOutcome out;
    std::size_t winner = picked.size();
    double theta = 0.0;
    for (std::size_t i = 0; i < picked.size(); ++i) {
        if (gamma[i] > 0.0) {
            const double ratio = picked[i]->weight / gamma[i];
            if (winner == picked.size() || ratio < theta) {
                theta = ratio;
                winner = i;
            }
        }
    }
    if (winner == picked.size()) return out;

    for (std::size_t i = 0; i < picked.size(); ++i) {
        double w = picked[i]->weight - theta * gamma[i];
        if (w < 0.0) w = w >= -1e-12 ? 0.0 : w;
        picked[i]->weight = w;
    }
    picked[winner]->weight = 0.0;
    for (std::size_t i = 0; i < picked.size(); ++i) {
        if (picked[i]->weight < 0.0) return out;  // dependence was numerically unusable
    }
    out.theta = theta;
    out.ok = true;
    return out;
}

}  // namespace

ConvexCombination prune(const ConvexCombination& comb, std::vector<PruneRound>* trace) {
    const std::size_t n = comb.target.size();
    ConvexCombination result = comb;
    if (result.atoms.size() <= n + 1) return result;

    // Alive atoms as a doubly linked list; the working window is always the
    // first n+2 survivors.
    const std::size_t m = result.atoms.size();
    std::vector<std::size_t> next(m + 1), prev(m + 1);
    const std::size_t head = m;  // sentinel
    next[head] = 0;
    prev[head] = m - 1;
    for (std::size_t i = 0; i < m; ++i) {
        next[i] = i + 1 == m ? head : i + 1;
        prev[i] = i == 0 ? head : i - 1;
    }
    std::size_t alive = m;
    double mass_tracked = weight_sum(result);

    // The incremental tracker drifts ~1e-17 per round against the true array
    // sum, so long runs resync (and renormalize if needed) periodically to
    // keep every round within the 1e-12 mass budget.
    constexpr long kResyncInterval = 16384;
    long rounds_since_sync = 0;
    auto resync_mass = [&] {
        double s = 0.0;
        for (std::size_t i = next[head]; i != head; i = next[i]) s += result.atoms[i].weight;
        if (std::abs(s - 1.0) > 1e-13) {
            for (std::size_t i = next[head]; i != head; i = next[i]) result.atoms[i].weight /= s;
            mass_tracked = 1.0;
        } else {
            mass_tracked = s;
        }
        rounds_since_sync = 0;
    };

    long round = 0;
    while (alive > n + 1) {
        ++round;
        std::vector<std::size_t> window;
        window.reserve(n + 2);
        for (std::size_t i = next[head]; window.size() < n + 2; i = next[i]) window.push_back(i);

        std::vector<const WeightedAtom*> picked_const;
        std::vector<WeightedAtom*> picked;
        for (std::size_t i : window) {
            picked_const.push_back(&result.atoms[i]);
            picked.push_back(&result.atoms[i]);
        }

        const std::vector<double> gamma = affine_dependence(picked_const, result.target);
        if (gamma.empty())
            throw numeric_error("no affine dependence found among " + std::to_string(n + 2) +
                                " atoms in round " + std::to_string(round) +
                                "; the image system is numerically rank deficient");
        double window_mass_before = 0.0;
        for (const WeightedAtom* a : picked_const) window_mass_before += a->weight;
        const ShiftOutcome shift = apply_shift(picked, gamma);
        if (!shift.ok)
            throw numeric_error("weight shift failed in round " + std::to_string(round) +
                                "; no positive dependence direction");
        double window_mass_after = 0.0;
        for (const WeightedAtom* a : picked_const) window_mass_after += a->weight;
        mass_tracked += window_mass_after - window_mass_before;

        PruneRound rec;
        rec.round = round;
        rec.theta = shift.theta;
        for (std::size_t i : window) {
            if (result.atoms[i].weight <= kDropWeight) {
                rec.eliminated.push_back(i);
                mass_tracked -= result.atoms[i].weight;
                result.atoms[i].weight = 0.0;
                next[prev[i]] = next[i];
                prev[next[i]] = prev[i];
                --alive;
            }
        }
        if (rec.eliminated.empty())
            throw numeric_error("elimination round " + std::to_string(round) +
                                " removed no atom; shift ratio degenerate");

        if (++rounds_since_sync >= kResyncInterval || std::abs(mass_tracked - 1.0) > 1e-13)
            resync_mass();

        rec.atoms_after = alive;
        rec.weight_sum = mass_tracked;
        if (trace) trace->push_back(std::move(rec));
    }
    if (rounds_since_sync > 0 && alive <= n + 1) resync_mass();

    std::vector<WeightedAtom> survivors;
    survivors.reserve(alive);
    for (std::size_t i = next[head]; i != head; i = next[i]) survivors.push_back(std::move(result.atoms[i]));
    result.atoms = std::move(survivors);

    const double sum = weight_sum(result);
    if (std::abs(sum - 1.0) > 1e-12)
        throw numeric_error("weight mass drifted beyond tolerance during pruning");
    double target_norm = 0.0;
    for (double v : comb.target) target_norm = std::max(target_norm, std::abs(v));
    const double bound = comb.residual + 1e-10 * (1.0 + target_norm);
    if (recompute_residual(result) > bound)
        throw numeric_error("pruned combination drifted from the target beyond tolerance");
    return result;
}

bool shift_out_dependence(std::vector<WeightedAtom>& atoms, std::span<const double> target) {
    std::vector<const WeightedAtom*> picked_const;
    std::vector<WeightedAtom*> picked;
    for (WeightedAtom& a : atoms) {
        picked_const.push_back(&a);
        picked.push_back(&a);
    }
    const std::vector<double> gamma = affine_dependence(picked_const, target);
    if (gamma.empty()) return false;
    if (!apply_shift(picked, gamma).ok) return false;
    std::vector<WeightedAtom> survivors;
    for (WeightedAtom& a : atoms) {
        if (a.weight > kDropWeight) survivors.push_back(std::move(a));
    }
    if (survivors.size() == atoms.size()) return false;
    atoms = std::move(survivors);
    return true;
}

}  // namespace meanquad::carath
