#include "path_reduce.hpp"

#include <algorithm>
#include <cmath>

#include "caratheodory.hpp"

namespace meanquad::reduce {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr long kGridInitial = 1024;
constexpr long kGridMax = 65536;

std::vector<double> translated_image(const WeightedAtom& atom, std::span<const double> target) {
    std::vector<double> y(atom.image.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = atom.image[k] - target[k];
    return y;
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Evaluates the integrand system at a domain point.
std::vector<double> image_at(std::span<const expr::Ast> fns, const domain::Point& p) {
    std::vector<double> img(fns.size());
    for (std::size_t k = 0; k < fns.size(); ++k) img[k] = expr::eval(fns[k], p.coords);
    return img;
}

}  // namespace

std::optional<BarycentricFrame> build_frame(const ConvexCombination& comb,
                                            std::size_t distinguished) {
    const std::size_t n = comb.target.size();
    if (comb.atoms.size() != n + 1 || distinguished >= comb.atoms.size()) return std::nullopt;

    BarycentricFrame frame;
    frame.target = comb.target;
    frame.distinguished = distinguished;
    for (std::size_t i = 0; i < comb.atoms.size(); ++i) {
        if (i != distinguished) frame.basis_atoms.push_back(i);
    }

    frame.basis = linalg::Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<double> y = translated_image(comb.atoms[frame.basis_atoms[j]], comb.target);
        for (std::size_t r = 0; r < n; ++r) frame.basis.at(r, j) = y[r];
    }
    auto lu = linalg::LuFactorization::compute(frame.basis);
    if (!lu || lu->condition_inf() > kConditionLimit) return std::nullopt;
    frame.factor = std::move(*lu);

    const std::vector<double> y0 = translated_image(comb.atoms[distinguished], comb.target);
    frame.negative_coords = frame.factor.solve(y0);
    for (double c : frame.negative_coords) {
        if (!(c < 0.0)) return std::nullopt;
    }
    return frame;
}

std::vector<double> barycentric(const BarycentricFrame& frame, std::span<const double> v) {
    const std::size_t n = frame.target.size();
    std::vector<double> p = frame.factor.solve({v.begin(), v.end()});

    // Two rounds of iterative refinement, then a residual guard.
    double resid = 0.0;
    for (int round = 0; round < 3; ++round) {
        std::vector<double> r(n);
        resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += frame.basis.at(i, j) * p[j];
            r[i] = v[i] - s;
            resid = std::max(resid, std::abs(r[i]));
        }
        if (round == 2 || resid <= 1e-14 * (1.0 + inf_norm(v))) break;
        const std::vector<double> dp = frame.factor.solve(std::move(r));
        for (std::size_t j = 0; j < n; ++j) p[j] += dp[j];
    }
    if (resid > 1e-10 * (1.0 + inf_norm(v)))
        throw numeric_error("barycentric solve residual too large; frame is ill conditioned");
    return p;
}

std::optional<Crossing> first_zero_crossing(const BarycentricFrame& frame,
                                            std::span<const expr::Ast> fns,
                                            const domain::PathSpec& path) {
    const std::size_t n = frame.target.size();

    auto coords_at = [&](double lambda) -> std::vector<double> {
        const domain::Point p = domain::path_eval(path, lambda);
        std::vector<double> y = image_at(fns, p);
        for (std::size_t k = 0; k < n; ++k) y[k] -= frame.target[k];
        return barycentric(frame, y);
    };

    for (long grid = kGridInitial; grid <= kGridMax; grid *= 2) {
        // Full scan first: tol_zero is scaled by the largest coordinate seen.
        std::vector<std::vector<double>> samples(static_cast<std::size_t>(grid));
        double max_abs = 0.0;
        for (long i = 1; i <= grid; ++i) {
            samples[std::size_t(i - 1)] = coords_at(double(i) / double(grid));
            max_abs = std::max(max_abs, inf_norm(samples[std::size_t(i - 1)]));
        }
        const double tol_zero = 1e-11 * (1.0 + max_abs);

        long hit = -1;
        for (long i = 1; i <= grid; ++i) {
            const std::vector<double>& f = samples[std::size_t(i - 1)];
            bool touches = false;
            for (double v : f) {
                if (v >= -tol_zero) {
                    touches = true;
                    break;
                }
            }
            if (touches) {
                hit = i;
                break;
            }
        }
        if (hit < 0) continue;  // no crossing at this resolution; refine the grid

        Crossing result;
        result.tol_zero = tol_zero;
        result.trace.crossings_scanned = hit;

        double lo = double(hit - 1) / double(grid);
        double hi = double(hit) / double(grid);
        std::vector<double> f_hi = samples[std::size_t(hit - 1)];

        auto max_coord = [](const std::vector<double>& f) {
            double m = f[0];
            for (double v : f) m = std::max(m, v);
            return m;
        };

        long steps = 0;
        if (max_coord(f_hi) >= 0.0) {
            // Bracketed sign change of max_j fⱼ: bisect to a 1e-14 window.
            while (hi - lo > 1e-14 && steps < 200) {
                const double mid = 0.5 * (lo + hi);
                const std::vector<double> f_mid = coords_at(mid);
                ++steps;
                if (max_coord(f_mid) >= 0.0) {
                    hi = mid;
                    f_hi = f_mid;
                } else {
                    lo = mid;
                }
            }
        }

        // Identify the vanishing coordinate, then polish it well below
        // tol_zero: the emitted residual scales with |f_k| at the node.
        // (A tangential touch has no sign change to polish; the tol_zero
        // acceptance below still applies.)
        std::size_t k = 0;
        for (std::size_t j = 1; j < n; ++j) {
            if (f_hi[j] > f_hi[k]) k = j;
        }
        const double polish_target = 1e-15 * (1.0 + max_abs);
        while (f_hi[k] > polish_target && hi - lo > 0.0 && steps < 400) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const std::vector<double> f_mid = coords_at(mid);
            ++steps;
            if (f_mid[k] < 0.0) {
                lo = mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
        }

        // Accept only a clean first crossing: coordinate k at zero, every
        // other coordinate still on the nonpositive side.
        if (std::abs(f_hi[k]) > tol_zero) return std::nullopt;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != k && f_hi[j] > tol_zero) return std::nullopt;
        }

        result.trace.lambda_zero = hi;
        result.trace.vanished_index = k;
        result.trace.bisection_steps = steps;
        result.point = domain::path_eval(path, hi);
        result.coords = std::move(f_hi);
        return result;
    }
    return std::nullopt;
}

namespace {

double target_scale(const ConvexCombination& comb) {
    return 1.0 + inf_norm(comb.target);
}

// Candidate output from a crossing: x(t̄) with coefficient 1 plus the basis
// atoms other than k with coefficients -pⱼ, normalized to unit mass.
std::optional<ConvexCombination> assemble_from_crossing(const ConvexCombination& comb,
                                                        std::span<const expr::Ast> fns,
                                                        const BarycentricFrame& frame,
                                                        const Crossing& crossing) {
    const std::size_t n = comb.target.size();

    std::vector<WeightedAtom> atoms;
    WeightedAtom fresh;
    fresh.point = crossing.point;
    fresh.weight = 1.0;
    fresh.image = image_at(fns, crossing.point);
    atoms.push_back(std::move(fresh));
    for (std::size_t j = 0; j < n; ++j) {
        if (j == crossing.trace.vanished_index) continue;
        WeightedAtom a = comb.atoms[frame.basis_atoms[j]];
        a.weight = -crossing.coords[j];
        atoms.push_back(std::move(a));
    }

    double total = 0.0;
    for (const WeightedAtom& a : atoms) total += a.weight;
    if (!(total > 0.0)) return std::nullopt;

    double min_weight = 0.0;
    for (WeightedAtom& a : atoms) {
        a.weight /= total;
        min_weight = std::min(min_weight, a.weight);
    }
    if (min_weight < -1e-9) return std::nullopt;  // hard failure, try another route
    if (min_weight < 0.0) {
        double renorm = 0.0;
        for (WeightedAtom& a : atoms) {
            if (a.weight < 0.0) a.weight = 0.0;
            renorm += a.weight;
        }
        for (WeightedAtom& a : atoms) a.weight /= renorm;
    }
    std::erase_if(atoms, [](const WeightedAtom& a) { return a.weight <= 1e-15; });

    ConvexCombination out;
    out.atoms = std::move(atoms);
    out.target = comb.target;
    recompute_residual(out);
    if (out.residual > comb.residual + 1e-8 * target_scale(comb)) return std::nullopt;
    return out;
}

}  // namespace

ReduceResult reduce(const ConvexCombination& comb, std::span<const expr::Ast> fns,
                    const domain::MeasureSpec& measure) {
    const std::size_t n = comb.target.size();

    if (comb.atoms.size() <= n) return ReduceResult{comb, true, std::nullopt};
    if (comb.atoms.size() != n + 1)
        throw config_error("reduce expects a combination with exactly n+1 atoms");
    if (!measure.supports_paths()) return ReduceResult{comb, false, std::nullopt};

    // Atoms carrying negligible weight can be removed outright; the residual
    // guard below keeps this honest.
    {
        ConvexCombination trimmed = comb;
        std::erase_if(trimmed.atoms, [](const WeightedAtom& a) { return a.weight <= 1e-12; });
        if (trimmed.atoms.size() <= n && !trimmed.atoms.empty()) {
            double total = weight_sum(trimmed);
            for (WeightedAtom& a : trimmed.atoms) a.weight /= total;
            if (recompute_residual(trimmed) <= comb.residual + 1e-8 * target_scale(comb))
                return ReduceResult{std::move(trimmed), true, std::nullopt};
        }
    }

    // Hyperplane-degenerate images: one dependence shift eliminates an atom
    // without any path walk.
    {
        linalg::Matrix y(n, comb.atoms.size());
        for (std::size_t c = 0; c < comb.atoms.size(); ++c) {
            for (std::size_t r = 0; r < n; ++r)
                y.at(r, c) = comb.atoms[c].image[r] - comb.target[r];
        }
        if (linalg::rank_estimate(y, 1e-12 * std::max(1e-300, y.max_abs())) < n) {
            ConvexCombination flat = comb;
            if (carath::shift_out_dependence(flat.atoms, flat.target) &&
                flat.atoms.size() <= n) {
                if (recompute_residual(flat) <= comb.residual + 1e-8 * target_scale(comb))
                    return ReduceResult{std::move(flat), true, std::nullopt};
            }
            return ReduceResult{comb, false, std::nullopt};
        }
    }

    for (std::size_t distinguished = 0; distinguished <= n; ++distinguished) {
        const auto frame = build_frame(comb, distinguished);
        if (!frame) continue;
        for (std::size_t partner = 0; partner < n; ++partner) {
            try {
                const domain::PathSpec path =
                    domain::make_path(measure, comb.atoms[distinguished].point,
                                      comb.atoms[frame->basis_atoms[partner]].point);
                const auto crossing = first_zero_crossing(*frame, fns, path);
                if (!crossing) continue;
                auto out = assemble_from_crossing(comb, fns, *frame, *crossing);
                if (!out) continue;
                return ReduceResult{std::move(*out), true, crossing->trace};
            } catch (const Error&) {
                continue;  // evaluation or solve failure: try the next route
            }
        }
    }
    return ReduceResult{comb, false, std::nullopt};
}

}  // namespace meanquad::reduce
