#include "integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <queue>

namespace meanquad::integrate {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1]
// (abscissae and weights as tabulated in QUADPACK's dqk15). Nodes are
// ordered left to right; gauss_w is zero on the Kronrod-only nodes.
constexpr int kGkPoints = 15;

constexpr double kGkNode[kGkPoints] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

constexpr double kKronrodW[kGkPoints] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

constexpr double kGaussW[kGkPoints] = {
    0.0, 0.129484966168869693270611432679082,
    0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975,
    0.0, 0.417959183673469387755102040816327,
    0.0, 0.381830050505118944950369775488975,
    0.0, 0.279705391489276667901467771423780,
    0.0, 0.129484966168869693270611432679082,
    0.0};

// Integrand writing n_out values at a point.
using VectorFn = std::function<void(std::span<const double>, std::span<double>)>;

struct Cell {
    std::vector<double> lo, hi;
    std::vector<double> values;  // Kronrod estimate per component
    std::vector<double> errors;  // per component
    std::size_t split_axis = 0;
};

struct RawIntegral {
    std::vector<double> values;
    std::vector<double> errors;
    long evals = 0;
    bool converged = false;
};

// Evaluates the tensor-product Gauss–Kronrod pair on one cell. The error
// estimate per component is the sum over axes of |full Kronrod - Gauss along
// that axis|; the split axis is where that difference is largest.
void evaluate_cell(const VectorFn& fn, std::size_t n_out, Cell& cell, long& evals) {
    const std::size_t d = cell.lo.size();
    std::vector<double> center(d), half(d);
    double jacobian = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
        center[a] = 0.5 * (cell.lo[a] + cell.hi[a]);
        half[a] = 0.5 * (cell.hi[a] - cell.lo[a]);
        jacobian *= half[a];
    }

    std::vector<double> kronrod(n_out, 0.0);
    std::vector<std::vector<double>> gauss_axis(d, std::vector<double>(n_out, 0.0));
    std::vector<double> x(d), out(n_out);
    std::vector<int> idx(d, 0);

    for (;;) {
        double wk = 1.0;
        for (std::size_t a = 0; a < d; ++a) {
            x[a] = center[a] + half[a] * kGkNode[idx[a]];
            wk *= kKronrodW[idx[a]];
        }
        fn(x, out);
        ++evals;
        for (std::size_t k = 0; k < n_out; ++k) kronrod[k] += wk * out[k];
        for (std::size_t a = 0; a < d; ++a) {
            if (kGaussW[idx[a]] == 0.0) continue;
            double wg = kGaussW[idx[a]];
            for (std::size_t b = 0; b < d; ++b) {
                if (b != a) wg *= kKronrodW[idx[b]];
            }
            for (std::size_t k = 0; k < n_out; ++k) gauss_axis[a][k] += wg * out[k];
        }

        std::size_t carry = 0;
        while (carry < d && ++idx[carry] == kGkPoints) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry == d) break;
    }

    cell.values.assign(n_out, 0.0);
    cell.errors.assign(n_out, 0.0);
    double worst_axis_err = -1.0;
    cell.split_axis = 0;
    for (std::size_t a = 0; a < d; ++a) {
        double axis_err = 0.0;
        for (std::size_t k = 0; k < n_out; ++k)
            axis_err += std::abs(kronrod[k] - gauss_axis[a][k]);
        if (axis_err > worst_axis_err) {
            worst_axis_err = axis_err;
            cell.split_axis = a;
        }
    }
    for (std::size_t k = 0; k < n_out; ++k) {
        cell.values[k] = jacobian * kronrod[k];
        double err = 0.0;
        for (std::size_t a = 0; a < d; ++a) err += std::abs(kronrod[k] - gauss_axis[a][k]);
        cell.errors[k] = jacobian * err;
    }
}

// Adaptive bisection over cells, refining the cell with the largest error
// until every component total meets abs_tol. Accumulation happens in a
// deterministic order so repeated runs are bit-identical.
RawIntegral integrate_adaptive(const VectorFn& fn, std::size_t n_out, std::span<const double> lo,
                               std::span<const double> hi, std::span<const double> abs_tol,
                               long max_evals) {
    const std::size_t d = lo.size();
    std::vector<Cell> cells;

    // Initial uniform split (2 cells per axis, 4 on a plain interval) guards
    // against a deceptively small first error estimate on oscillatory
    // integrands.
    const int initial_per_axis = d == 1 ? 4 : 2;
    std::vector<int> idx(d, 0);
    for (;;) {
        Cell c;
        c.lo.resize(d);
        c.hi.resize(d);
        for (std::size_t a = 0; a < d; ++a) {
            const double w = (hi[a] - lo[a]) / initial_per_axis;
            c.lo[a] = lo[a] + idx[a] * w;
            c.hi[a] = idx[a] + 1 == initial_per_axis ? hi[a] : lo[a] + (idx[a] + 1) * w;
        }
        cells.push_back(std::move(c));
        std::size_t carry = 0;
        while (carry < d && ++idx[carry] == initial_per_axis) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry == d) break;
    }

    RawIntegral result;
    result.values.assign(n_out, 0.0);
    result.errors.assign(n_out, 0.0);

    std::vector<double> err_total(n_out, 0.0);

    // Max-heap on (cell error, insertion index); older cell wins ties.
    using HeapEntry = std::pair<double, std::size_t>;
    auto heap_less = [](const HeapEntry& a, const HeapEntry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(heap_less)> heap(heap_less);

    auto push_cell = [&](std::size_t ci) {
        double e = 0.0;
        for (double v : cells[ci].errors) e = std::max(e, v);
        for (std::size_t k = 0; k < n_out; ++k) err_total[k] += cells[ci].errors[k];
        heap.emplace(e, ci);
    };

    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        evaluate_cell(fn, n_out, cells[ci], result.evals);
        push_cell(ci);
    }

    auto converged = [&]() {
        for (std::size_t k = 0; k < n_out; ++k) {
            if (!(err_total[k] <= abs_tol[k])) return false;
        }
        return true;
    };

    while (!converged()) {
        if (heap.empty() || heap.top().first == 0.0) break;  // nothing left to refine
        if (result.evals >= max_evals) break;
        const std::size_t ci = heap.top().second;
        heap.pop();
        for (std::size_t k = 0; k < n_out; ++k) err_total[k] -= cells[ci].errors[k];

        const std::size_t axis = cells[ci].split_axis;
        const double mid = 0.5 * (cells[ci].lo[axis] + cells[ci].hi[axis]);
        Cell right;
        right.lo = cells[ci].lo;
        right.hi = cells[ci].hi;
        right.lo[axis] = mid;
        cells[ci].hi[axis] = mid;

        evaluate_cell(fn, n_out, cells[ci], result.evals);
        push_cell(ci);
        cells.push_back(std::move(right));
        evaluate_cell(fn, n_out, cells.back(), result.evals);
        push_cell(cells.size() - 1);
    }

    // Deterministic accumulation: cells sorted by their lower corner.
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cells[a].lo < cells[b].lo;
    });
    for (std::size_t i : order) {
        for (std::size_t k = 0; k < n_out; ++k) {
            result.values[k] += cells[i].values[k];
            result.errors[k] += cells[i].errors[k];
        }
    }
    result.converged = true;
    for (std::size_t k = 0; k < n_out; ++k) {
        if (!(result.errors[k] <= abs_tol[k])) result.converged = false;
    }
    return result;
}

VectorFn ast_integrand(std::span<const expr::Ast> fns, const domain::MeasureSpec& measure) {
    return [fns, &measure](std::span<const double> x, std::span<double> out) {
        const double rho = measure.density_at(x);
        for (std::size_t k = 0; k < fns.size(); ++k) {
            try {
                out[k] = expr::eval(fns[k], x) * rho;
            } catch (const Error& e) {
                if (e.status() != Status::eval_error) throw;
                std::string msg = "function ";
                msg += std::to_string(k + 1);
                msg += " failed at (";
                char buf[40];
                for (std::size_t i = 0; i < x.size(); ++i) {
                    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
                    if (i) msg += ", ";
                    msg += buf;
                }
                msg += "): ";
                msg += e.what();
                throw eval_error(std::move(msg));
            }
        }
    };
}

MeanVector discrete_mean(std::span<const expr::Ast> fns, const domain::MeasureSpec& measure) {
    MeanVector mv;
    mv.values.assign(fns.size(), 0.0);
    mv.error_estimate.assign(fns.size(), 0.0);
    for (const domain::DiscreteAtom& a : measure.atoms()) {
        for (std::size_t k = 0; k < fns.size(); ++k) {
            mv.values[k] += a.mass * expr::eval(fns[k], a.point.coords);
            ++mv.function_evals;
        }
    }
    return mv;
}

}  // namespace

double measure_mass_raw(const domain::MeasureSpec& measure, const Options& opts) {
    if (measure.kind() == domain::DomainKind::discrete) return measure.discrete_raw_total();
    if (!measure.density()) return measure.volume();

    VectorFn fn = [&measure](std::span<const double> x, std::span<double> out) {
        out[0] = measure.density_at(x);
    };
    // First pass pins the scale, second drives the absolute tolerance.
    const double coarse_tol[1] = {1e-6};
    RawIntegral coarse =
        integrate_adaptive(fn, 1, measure.lo(), measure.hi(), coarse_tol, opts.max_evals / 4);
    const double fine_tol[1] = {std::max(1e-13, 1e-11 * std::abs(coarse.values[0]))};
    RawIntegral fine = integrate_adaptive(fn, 1, measure.lo(), measure.hi(), fine_tol, opts.max_evals);
    if (!(fine.values[0] > 0.0))
        throw config_error("measure has nonpositive total mass");
    return fine.values[0];
}

MeanVector mean_vector(std::span<const expr::Ast> fns, const domain::MeasureSpec& measure,
                       const Options& opts) {
    if (fns.empty()) throw config_error("mean_vector requires at least one function");
    if (!(opts.tol > 0.0)) throw config_error("tolerance must be positive");
    if (measure.kind() == domain::DomainKind::discrete) return discrete_mean(fns, measure);

    const double mass = measure_mass_raw(measure, opts);
    const std::size_t n = fns.size();
    std::vector<double> abs_tol(n, opts.tol * mass * 0.5);
    RawIntegral raw = integrate_adaptive(ast_integrand(fns, measure), n, measure.lo(),
                                         measure.hi(), abs_tol, opts.max_evals);

    MeanVector mv;
    mv.function_evals = raw.evals;
    mv.values.resize(n);
    mv.error_estimate.resize(n);
    const double mass_err = measure.density() ? 1e-11 * mass : 0.0;
    bool within_tol = raw.converged;
    for (std::size_t k = 0; k < n; ++k) {
        mv.values[k] = raw.values[k] / mass;
        mv.error_estimate[k] = (raw.errors[k] + std::abs(mv.values[k]) * mass_err) / mass;
        if (!(mv.error_estimate[k] <= opts.tol)) within_tol = false;
    }
    if (!within_tol) {
        char buf[64];
        double worst = 0.0;
        for (double e : mv.error_estimate) worst = std::max(worst, e);
        std::snprintf(buf, sizeof buf, "%.3g", worst);
        throw IntegrationFailure("refinement budget exhausted; achieved error estimate " +
                                     std::string(buf) + " exceeds tolerance",
                                 std::move(mv));
    }
    return mv;
}

ConvexCombination riemann_atoms(std::span<const expr::Ast> fns, const domain::MeasureSpec& measure,
                                std::span<const double> target, long resolution) {
    ConvexCombination comb;
    comb.target.assign(target.begin(), target.end());

    if (measure.kind() == domain::DomainKind::discrete) {
        for (const domain::DiscreteAtom& a : measure.atoms()) {
            WeightedAtom atom;
            atom.point = a.point;
            atom.weight = a.mass;
            atom.image.resize(fns.size());
            for (std::size_t k = 0; k < fns.size(); ++k)
                atom.image[k] = expr::eval(fns[k], a.point.coords);
            comb.atoms.push_back(std::move(atom));
        }
        recompute_residual(comb);
        return comb;
    }

    const long n = long(fns.size());
    if (resolution < n + 2)
        throw config_error("resolution must be at least n+2 = " + std::to_string(n + 2));

    const std::size_t d = measure.dim();
    // Cells per axis so the total count approximates `resolution`.
    long per_axis = resolution;
    if (d == 2) per_axis = std::max<long>(2, long(std::ceil(std::sqrt(double(resolution)))));
    if (d == 3) per_axis = std::max<long>(2, long(std::ceil(std::cbrt(double(resolution)))));

    std::vector<long> idx(d, 0);
    std::vector<double> x(d);
    double weight_total = 0.0;
    for (;;) {
        WeightedAtom atom;
        for (std::size_t a = 0; a < d; ++a) {
            const double h = (measure.hi()[a] - measure.lo()[a]) / double(per_axis);
            x[a] = measure.lo()[a] + (double(idx[a]) + 0.5) * h;
        }
        atom.point.coords.assign(x.begin(), x.end());
        atom.weight = measure.density_at(x);  // cell volumes are equal; normalized below
        atom.image.resize(fns.size());
        for (std::size_t k = 0; k < fns.size(); ++k) atom.image[k] = expr::eval(fns[k], x);
        weight_total += atom.weight;
        comb.atoms.push_back(std::move(atom));

        std::size_t carry = 0;
        while (carry < d && ++idx[carry] == per_axis) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry == d) break;
    }
    if (!(weight_total > 0.0))
        throw numeric_error("the density vanishes at every partition midpoint; "
                            "increase the resolution");
    for (WeightedAtom& a : comb.atoms) a.weight /= weight_total;
    recompute_residual(comb);
    return comb;
}

ConvexCombination riemann_atoms_auto(std::span<const expr::Ast> fns,
                                     const domain::MeasureSpec& measure,
                                     std::span<const double> target, double residual_target,
                                     long initial_resolution) {
    constexpr long kMaxAtoms = 1L << 20;
    long resolution = std::max(initial_resolution, long(fns.size()) + 2);
    for (;;) {
        ConvexCombination comb = riemann_atoms(fns, measure, target, resolution);
        if (measure.kind() == domain::DomainKind::discrete) return comb;
        if (comb.residual <= residual_target) return comb;
        if (resolution >= kMaxAtoms) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3g", comb.residual);
            throw numeric_error(
                "discretization residual " + std::string(buf) +
                " still exceeds the target at the atom cap; a larger resolution is required");
        }
        resolution = std::min(kMaxAtoms, resolution * 2);
    }
}

double indicator_probability(const domain::MeasureSpec& measure, const domain::Predicate& pred,
                             double tol) {
    const Options opts;
    const double mass = measure_mass_raw(measure, opts);
    VectorFn fn = [&measure, &pred](std::span<const double> x, std::span<double> out) {
        out[0] = pred(x) ? measure.density_at(x) : 0.0;
    };
    const double abs_tol[1] = {tol * mass};
    RawIntegral raw =
        integrate_adaptive(fn, 1, measure.lo(), measure.hi(), abs_tol, opts.max_evals);
    if (!raw.converged) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3g", raw.errors[0] / mass);
        throw numeric_error("indicator integration did not converge; achieved error estimate " +
                            std::string(buf));
    }
    return raw.values[0] / mass;
}

}  // namespace meanquad::integrate
