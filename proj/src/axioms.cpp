#include "axioms.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "caratheodory.hpp"
#include "integrate.hpp"

namespace meanquad::axioms {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Bits-to-unit-interval conversion done by hand so results do not depend on
// the standard library's distribution implementation.
double unit_double(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

// Nonnegativity is a precondition of the inequality; probe it on a grid (and
// on every atom for discrete measures).
void require_nonnegative(const expr::Ast& fn, const domain::MeasureSpec& measure) {
    const auto fail = [&](std::span<const double> x, double v) {
        throw config_error("check_markov requires a nonnegative function; sampled " + fmt(v));
        (void)x;
    };
    if (measure.kind() == domain::DomainKind::discrete) {
        for (const domain::DiscreteAtom& a : measure.atoms()) {
            const double v = expr::eval(fn, a.point.coords);
            if (v < 0.0) fail(a.point.coords, v);
        }
        return;
    }
    const std::size_t d = measure.dim();
    const long per_axis = d == 1 ? 512 : (d == 2 ? 32 : 10);
    std::vector<long> idx(d, 0);
    std::vector<double> x(d);
    for (;;) {
        for (std::size_t a = 0; a < d; ++a) {
            const double h = (measure.hi()[a] - measure.lo()[a]) / double(per_axis);
            x[a] = measure.lo()[a] + (double(idx[a]) + 0.5) * h;
        }
        const double v = expr::eval(fn, x);
        if (v < 0.0) fail(x, v);
        std::size_t carry = 0;
        while (carry < d && ++idx[carry] == per_axis) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry == d) break;
    }
}

}  // namespace

PropertyReport check_markov(const expr::Ast& fn, const domain::MeasureSpec& measure,
                            std::span<const double> epsilons, double tol) {
    require_nonnegative(fn, measure);

    PropertyReport report;
    report.property_name = "markov";

    const expr::Ast fns[1] = {fn};
    integrate::Options opts;
    opts.tol = tol;
    const integrate::MeanVector mean = integrate::mean_vector(fns, measure, opts);
    const double ex = mean.values[0];

    for (double eps : epsilons) {
        if (!(eps > 0.0)) throw config_error("markov epsilons must be positive");
        const double p = domain::prob(
            measure, [&](std::span<const double> x) { return expr::eval(fn, x) > eps; }, tol);
        const double bound = ex / eps + 1e-9;
        ++report.cases_run;
        if (!(p <= bound)) {
            report.failures.push_back(
                {"eps=" + fmt(eps) + " P(X>eps)=" + fmt(p) + " EX=" + fmt(ex), p, bound});
        }
    }
    report.passed = report.failures.empty();
    return report;
}

PropertyReport check_fap(const domain::MeasureSpec& measure, long trials, std::uint64_t seed) {
    if (measure.kind() != domain::DomainKind::discrete)
        throw config_error("check_fap requires a discrete measure");

    PropertyReport report;
    report.property_name = "fap";
    std::mt19937_64 rng(seed);
    const std::size_t d = measure.dim();

    // P(S) = 1 exactly after normalization.
    const double total = domain::prob(measure, [](std::span<const double>) { return true; });
    ++report.cases_run;
    if (std::abs(total - 1.0) > 1e-12)
        report.failures.push_back({"P(S)", total, 1.0});

    for (long trial = 0; trial < trials; ++trial) {
        // Random linear functional h(x)=Σ rᵢxᵢ and threshold c strictly
        // between the attained h values, so {h<c} and {h>c} are disjoint and
        // every atom lands in exactly one side.
        std::vector<double> r(d);
        for (double& v : r) v = 2.0 * unit_double(rng) - 1.0;
        double h_lo = 0.0, h_hi = 0.0;
        bool first = true;
        for (const domain::DiscreteAtom& a : measure.atoms()) {
            double h = 0.0;
            for (std::size_t i = 0; i < d; ++i) h += r[i] * a.point.coords[i];
            h_lo = first ? h : std::min(h_lo, h);
            h_hi = first ? h : std::max(h_hi, h);
            first = false;
        }
        const double c = h_lo + (h_hi - h_lo) * unit_double(rng);

        auto h_of = [&](std::span<const double> x) {
            double h = 0.0;
            for (std::size_t i = 0; i < d; ++i) h += r[i] * x[i];
            return h;
        };
        domain::Predicate below = [&](std::span<const double> x) { return h_of(x) < c; };
        domain::Predicate above = [&](std::span<const double> x) { return h_of(x) > c; };
        domain::Predicate either = [&](std::span<const double> x) {
            const double h = h_of(x);
            return h < c || h > c;
        };

        const double pa = domain::prob(measure, below);
        const double pb = domain::prob(measure, above);
        const double pu = domain::prob(measure, either);
        ++report.cases_run;
        if (std::abs(pu - pa - pb) > 1e-12)
            report.failures.push_back({"additivity trial " + std::to_string(trial),
                                       std::abs(pu - pa - pb), 1e-12});
        if (pa < 0.0 || pb < 0.0)
            report.failures.push_back({"nonnegativity trial " + std::to_string(trial),
                                       std::min(pa, pb), 0.0});
    }
    report.passed = report.failures.empty();
    return report;
}

namespace {

template <typename F>
auto hull_stage(const char* stage, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.status(), std::string(stage) + ": " + e.what(), e.position());
    }
}

}  // namespace

PropertyReport check_hull_membership(std::span<const expr::Ast> fns,
                                     const domain::MeasureSpec& measure, double tol,
                                     long resolution) {
    PropertyReport report;
    report.property_name = "hull";

    integrate::Options opts;
    opts.tol = tol / 10.0;
    const integrate::MeanVector mean =
        hull_stage("integrate", [&] { return integrate::mean_vector(fns, measure, opts); });
    const ConvexCombination atoms = hull_stage("riemann_atoms", [&] {
        return integrate::riemann_atoms_auto(fns, measure, mean.values, tol, resolution);
    });
    const ConvexCombination cert = hull_stage("prune", [&] { return carath::prune(atoms); });

    ++report.cases_run;
    if (!(cert.residual <= tol))
        report.failures.push_back({"certificate residual", cert.residual, tol});
    double min_w = 0.0, sum_w = 0.0;
    for (const WeightedAtom& a : cert.atoms) {
        min_w = std::min(min_w, a.weight);
        sum_w += a.weight;
    }
    if (min_w < -1e-12) report.failures.push_back({"certificate weight", min_w, -1e-12});
    if (std::abs(sum_w - 1.0) > 1e-12)
        report.failures.push_back({"certificate weight sum", sum_w, 1.0});
    report.passed = report.failures.empty();
    return report;
}

}  // namespace meanquad::axioms
