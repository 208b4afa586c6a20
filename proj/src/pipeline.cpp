#include "pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "integrate.hpp"
#include "linalg.hpp"

namespace meanquad::pipeline {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

template <typename F>
auto run_stage(const char* stage, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.status(), std::string(stage) + ": " + e.what(), e.position());
    }
}

// Re-solves the weights for the fixed node set against [target; 1] and keeps
// the result when it is a valid convex combination that does not make the
// residual worse. Pins the emitted residual near machine precision whenever
// an exact representation on these nodes exists.
void refit_weights(ConvexCombination& comb) {
    const std::size_t n = comb.target.size();
    const std::size_t m = comb.atoms.size();
    if (m == 0 || m > n + 1) return;

    linalg::Matrix a(n + 1, m);
    std::vector<double> rhs(n + 1);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t r = 0; r < n; ++r) a.at(r, c) = comb.atoms[c].image[r] - comb.target[r];
        a.at(n, c) = 1.0;
    }
    for (std::size_t r = 0; r < n; ++r) rhs[r] = 0.0;
    rhs[n] = 1.0;

    const auto w = linalg::least_squares(a, rhs);
    if (!w) return;
    double sum = 0.0;
    for (double v : *w) {
        if (v < -1e-12 || !std::isfinite(v)) return;
        sum += std::max(0.0, v);
    }
    if (!(sum > 0.0)) return;

    ConvexCombination candidate = comb;
    for (std::size_t c = 0; c < m; ++c)
        candidate.atoms[c].weight = std::max(0.0, (*w)[c]) / sum;
    if (recompute_residual(candidate) <= comb.residual) comb = candidate;
}

std::vector<double> evaluate_combination_sum(const QuadratureRule& rule,
                                             std::span<const expr::Ast> fns) {
    std::vector<double> sum(fns.size(), 0.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        for (std::size_t k = 0; k < fns.size(); ++k)
            sum[k] += rule.weights[i] * expr::eval(fns[k], rule.nodes[i].coords);
    }
    return sum;
}

}  // namespace

std::vector<expr::Ast> RunConfig::asts() const {
    std::vector<expr::Ast> out;
    out.reserve(functions.size());
    for (const FunctionSpec& f : functions) out.push_back(f.ast);
    return out;
}

bool RunConfig::all_continuous() const {
    for (const FunctionSpec& f : functions) {
        if (!f.continuous) return false;
    }
    return true;
}

void RunConfig::validate() const {
    if (functions.empty()) throw config_error("at least one function is required");
    if (!(tolerance > 0.0)) throw config_error("tolerance must be positive");
    if (resolution < long(functions.size()) + 2)
        throw config_error("resolution must be at least n+2");
    if (max_evals <= 0) throw config_error("max_evals must be positive");
    const std::size_t d = measure.dim();
    for (std::size_t k = 0; k < functions.size(); ++k) {
        if (functions[k].ast.max_var_index() > d)
            throw config_error("function " + std::to_string(k + 1) +
                               " references a variable beyond the domain dimension " +
                               std::to_string(d));
    }
}

namespace {

// Atoms → prune → (reduce) → refit, for one discretization residual target.
ConvexCombination run_reduction_chain(const RunConfig& config, std::span<const expr::Ast> fns,
                                      const integrate::MeanVector& mean, double atom_residual,
                                      bool* reduced_out, SynthesisTrace* trace) {
    const std::size_t n = fns.size();
    ConvexCombination comb = run_stage("riemann_atoms", [&] {
        return integrate::riemann_atoms_auto(fns, config.measure, mean.values, atom_residual,
                                             config.resolution);
    });

    comb = run_stage("prune", [&] {
        return carath::prune(comb, trace ? &trace->prune_rounds : nullptr);
    });
    refit_weights(comb);

    bool reduced = comb.atoms.size() <= n;
    if (config.all_continuous() && config.measure.supports_paths() && !reduced) {
        reduce::ReduceResult rr =
            run_stage("reduce", [&] { return reduce::reduce(comb, fns, config.measure); });
        if (trace) trace->reduction = rr.trace;
        comb = std::move(rr.comb);
        refit_weights(comb);
        reduced = comb.atoms.size() <= n;
    }
    *reduced_out = reduced;
    return comb;
}

}  // namespace

QuadratureRule synthesize(const RunConfig& config, SynthesisTrace* trace) {
    config.validate();
    const std::vector<expr::Ast> fns = config.asts();
    const std::size_t n = fns.size();

    integrate::Options opts;
    opts.tol = config.tolerance / 10.0;
    opts.max_evals = config.max_evals;
    const integrate::MeanVector mean = run_stage(
        "integrate", [&] { return integrate::mean_vector(fns, config.measure, opts); });

    // The path reduction re-anchors on the target, so a 10x discretization
    // residual is normally plenty. When the final residual misses the gate
    // anyway (rank-degenerate images, flagged reductions), the chain reruns
    // with the discretization driven below the tolerance itself.
    bool reduced = false;
    ConvexCombination comb =
        run_reduction_chain(config, fns, mean, 10.0 * config.tolerance, &reduced, trace);
    if (recompute_residual(comb) > 0.9 * config.tolerance) {
        if (trace) {
            trace->prune_rounds.clear();
            trace->reduction.reset();
        }
        comb = run_reduction_chain(config, fns, mean, 0.5 * config.tolerance, &reduced, trace);
    }

    QuadratureRule rule;
    rule.target = mean.values;
    rule.reduced = reduced;
    rule.total_mass = 1.0;
    for (WeightedAtom& a : comb.atoms) {
        rule.nodes.push_back(std::move(a.point));
        rule.weights.push_back(a.weight);
    }

    if (config.unnormalized) {
        const double mass = run_stage(
            "measure_mass", [&] { return integrate::measure_mass_raw(config.measure, opts); });
        rule.total_mass = mass;
        for (double& w : rule.weights) w *= mass;
        for (double& t : rule.target) t *= mass;
    }

    // Emission-time residual, recomputed by direct evaluation.
    const std::vector<double> sum = evaluate_combination_sum(rule, fns);
    rule.residual = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        rule.residual = std::max(rule.residual, std::abs(sum[k] - rule.target[k]));

    const double gate = config.tolerance * std::max(1.0, rule.total_mass);
    if (!(rule.residual <= gate))
        throw tolerance_error("emit: residual " + fmt(rule.residual) +
                              " exceeds the configured tolerance " + fmt(gate));
    return rule;
}

VerificationReport verify(const QuadratureRule& rule, const RunConfig& config) {
    config.validate();
    const std::vector<expr::Ast> fns = config.asts();
    const std::size_t n = fns.size();
    if (rule.target.size() != n)
        throw config_error("rule target dimension does not match the config");
    if (rule.nodes.size() != rule.weights.size())
        throw config_error("rule nodes and weights differ in length");
    for (const domain::Point& p : rule.nodes) {
        if (config.measure.kind() != domain::DomainKind::discrete &&
            p.dim() != config.measure.dim())
            throw config_error("rule node dimension does not match the domain");
    }

    VerificationReport report;
    report.tolerance = config.tolerance;

    integrate::Options opts;
    opts.tol = config.tolerance / 10.0;
    opts.max_evals = config.max_evals;
    const integrate::MeanVector mean = integrate::mean_vector(fns, config.measure, opts);
    report.target_recomputed = mean.values;
    for (double& v : report.target_recomputed) v *= rule.total_mass;

    report.combination_sum = evaluate_combination_sum(rule, fns);
    report.weight_sum = 0.0;
    double min_weight = 0.0;
    for (double w : rule.weights) {
        report.weight_sum += w;
        min_weight = std::min(min_weight, w);
    }

    const double scale = std::max(1.0, std::abs(rule.total_mass));
    bool ok = min_weight >= -1e-12;
    if (std::abs(report.weight_sum - rule.total_mass) > 1e-12 * scale) ok = false;

    report.target_discrepancy.resize(n);
    report.combination_discrepancy.resize(n);
    report.residual_recomputed = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        report.target_discrepancy[k] = std::abs(rule.target[k] - report.target_recomputed[k]);
        report.combination_discrepancy[k] =
            std::abs(report.combination_sum[k] - rule.target[k]);
        report.residual_recomputed =
            std::max(report.residual_recomputed, report.combination_discrepancy[k]);
        if (report.target_discrepancy[k] > config.tolerance * scale) ok = false;
        if (report.combination_discrepancy[k] > config.tolerance * scale) ok = false;
    }
    report.pass = ok;
    return report;
}

}  // namespace meanquad::pipeline
