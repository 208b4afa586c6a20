#include "domain.hpp"

#include <cmath>
#include <cstdio>

#include "integrate.hpp"

namespace meanquad::domain {

namespace {

void require_finite_coords(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw config_error(std::string(what) + " must be finite");
    }
}

std::string point_text(std::span<const double> coords) {
    std::string s = "(";
    char buf[40];
    for (std::size_t i = 0; i < coords.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", coords[i]);
        if (i) s += ", ";
        s += buf;
    }
    s += ")";
    return s;
}

}  // namespace

MeasureSpec MeasureSpec::interval(double a, double b, std::optional<expr::Ast> density) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw config_error("interval bounds must be finite");
    if (!(a < b)) throw config_error("interval requires a < b");
    MeasureSpec m;
    m.kind_ = DomainKind::interval;
    m.lo_ = {a};
    m.hi_ = {b};
    m.density_ = std::move(density);
    if (m.density_ && m.density_->max_var_index() > 1)
        throw config_error("density references a variable beyond the domain dimension");
    return m;
}

MeasureSpec MeasureSpec::box(std::vector<double> lo, std::vector<double> hi,
                             std::optional<expr::Ast> density) {
    if (lo.empty() || lo.size() != hi.size()) throw config_error("box bounds must have equal, nonzero dimension");
    if (lo.size() > 3) throw config_error("box domains are supported up to dimension 3");
    require_finite_coords(lo, "box bounds");
    require_finite_coords(hi, "box bounds");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw config_error("box requires lo < hi componentwise");
    }
    MeasureSpec m;
    m.kind_ = DomainKind::box;
    m.lo_ = std::move(lo);
    m.hi_ = std::move(hi);
    m.density_ = std::move(density);
    if (m.density_ && m.density_->max_var_index() > m.lo_.size())
        throw config_error("density references a variable beyond the domain dimension");
    return m;
}

MeasureSpec MeasureSpec::discrete(std::vector<Point> points, std::vector<double> masses) {
    if (points.empty() || points.size() != masses.size())
        throw config_error("discrete measure requires matching nonempty points and masses");
    const std::size_t d = points[0].dim();
    if (d == 0 || d > 9) throw config_error("discrete points must have dimension between 1 and 9");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].dim() != d) throw config_error("discrete points must share one dimension");
        require_finite_coords(points[i].coords, "discrete point");
        if (!std::isfinite(masses[i]) || masses[i] < 0.0)
            throw config_error("discrete masses must be finite and nonnegative");
        total += masses[i];
    }
    if (!(total > 0.0)) throw config_error("discrete measure needs at least one positive mass");

    MeasureSpec m;
    m.kind_ = DomainKind::discrete;
    m.raw_total_ = total;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (masses[i] == 0.0) continue;  // zero-mass atoms dropped at load
        Point p = std::move(points[i]);
        p.atom_index = m.atoms_.size();
        m.atoms_.push_back(DiscreteAtom{std::move(p), masses[i] / total});
    }

    // Nudge the last mass so the ordered sum is exactly 1: P(S) is then 1
    // bitwise, not merely within rounding.
    for (int pass = 0; pass < 5; ++pass) {
        double sum = 0.0;
        for (const DiscreteAtom& a : m.atoms_) sum += a.mass;
        if (sum == 1.0) break;
        m.atoms_.back().mass += 1.0 - sum;
        if (!(m.atoms_.back().mass > 0.0))
            throw config_error("discrete mass normalization failed");
    }
    return m;
}

double MeasureSpec::volume() const {
    if (kind_ == DomainKind::discrete) throw config_error("discrete measures have no volume");
    double v = 1.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) v *= hi_[i] - lo_[i];
    return v;
}

bool MeasureSpec::contains(const Point& p) const {
    if (kind_ == DomainKind::discrete) return p.atom_index < atoms_.size();
    if (p.dim() != dim()) return false;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!(p.coords[i] >= lo_[i] && p.coords[i] <= hi_[i])) return false;
    }
    return true;
}

double MeasureSpec::density_at(std::span<const double> coords) const {
    if (!density_) return 1.0;
    const double v = expr::eval(*density_, coords);
    if (v < 0.0)
        throw config_error("density is negative at " + point_text(coords));
    return v;
}

Point path_eval(const PathSpec& path, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw numeric_error("path parameter outside [0,1]");
    if (lambda == 0.0) return path.from;
    if (lambda == 1.0) return path.to;
    Point p;
    p.coords.resize(path.from.dim());
    for (std::size_t i = 0; i < p.coords.size(); ++i)
        p.coords[i] = (1.0 - lambda) * path.from.coords[i] + lambda * path.to.coords[i];
    return p;
}

PathSpec make_path(const MeasureSpec& measure, Point from, Point to) {
    if (!measure.supports_paths())
        throw config_error("discrete domains are not path connected; no path exists");
    if (!measure.contains(from) || !measure.contains(to))
        throw config_error("path endpoints must lie inside the domain");
    return PathSpec{std::move(from), std::move(to)};
}

double prob(const MeasureSpec& measure, const Predicate& pred, double tol) {
    if (measure.kind() == DomainKind::discrete) {
        double p = 0.0;
        for (const DiscreteAtom& a : measure.atoms()) {
            if (pred(a.point.coords)) p += a.mass;
        }
        return p;
    }
    return integrate::indicator_probability(measure, pred, tol);
}

}  // namespace meanquad::domain
