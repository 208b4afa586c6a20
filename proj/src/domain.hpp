#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"
#include "expr.hpp"

namespace meanquad::domain {

// A point of the domain. For discrete measures atom_index records which atom
// the point came from; coordinates are always present.
struct Point {
    std::vector<double> coords;
    std::size_t atom_index = npos;

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t dim() const { return coords.size(); }
};

enum class DomainKind { interval, box, discrete };

struct DiscreteAtom {
    Point point;
    double mass;  // normalized to sum 1 across the measure
};

// Normalized measure on the domain. Interval/box carry an optional density
// expression; discrete measures carry atoms whose masses are normalized at
// construction (zero-mass atoms dropped). Immutable afterwards.
class MeasureSpec {
public:
    static MeasureSpec interval(double a, double b, std::optional<expr::Ast> density = {});
    static MeasureSpec box(std::vector<double> lo, std::vector<double> hi,
                           std::optional<expr::Ast> density = {});
    static MeasureSpec discrete(std::vector<Point> points, std::vector<double> masses);

    DomainKind kind() const { return kind_; }
    std::size_t dim() const { return lo_.empty() ? atoms_[0].point.dim() : lo_.size(); }

    // Interval/box bounds; empty for discrete.
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }

    const std::optional<expr::Ast>& density() const { return density_; }
    const std::vector<DiscreteAtom>& atoms() const { return atoms_; }

    // Lebesgue volume of the interval/box (ignores the density).
    double volume() const;

    // Sum of the discrete masses as given, before normalization. For
    // interval/box measures the raw mass is volume() for uniform densities
    // and must be integrated otherwise (see integrate::measure_mass_raw).
    double discrete_raw_total() const { return raw_total_; }

    bool supports_paths() const { return kind_ != DomainKind::discrete; }
    bool contains(const Point& p) const;

    // Density value at a point; 1 when no density is set. Throws
    // Error(config_error) if the density evaluates negative.
    double density_at(std::span<const double> coords) const;

private:
    MeasureSpec() = default;

    DomainKind kind_ = DomainKind::interval;
    std::vector<double> lo_, hi_;
    std::optional<expr::Ast> density_;
    std::vector<DiscreteAtom> atoms_;
    double raw_total_ = 0.0;
};

// Straight segment between two points of a convex domain, oriented so that
// eval(0) is `from` and eval(1) is `to`.
struct PathSpec {
    Point from;
    Point to;
};

// (1-lambda)·from + lambda·to, with bitwise-exact endpoints.
Point path_eval(const PathSpec& path, double lambda);

// Throws Error(config_error) when the measure has no paths (discrete) or an
// endpoint lies outside the domain.
PathSpec make_path(const MeasureSpec& measure, Point from, Point to);

using Predicate = std::function<bool(std::span<const double>)>;

// P(B) for the indicator of `pred`: direct mass summation on discrete
// measures, adaptive integration of the indicator on interval/box measures.
// Throws Error(numeric_error) with the achieved error estimate when the
// integration fails to converge to `tol`.
double prob(const MeasureSpec& measure, const Predicate& pred, double tol = 1e-10);

}  // namespace meanquad::domain
