#include <cmath>
#include <random>

#include <doctest.h>

#include "integrate.hpp"
#include "testutil.hpp"

using meanquad::ConvexCombination;
using meanquad::Error;
namespace domain = meanquad::domain;
namespace expr = meanquad::expr;
namespace integrate = meanquad::integrate;

namespace {

std::vector<expr::Ast> parse_all(std::initializer_list<const char*> sources) {
    std::vector<expr::Ast> out;
    for (const char* s : sources) out.push_back(expr::parse(s));
    return out;
}

domain::Point pt(std::vector<double> coords) {
    domain::Point p;
    p.coords = std::move(coords);
    return p;
}

}  // namespace

TEST_CASE("constants integrate to themselves") {
    const auto fns = parse_all({"7"});
    const auto m = domain::MeasureSpec::interval(0.0, 1.0);
    const auto mv = integrate::mean_vector(fns, m);
    CHECK(std::abs(mv.values[0] - 7.0) <= 1e-12);
}

TEST_CASE("moments of t on [0,1] match the closed forms") {
    // Oracle: ∫₀¹ t^k dt = 1/(k+1).
    const auto fns = parse_all({"t", "t^2", "t^3"});
    const auto m = domain::MeasureSpec::interval(0.0, 1.0);
    const auto mv = integrate::mean_vector(fns, m);
    CHECK(std::abs(mv.values[0] - 0.5) <= 1e-9);
    CHECK(std::abs(mv.values[1] - 1.0 / 3.0) <= 1e-9);
    CHECK(std::abs(mv.values[2] - 0.25) <= 1e-9);
    for (double e : mv.error_estimate) CHECK(e <= 1e-9);
    CHECK(mv.function_evals > 0);
}

TEST_CASE("the step system has mean zero on [-1,1]") {
    const auto fns = parse_all({"2*step(t)-1"});
    const auto m = domain::MeasureSpec::interval(-1.0, 1.0);
    const auto mv = integrate::mean_vector(fns, m);
    CHECK(std::abs(mv.values[0]) <= 1e-9);
}

TEST_CASE("density reweights the mean") {
    // E t under density 2t on [0,1] is ∫ 2t² = 2/3.
    const auto fns = parse_all({"t"});
    const auto m = domain::MeasureSpec::interval(0.0, 1.0, expr::parse("2*t"));
    const auto mv = integrate::mean_vector(fns, m);
    CHECK(std::abs(mv.values[0] - 2.0 / 3.0) <= 1e-9);
}

TEST_CASE("box means work up to dimension three") {
    const auto m2 = domain::MeasureSpec::box({0.0, 0.0}, {1.0, 2.0});
    const auto mv2 = integrate::mean_vector(parse_all({"x1*x2"}), m2);
    CHECK(std::abs(mv2.values[0] - 0.5) <= 1e-9);  // (1/2)(1) = 0.5

    const auto m3 = domain::MeasureSpec::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const auto mv3 = integrate::mean_vector(parse_all({"x1+x2+x3"}), m3);
    CHECK(std::abs(mv3.values[0] - 1.5) <= 1e-9);
}

TEST_CASE("discrete means are exact weighted sums") {
    const auto m = domain::MeasureSpec::discrete({pt({0.0}), pt({10.0})}, {0.5, 0.5});
    const auto mv = integrate::mean_vector(parse_all({"t"}), m);
    CHECK(mv.values[0] == 5.0);
    CHECK(mv.error_estimate[0] == 0.0);
}

TEST_CASE("evaluation failures name the function and the point") {
    const auto fns = parse_all({"t", "log(t-2)"});
    const auto m = domain::MeasureSpec::interval(0.0, 1.0);
    try {
        (void)integrate::mean_vector(fns, m);
        FAIL_CHECK("expected an eval error");
    } catch (const Error& e) {
        CHECK(e.status() == meanquad::Status::eval_error);
        CHECK(std::string(e.what()).find("function 2") != std::string::npos);
        CHECK(std::string(e.what()).find("at (") != std::string::npos);
    }
}

TEST_CASE("budget exhaustion reports the achieved error") {
    integrate::Options opts;
    opts.tol = 1e-14;
    opts.max_evals = 300;
    const auto fns = parse_all({"sin(17*t)*exp(3*t)"});
    const auto m = domain::MeasureSpec::interval(0.0, 3.0);
    try {
        (void)integrate::mean_vector(fns, m, opts);
        FAIL_CHECK("expected an integration failure");
    } catch (const integrate::IntegrationFailure& e) {
        CHECK(e.best().values.size() == 1);
        CHECK(e.best().error_estimate[0] > 0.0);
        CHECK(std::string(e.what()).find("achieved error") != std::string::npos);
    }
}

TEST_CASE("linearity of the mean over random function pairs") {
    std::mt19937_64 rng(11);
    const auto m = domain::MeasureSpec::interval(-1.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::string f = testutil::random_polynomial(rng, 4);
        const std::string g = testutil::random_trig(rng);
        const double alpha = testutil::uniform(rng, -2.0, 2.0);
        const double beta = testutil::uniform(rng, -2.0, 2.0);
        const std::string combined =
            "(" + testutil::fmt(alpha) + ")*(" + f + ")+(" + testutil::fmt(beta) + ")*(" + g + ")";

        const auto parts = parse_all({f.c_str(), g.c_str(), combined.c_str()});
        const auto mv = integrate::mean_vector(parts, m);
        const double expected = alpha * mv.values[0] + beta * mv.values[1];
        CHECK(std::abs(mv.values[2] - expected) <= 2e-9);
    }
}

TEST_CASE("syntactically nonnegative functions have nonnegative means") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::string base = testutil::random_polynomial(rng, 3);
        const std::string fn = (rng() & 1) ? "abs(" + base + ")" : "(" + base + ")^2";
        const auto p = parse_all({fn.c_str()});
        const auto iv = testutil::random_interval(rng);
        const auto m = domain::MeasureSpec::interval(iv.a, iv.b);
        const auto mv = integrate::mean_vector(p, m);
        CHECK(mv.values[0] >= -1e-9);
    }
}

TEST_CASE("riemann_atoms passes discrete measures through unchanged") {
    const auto m = domain::MeasureSpec::discrete({pt({-1.0}), pt({1.0})}, {0.5, 0.5});
    const auto fns = parse_all({"t"});
    const double target[1] = {0.0};
    const ConvexCombination comb = integrate::riemann_atoms(fns, m, target, 4096);
    REQUIRE(comb.atoms.size() == 2);
    CHECK(comb.atoms[0].weight == 0.5);
    CHECK(comb.atoms[1].weight == 0.5);
    CHECK(comb.atoms[0].point.coords[0] == -1.0);
}

TEST_CASE("midpoint atoms at resolution 4 reproduce a linear mean exactly") {
    const auto m = domain::MeasureSpec::interval(0.0, 1.0);
    const auto fns = parse_all({"t"});
    const double target[1] = {0.5};
    const ConvexCombination comb = integrate::riemann_atoms(fns, m, target, 4);
    REQUIRE(comb.atoms.size() == 4);
    CHECK(comb.atoms[0].point.coords[0] == 0.125);
    CHECK(comb.atoms[1].point.coords[0] == 0.375);
    CHECK(comb.atoms[2].point.coords[0] == 0.625);
    CHECK(comb.atoms[3].point.coords[0] == 0.875);
    for (const auto& a : comb.atoms) CHECK(a.weight == 0.25);
    CHECK(comb.residual == 0.0);  // midpoint rule is exact for linear integrands
}

TEST_CASE("midpoint atoms approximate the step mean by direct summation") {
    const auto m = domain::MeasureSpec::interval(-1.0, 1.0);
    const auto fns = parse_all({"2*step(t)-1"});
    const double target[1] = {0.0};
    const ConvexCombination comb = integrate::riemann_atoms(fns, m, target, 4096);
    double direct = 0.0;  // oracle: direct weighted summation
    for (const auto& a : comb.atoms) direct += a.weight * a.image[0];
    CHECK(std::abs(direct) <= 1e-3);
    CHECK(comb.residual <= 1e-3);
}

TEST_CASE("atom weights are a probability vector") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto iv = testutil::random_interval(rng);
        const auto m = domain::MeasureSpec::interval(iv.a, iv.b, expr::parse("exp(-t^2)"));
        const auto fns = parse_all({"t"});
        const double target[1] = {0.0};
        const auto comb = integrate::riemann_atoms(fns, m, target, 64);
        double sum = 0.0;
        for (const auto& a : comb.atoms) {
            CHECK(a.weight >= 0.0);
            sum += a.weight;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-14);
    }
}

TEST_CASE("riemann_atoms rejects too-small resolutions") {
    const auto m = domain::MeasureSpec::interval(0.0, 1.0);
    const auto fns = parse_all({"t", "t^2", "t^3"});
    const double target[3] = {0.5, 1.0 / 3.0, 0.25};
    CHECK_THROWS_AS((void)integrate::riemann_atoms(fns, m, target, 4), Error);
}

TEST_CASE("auto-doubled atoms meet the residual target") {
    const auto m = domain::MeasureSpec::interval(0.0, 1.0);
    const auto fns = parse_all({"t^4"});
    const auto mv = integrate::mean_vector(fns, m);
    const auto comb = integrate::riemann_atoms_auto(fns, m, mv.values, 1e-8, 16);
    CHECK(comb.residual <= 1e-8);
    CHECK(comb.atoms.size() > 16);  // 16 midpoints are not enough for t^4 at 1e-8
}
