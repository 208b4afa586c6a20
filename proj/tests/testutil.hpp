#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace testutil {

// Uniform doubles straight from the engine bits, so generated cases do not
// depend on the standard library's distribution internals.
inline double unit(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
}

inline long uniform_int(std::mt19937_64& rng, long lo, long hi) {
    return lo + long(rng() % std::uint64_t(hi - lo + 1));
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Random polynomial of degree <= max_degree with coefficients in [-1,1],
// rendered as an expression string.
inline std::string random_polynomial(std::mt19937_64& rng, int max_degree) {
    const int degree = int(uniform_int(rng, 1, max_degree));
    std::string s = fmt(uniform(rng, -1.0, 1.0));
    for (int k = 1; k <= degree; ++k) {
        s += "+(" + fmt(uniform(rng, -1.0, 1.0)) + ")*t^" + std::to_string(k);
    }
    return s;
}

// Random trig sum a·cos(j t) + b·sin(k t) with small integer frequencies.
inline std::string random_trig(std::mt19937_64& rng) {
    const long j = uniform_int(rng, 1, 3);
    const long k = uniform_int(rng, 1, 3);
    return "(" + fmt(uniform(rng, -1.0, 1.0)) + ")*cos(" + std::to_string(j) + "*t)+(" +
           fmt(uniform(rng, -1.0, 1.0)) + ")*sin(" + std::to_string(k) + "*t)";
}

// Either of the above.
inline std::string random_system_fn(std::mt19937_64& rng) {
    return (rng() & 1) ? random_polynomial(rng, 5) : random_trig(rng);
}

// Strictly increasing continuous function: nonnegative mix of t, t^3 and an
// exponential, plus a random offset.
inline std::string random_monotone(std::mt19937_64& rng) {
    return fmt(uniform(rng, 0.1, 2.0)) + "*t+" + fmt(uniform(rng, 0.0, 1.0)) + "*t^3+" +
           fmt(uniform(rng, 0.1, 1.0)) + "*exp(0.5*t)+(" + fmt(uniform(rng, -1.0, 1.0)) + ")";
}

struct IntervalSpec {
    double a, b;
};

inline IntervalSpec random_interval(std::mt19937_64& rng) {
    const double a = uniform(rng, -3.0, 1.0);
    return {a, a + uniform(rng, 0.5, 3.0)};
}

}  // namespace testutil
