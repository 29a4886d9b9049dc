#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

inline double rel_err(double got, double want)
{
    double d = std::fabs(got - want);
    return want == 0.0 ? d : d / std::fabs(want);
}

inline std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    return g;
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(unsigned long long seed) : eng(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
};

// Richardson-extrapolated central difference.
template <class F>
double central_diff(F&& f, double x, double h)
{
    auto d = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
    return (4 * d(h / 2) - d(h)) / 3;
}

template <class F>
double second_diff(F&& f, double x, double h)
{
    auto d = [&](double s) { return (f(x + s) - 2 * f(x) + f(x - s)) / (s * s); };
    return (4 * d(h / 2) - d(h)) / 3;
}

} // namespace testing_support
