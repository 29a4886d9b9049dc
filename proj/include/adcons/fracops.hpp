#pragma once

#include <adcons/config.hpp>
#include <adcons/expr.hpp>
#include <adcons/quadrature.hpp>
#include <adcons/specfun.hpp>

#include <cmath>
#include <string>

namespace adcons {

struct FracOrder {
    double lambda = 0.0;
    double a = 0.0;
    int floor = 0;
    int ceil = 0;
    double frac = 0.0;

    FracOrder(double lam, double terminal) : lambda(lam), a(terminal)
    {
        if (!std::isfinite(lam) || !std::isfinite(terminal))
            throw DomainError("FracOrder: order and terminal must be finite");
        floor = static_cast<int>(std::floor(lam));
        ceil = static_cast<int>(std::ceil(lam));
        frac = lam - floor;
    }
    bool integer() const { return frac == 0.0; }
};

enum class FracMethod { automatic, quadrature };

namespace detail {

inline void check_interval(double a, double x)
{
    if (!std::isfinite(a))
        throw DomainError("lower terminal must be finite");
    if (!(x > a))
        throw DomainError("evaluation point must exceed the lower terminal");
}

struct PowerRuleOut {
    double value = 0.0;
    double magnitude = 0.0;
};

// I^lam applied termwise to c (x-a)^e; lam < 0 means D^{-lam}.
inline PowerRuleOut power_rule_terms(const PowerSum& s, double a, double lam, double x)
{
    double h = x - a;
    PowerRuleOut out;
    for (const auto& t : s) {
        double al = t.e + 1.0;
        double v;
        if (lam < 0.0 && -lam == std::floor(-lam)) {
            int n = static_cast<int>(-lam);
            v = pochhammer(t.e, n, Direction::falling) * std::pow(h, t.e - n);
        }
        else {
            if (!(al > 0.0))
                throw BoundarySingularity("power (x-a)^" + format_number(t.e) +
                                          " is not integrable at the terminal");
            double g = std::lgamma(al);
            Scaled r = gamma_recip_scaled(al + lam);
            r *= std::exp(g);
            v = r.value() * std::pow(h, t.e + lam);
        }
        out.value += t.c * v;
        out.magnitude += std::fabs(t.c * v);
    }
    return out;
}

inline double power_rule(const PowerSum& s, double a, double lam, double x)
{
    return power_rule_terms(s, a, lam, x).value;
}

inline double nth_derivative(const Expr& f, double y, int n)
{
    if (n == 0)
        return eval<double>(f, y);
    return derivatives(f, y, n)[n];
}

} // namespace detail

// I^lam F(x) for a plain callable (always by quadrature).
template <class F>
double rl_integral_fn(F&& f, double a, double lam, double x, const Config& cfg = default_config())
{
    if (lam < 0.0)
        throw DomainError("rl_integral: negative order");
    if (lam == 0.0)
        return f(x);
    detail::check_interval(a, x);
    return gamma_recip(lam) * abel_integral(f, a, x, lam, cfg);
}

inline double rl_integral(const Expr& f, double a, double lam, double x,
                          const Config& cfg = default_config(),
                          FracMethod method = FracMethod::automatic)
{
    FracOrder ord(lam, a);
    if (lam < 0.0)
        throw DomainError("rl_integral: negative order");
    if (lam == 0.0)
        return eval<double>(f, x);
    detail::check_interval(a, x);
    if (method == FracMethod::automatic) {
        if (auto ps = power_sum(f, a))
            return detail::power_rule(*ps, a, lam, x);
    }
    return rl_integral_fn([&](double y) { return eval<double>(f, y); }, a, lam, x, cfg);
}

inline double frac_derivative(const Expr& f, double a, double lam, double x,
                              const Config& cfg = default_config(),
                              FracMethod method = FracMethod::automatic)
{
    FracOrder ord(lam, a);
    if (lam < 0.0)
        throw DomainError("frac_derivative: negative order");
    detail::check_interval(a, x);
    if (ord.integer())
        return detail::nth_derivative(f, x, ord.floor);
    if (method == FracMethod::automatic) {
        if (auto ps = power_sum(f, a))
            return detail::power_rule(*ps, a, -lam, x);
    }

    int n = ord.ceil;
    double nu = n - lam;
    // the boundary-series route needs f^{(n)} integrable without a strong
    // singularity at a; otherwise use the scaled integral below
    std::vector<double> bnd = derivatives(f, a, n);
    bool finite = true;
    for (double v : bnd)
        finite = finite && std::isfinite(v);
    if (finite) {
        // D^lam f = I^{n-lam} f^{(n)} + sum_k (x-a)^{k-lam} f^{(k)}(a) / Gamma(1+k-lam)
        double body = gamma_recip(nu) *
                      abel_integral([&](double y) { return detail::nth_derivative(f, y, n); }, a, x,
                                    nu, cfg);
        double tail = 0.0;
        for (int k = 0; k < n; ++k)
            tail += bnd[k] * std::pow(x - a, k - lam) * gamma_recip(1.0 + k - lam);
        return body + tail;
    }

    // Terminal jets blow up; differentiate under the scaled integral instead:
    // D^{m+d} f(x) = 1/Gamma(1-d) int_0^1 (1-t)^{-d} t^{m+d} G^{(m+1)}((x-a)t) dt,
    // G(y) = y^{1-d} f(a+y).
    int m = ord.floor;
    double d = ord.frac;
    Expr G = pow(var(), 1.0 - d) * substitute(f, var() + a);
    double X = x - a;
    auto phi = [&](double t) {
        if (t <= 0.0)
            return 0.0;
        double v = std::pow(t, m + d) * detail::nth_derivative(G, X * t, m + 1);
        // high powers underflow inside the jets near t = 0, where the
        // integrand is negligibly small anyway
        if (!std::isfinite(v) && (t < 1e-20 || X * t < 1e-100))
            return 0.0;
        return v;
    };
    double v = gamma_recip(1.0 - d) * abel_integral(phi, 0.0, 1.0, 1.0 - d, cfg);
    if (!std::isfinite(v))
        throw BoundarySingularity("fractional derivative diverges at the terminal");
    return v;
}

// Unified operator: I^lam for lam >= 0, D^{-lam} for lam < 0.
inline double rl_signed(const Expr& f, double a, double lam, double x,
                        const Config& cfg = default_config(),
                        FracMethod method = FracMethod::automatic)
{
    if (lam >= 0.0)
        return rl_integral(f, a, lam, x, cfg, method);
    return frac_derivative(f, a, -lam, x, cfg, method);
}

struct FracValue {
    double value = 0.0;
    // size of the largest cancelling contributions; sign checks scale against it
    double magnitude = 0.0;
};

inline FracValue rl_signed_detailed(const Expr& f, double a, double lam, double x,
                                    const Config& cfg = default_config())
{
    detail::check_interval(a, x);
    if (auto ps = power_sum(f, a)) {
        if (lam == 0.0) {
            FracValue r;
            for (const auto& t : *ps) {
                double v = t.c * std::pow(x - a, t.e);
                r.value += v;
                r.magnitude += std::fabs(v);
            }
            return r;
        }
        auto r = detail::power_rule_terms(*ps, a, lam, x);
        return {r.value, r.magnitude};
    }
    double v = rl_signed(f, a, lam, x, cfg);
    return {v, std::fabs(v)};
}

} // namespace adcons
