#pragma once

#include <adcons/config.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace adcons {

inline bool is_nonpositive_integer(double x)
{
    return x <= 0.0 && x == std::floor(x);
}

// sin(pi x) with exact zeros at the integers.
inline double sin_pi(double x)
{
    double r = x - 2.0 * std::round(0.5 * x);
    if (r == 0.0 || std::fabs(r) == 1.0)
        return 0.0;
    if (r > 0.5)
        r = 1.0 - r;
    else if (r < -0.5)
        r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

// Mantissa/exponent pair so that long products neither overflow nor lose bits.
struct Scaled {
    double m = 1.0;
    long e = 0;

    void norm()
    {
        if (m == 0.0 || !std::isfinite(m)) {
            e = 0;
            return;
        }
        int k = 0;
        m = std::frexp(m, &k);
        e += k;
    }
    Scaled& operator*=(double v)
    {
        m *= v;
        norm();
        return *this;
    }
    Scaled& operator*=(const Scaled& o)
    {
        m *= o.m;
        e += o.e;
        norm();
        return *this;
    }
    double value() const
    {
        if (m == 0.0)
            return 0.0;
        if (e > 4000)
            return std::copysign(std::numeric_limits<double>::infinity(), m);
        if (e < -4000)
            return std::copysign(0.0, m);
        return std::ldexp(m, static_cast<int>(e));
    }
};

inline Scaled scaled_exp(double logv, double sign)
{
    double k = std::floor(logv / std::numbers::ln2);
    Scaled s;
    s.m = sign * std::exp(logv - k * std::numbers::ln2);
    s.e = static_cast<long>(k);
    s.norm();
    return s;
}

// 1/Gamma(x) in scaled form; zero at the poles.
inline Scaled gamma_recip_scaled(double x)
{
    Scaled r;
    if (is_nonpositive_integer(x)) {
        r.m = 0.0;
        return r;
    }
    if (x > 0.0 && x < 170.0) {
        r.m = 1.0 / std::tgamma(x);
        r.norm();
        return r;
    }
    if (x >= 170.0)
        return scaled_exp(-std::lgamma(x), 1.0);
    if (x > -169.0) {
        r.m = 1.0 / std::tgamma(x);
        r.norm();
        return r;
    }
    // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
    double sp = sin_pi(x);
    Scaled g = scaled_exp(std::lgamma(1.0 - x) - std::log(std::numbers::pi), 1.0);
    g *= sp;
    return g;
}

inline double gamma_recip(double x)
{
    return gamma_recip_scaled(x).value();
}

enum class Direction { rising, falling };

inline double pochhammer(double a, int n, Direction dir = Direction::rising)
{
    if (n < 0)
        throw DomainError("pochhammer: negative length");
    double p = 1.0;
    for (int j = 1; j <= n; ++j)
        p *= dir == Direction::rising ? a - 1 + j : a + 1 - j;
    return p;
}

inline double binomial_real(double xi, int k)
{
    double c = 1.0;
    for (int j = 0; j < k; ++j)
        c *= (xi - j) / (j + 1);
    return c;
}

struct MLSpec {
    double lambda = 1.0;
    double p = 1.0;
    double b = 1.0;

    void validate() const
    {
        if (!(p > 0.0) || !std::isfinite(p))
            throw DomainError("MLSpec: p must be positive");
        if (!std::isfinite(lambda) || !std::isfinite(b))
            throw DomainError("MLSpec: non-finite parameter");
    }
};

enum class MLMethod { constant, polynomial, series, contour, asymptotic };

inline const char* to_string(MLMethod m)
{
    switch (m) {
    case MLMethod::constant: return "constant";
    case MLMethod::polynomial: return "polynomial";
    case MLMethod::series: return "series";
    case MLMethod::contour: return "contour";
    case MLMethod::asymptotic: return "asymptotic";
    }
    return "?";
}

struct MLResult {
    double value = 0.0;
    double abs_err = 0.0;
    MLMethod method = MLMethod::series;
};

namespace detail {

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double v)
    {
        double y = v - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

inline MLResult ml_polynomial(const MLSpec& sp, double z)
{
    // lambda = -m, m a non-negative integer
    int m = static_cast<int>(-sp.lambda);
    KahanSum sum;
    double mag = 0.0;
    double c = 1.0; // (lambda)_k z^k / k!
    for (int k = 0; k <= m; ++k) {
        double t = c * gamma_recip(sp.p * k + sp.b);
        sum.add(t);
        mag += std::fabs(t);
        c *= (sp.lambda + k) * z / (k + 1);
    }
    return {sum.s, 4 * std::numeric_limits<double>::epsilon() * mag, MLMethod::polynomial};
}

struct SeriesOut {
    double value;
    double abs_sum;
    bool converged;
};

inline SeriesOut ml_series(const MLSpec& sp, double z, const Config& cfg)
{
    KahanSum sum;
    double abs_sum = 0.0;
    Scaled c; // (lambda)_k z^k / k!
    int small = 0;
    for (int k = 0; k < cfg.ml_max_terms; ++k) {
        Scaled t = c;
        t *= gamma_recip_scaled(sp.p * k + sp.b);
        double tv = t.value();
        if (!std::isfinite(tv))
            return {tv, std::fabs(tv), false};
        sum.add(tv);
        abs_sum += std::fabs(tv);
        if (std::fabs(tv) < cfg.eps_ml * std::fabs(sum.s) && k > 0) {
            if (++small >= 3)
                return {sum.s, abs_sum, true};
        }
        else {
            small = 0;
        }
        c *= (sp.lambda + k) * z / (k + 1);
        if (c.m == 0.0)
            return {sum.s, abs_sum, true};
    }
    return {sum.s, abs_sum, false};
}

// Laplace inversion at t=1 of s^{p lambda - b} (s^p + x)^{-lambda} along an
// optimized cotangent contour; valid when all singularities lie on (-inf, 0].
inline MLResult ml_contour_n(const MLSpec& sp, double x, int n)
{
    using R = long double;
    using C = std::complex<R>;
    const R c1 = 0.5017L, c2 = 0.6407L, c3 = 0.6122L, c4 = 0.2645L;
    const R pi = std::numbers::pi_v<R>;
    R acc = 0.0L, mag = 0.0L;
    for (int k = 0; k < n / 2; ++k) {
        R th = pi * (2.0L * k + 1.0L) / n;
        R ct = 1.0L / std::tan(c2 * th);
        R st = std::sin(c2 * th);
        C s = R(n) * C(c1 * th * ct - c3, c4 * th);
        C ds = R(n) * C(c1 * (ct - c2 * th / (st * st)), c4);
        C f = std::pow(s, R(sp.p) * R(sp.lambda) - R(sp.b)) *
              std::pow(std::pow(s, R(sp.p)) + R(x), -R(sp.lambda));
        C w = std::exp(s) * f * ds;
        acc += w.imag();
        mag += std::abs(w);
    }
    return {static_cast<double>(2.0L * acc / n),
            static_cast<double>(2.0L * mag / n * std::numeric_limits<R>::epsilon()),
            MLMethod::contour};
}

inline MLResult ml_contour(const MLSpec& sp, double x)
{
    MLResult lo = ml_contour_n(sp, x, 24);
    MLResult hi = ml_contour_n(sp, x, 32);
    hi.abs_err = std::fabs(hi.value - lo.value) + 8.0 * hi.abs_err;
    return hi;
}

inline MLResult ml_asymptotic(const MLSpec& sp, double x, const Config& cfg)
{
    // E(-x) ~ sum_k (-1)^k (lambda)_k / (k! Gamma(b - p lambda - p k)) x^{-lambda-k}
    KahanSum sum;
    double c = std::pow(x, -sp.lambda); // (-1)^k (lambda)_k x^{-lambda-k} / k!
    double prev = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (int k = 0; k < cfg.ml_max_terms; ++k) {
        double t = c * gamma_recip(sp.b - sp.p * sp.lambda - sp.p * k);
        double at = std::fabs(t);
        if (at != 0.0) {
            if (at > prev)
                break;
            sum.add(t);
            last = at;
            prev = at;
            if (k > 2 && at <= cfg.eps_ml * std::fabs(sum.s))
                break;
        }
        c *= -(sp.lambda + k) / ((k + 1) * x);
        if (c == 0.0)
            break;
    }
    return {sum.s, last + 4 * std::numeric_limits<double>::epsilon() * std::fabs(sum.s),
            MLMethod::asymptotic};
}

} // namespace detail

inline MLResult ml_eval_detailed(const MLSpec& sp, double z, const Config& cfg = default_config())
{
    sp.validate();
    if (!std::isfinite(z))
        throw DomainError("ml_eval: non-finite argument");
    if (z == 0.0 || sp.lambda == 0.0)
        return {gamma_recip(sp.b), 0.0, MLMethod::constant};
    if (is_nonpositive_integer(sp.lambda))
        return detail::ml_polynomial(sp, z);

    auto ser = detail::ml_series(sp, z, cfg);
    const double eps = std::numeric_limits<double>::epsilon();
    double ser_err = 8 * eps * ser.abs_sum;
    bool ser_ok = ser.converged && std::isfinite(ser.value) &&
                  ser_err <= cfg.eps_ml * std::fabs(ser.value);
    if (ser_ok || z > 0.0)
        return {ser.value, ser_err, MLMethod::series};

    double x = -z;
    MLResult best{ser.value, ser.converged ? ser_err : std::numeric_limits<double>::infinity(),
                  MLMethod::series};
    if (sp.p == 1.0 && x < 700.0) {
        // Kummer: E^lambda_{1,b}(-x) = e^{-x} E^{b-lambda}_{1,b}(x)
        MLSpec k{sp.b - sp.lambda, 1.0, sp.b};
        double v;
        double err;
        if (k.lambda == 0.0 || is_nonpositive_integer(k.lambda)) {
            MLResult r = k.lambda == 0.0 ? MLResult{gamma_recip(k.b), 0.0, MLMethod::constant}
                                         : detail::ml_polynomial(k, x);
            v = r.value;
            err = r.abs_err;
        }
        else {
            auto ks = detail::ml_series(k, x, cfg);
            v = ks.converged ? ks.value : std::numeric_limits<double>::quiet_NaN();
            err = 8 * eps * ks.abs_sum;
        }
        double ex = std::exp(-x);
        if (std::isfinite(v) && ex * err < best.abs_err)
            best = {ex * v, ex * err, MLMethod::series};
    }
    if (sp.p <= 1.0) {
        MLResult r = detail::ml_contour(sp, x);
        if (r.abs_err < best.abs_err)
            best = r;
    }
    // for p >= 2 the poles of the transform leave the left half-plane and
    // the algebraic expansion misses oscillating terms that do not decay
    if (sp.lambda > 0.0 && sp.p < 2.0 && x > cfg.z_switch) {
        MLResult r = detail::ml_asymptotic(sp, x, cfg);
        if (r.abs_err < best.abs_err)
            best = r;
    }
    if (!(best.abs_err <= std::sqrt(cfg.eps_ml) * std::max(1.0, std::fabs(best.value))) ||
        !std::isfinite(best.value))
        throw NonConvergence("ml_eval: no branch reached tolerance");
    return best;
}

inline double ml_eval(const MLSpec& sp, double z, const Config& cfg = default_config())
{
    return ml_eval_detailed(sp, z, cfg).value;
}

// n-th derivative of z -> E^lambda_{p,b}(-z).
inline double ml_derivative(const MLSpec& sp, double z, int n, const Config& cfg = default_config())
{
    if (n < 0)
        throw DomainError("ml_derivative: negative order");
    double c = pochhammer(sp.lambda, n);
    if (c == 0.0)
        return 0.0;
    MLSpec sh{sp.lambda + n, sp.p, sp.b + sp.p * n};
    return (n % 2 ? -c : c) * ml_eval(sh, -z, cfg);
}

// E^{-xi}_{p,b}(z) split into its terminating part and a tail series.
inline double ml_neg_order_split(const MLSpec& sp, double z, const Config& cfg = default_config())
{
    sp.validate();
    double xi = -sp.lambda;
    if (xi < 0.0)
        throw DomainError("ml_neg_order_split: lambda must be <= 0");
    int mu = static_cast<int>(std::floor(xi));
    double delta = xi - mu;
    detail::KahanSum poly;
    for (int k = 0; k <= mu; ++k)
        poly.add(binomial_real(xi, k) * std::pow(-z, k) * gamma_recip(sp.p * k + sp.b));
    if (delta == 0.0)
        return poly.s;

    double bh = sp.p * (mu + 1) + sp.b;
    detail::KahanSum tail;
    double c = 1.0; // (1-delta)_j z^j / (j+mu+1)!
    for (int j = 1; j <= mu + 1; ++j)
        c /= j;
    int small = 0;
    bool done = false;
    for (int j = 0; j < cfg.ml_max_terms; ++j) {
        double t = c * gamma_recip(sp.p * j + bh);
        tail.add(t);
        if (j > 0 && std::fabs(t) < cfg.eps_ml * std::fabs(tail.s)) {
            if (++small >= 3) {
                done = true;
                break;
            }
        }
        else {
            small = 0;
        }
        c *= (1.0 - delta + j) * z / (j + mu + 2);
        if (c == 0.0) {
            done = true;
            break;
        }
    }
    if (!done)
        throw NonConvergence("ml_neg_order_split: tail did not converge");
    return poly.s + pochhammer(delta, mu + 1) * std::pow(-z, mu + 1) * tail.s;
}

} // namespace adcons
