#pragma once

#include <adcons/config.hpp>
#include <adcons/expr.hpp>
#include <adcons/specfun.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace adcons {

// Coefficient tables and high-order R_(n) cancel heavily in double.
using HighPrec = boost::multiprecision::cpp_bin_float_100;

enum class RadialKind { constant, general, custom };
enum class Regime { resolved, unresolved };

inline const char* to_string(RadialKind k)
{
    switch (k) {
    case RadialKind::constant: return "constant";
    case RadialKind::general: return "general";
    case RadialKind::custom: return "custom";
    }
    return "?";
}

inline const char* to_string(Regime r)
{
    return r == Regime::resolved ? "resolved" : "unresolved";
}

// R(x) with x = r^2.
struct RadialModel {
    RadialKind kind = RadialKind::constant;
    double beta = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double s = 1.0;
    double ra = 1.0;
    Expr f;
    bool atom_at_zero = false;
    Regime regime = Regime::resolved;

    static RadialModel constant_beta(double b)
    {
        if (!std::isfinite(b) || b > 1.0)
            throw DomainError("constant-beta model needs beta <= 1");
        RadialModel m;
        m.kind = RadialKind::constant;
        m.beta = b;
        m.atom_at_zero = b == 1.0;
        return m;
    }

    static RadialModel general(double b1, double b2, double s, double ra = 1.0)
    {
        if (!std::isfinite(b1) || !std::isfinite(b2) || b1 > 1.0 || b2 > 1.0)
            throw DomainError("general model needs beta1, beta2 <= 1");
        if (!(s > 0.0) || !std::isfinite(s))
            throw DomainError("general model needs s > 0");
        if (!(ra > 0.0) || !std::isfinite(ra))
            throw DomainError("general model needs ra > 0");
        RadialModel m;
        m.kind = RadialKind::general;
        m.beta1 = b1;
        m.beta2 = b2;
        m.s = s;
        m.ra = ra;
        m.atom_at_zero = b1 == 1.0;
        m.regime = s > 1.0 ? Regime::unresolved : Regime::resolved;
        return m;
    }

    static RadialModel custom(Expr e)
    {
        RadialModel m;
        m.kind = RadialKind::custom;
        m.f = std::move(e);
        m.regime = Regime::unresolved;
        return m;
    }

    double zeta() const { return kind == RadialKind::general ? (beta2 - beta1) / s : 0.0; }
};

// ---------------------------------------------------------------------------
// Coefficients of alpha_n(u) = R_(n)/R = sum_k a~_{n,k} u^k, u = y/(1+y), y = x^s,
// and of tau_n(y) = (1+y)^n alpha_n = sum_k t~_{n,k} y^k.

struct CoeffTable {
    int n = 0;
    std::vector<double> a_tilde;
    std::vector<double> t_tilde;
    std::vector<HighPrec> a_hp;
    std::vector<HighPrec> t_hp;
};

namespace detail {

inline HighPrec hp_poch(const HighPrec& a, int n)
{
    HighPrec p = 1;
    for (int j = 0; j < n; ++j)
        p *= a + j;
    return p;
}

inline std::vector<HighPrec> hp_factorials(int n)
{
    std::vector<HighPrec> f(n + 1);
    f[0] = 1;
    for (int i = 1; i <= n; ++i)
        f[i] = f[i - 1] * i;
    return f;
}

inline std::vector<HighPrec> a_tilde_exact(double beta1, double beta2, double s, int n)
{
    HighPrec b1 = beta1, b2 = beta2, hs = s;
    HighPrec zeta = (b2 - b1) / hs;
    std::vector<HighPrec> a(n + 1);
    if (s == 1.0 && beta1 < 1.0) {
        // a~_{n,m} = (-1)^m C(n,m) (1-b1)_n (b2-b1)_m / (1-b1)_m
        HighPrec base = hp_poch(1 - b1, n);
        HighPrec c = 1;
        for (int m = 0; m <= n; ++m) {
            a[m] = (m % 2 ? -1 : 1) * c * base * hp_poch(b2 - b1, m) / hp_poch(1 - b1, m);
            c = c * (n - m) / (m + 1);
        }
        return a;
    }
    std::vector<HighPrec> fact = hp_factorials(n);
    std::vector<HighPrec> pk(n + 1);
    for (int k = 0; k <= n; ++k)
        pk[k] = hp_poch(1 - b1 + hs * k, n);
    HighPrec zpoch = 1;
    for (int m = 0; m <= n; ++m) {
        HighPrec sum = 0;
        for (int k = 0; k <= m; ++k) {
            HighPrec t = pk[k] / (fact[k] * fact[m - k]);
            sum += (k % 2) ? -t : t;
        }
        a[m] = zpoch * sum;
        zpoch *= zeta + m;
    }
    return a;
}

inline std::vector<HighPrec> t_from_a(const std::vector<HighPrec>& a)
{
    int n = static_cast<int>(a.size()) - 1;
    std::vector<HighPrec> fact = hp_factorials(n);
    std::vector<HighPrec> t(n + 1);
    for (int m = 0; m <= n; ++m) {
        HighPrec sum = 0;
        for (int k = 0; k <= m; ++k)
            sum += fact[n - k] / fact[m - k] * a[k];
        t[m] = sum / fact[n - m];
    }
    return t;
}

} // namespace detail

// One step alpha_n -> alpha_{n+1} of the recursion
// alpha_{n+1} = [n+1-b1+(b1-b2)u] alpha_n + s u(1-u) d alpha_n/du.
template <class T>
std::vector<T> alpha_recursion_step(const std::vector<T>& a, int n, double beta1, double beta2,
                                    double s)
{
    std::vector<T> r(a.size() + 1, T(0));
    for (std::size_t k = 0; k < r.size(); ++k) {
        T cur = k < a.size() ? a[k] : T(0);
        T prev = k > 0 ? a[k - 1] : T(0);
        r[k] = (T(n + 1) - T(beta1) + T(s) * T(double(k))) * cur +
               (T(beta1) - T(beta2) - T(s) * T(double(k) - 1.0)) * prev;
    }
    return r;
}

// t_k = sum_m (-1)^m C(k,m) a_m; its own inverse.
template <class T>
std::vector<T> binomial_transform(const std::vector<T>& a)
{
    std::vector<T> t(a.size(), T(0));
    for (std::size_t k = 0; k < a.size(); ++k) {
        T c(1);
        for (std::size_t m = 0; m <= k; ++m) {
            t[k] += ((m % 2) ? -c : c) * a[m];
            c = c * T(double(k - m)) / T(double(m + 1));
        }
    }
    return t;
}

inline std::shared_ptr<const CoeffTable> coeff_table_ptr(double beta1, double beta2, double s, int n,
                                                         const Config& cfg = default_config())
{
    if (n < 0)
        throw DomainError("coeff_table: negative order");
    if (!(s > 0.0))
        throw DomainError("coeff_table: s must be positive");
    if (n > cfg.coeff_order_cap)
        throw DifferentiationDepthExceeded("coeff_table: order above cap " +
                                           std::to_string(cfg.coeff_order_cap));
    static std::mutex mtx;
    static std::map<std::tuple<double, double, double, int>, std::shared_ptr<const CoeffTable>> cache;
    auto key = std::make_tuple(beta1, beta2, s, n);
    {
        std::lock_guard<std::mutex> lk(mtx);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    auto t = std::make_shared<CoeffTable>();
    t->n = n;
    t->a_hp = detail::a_tilde_exact(beta1, beta2, s, n);
    t->t_hp = detail::t_from_a(t->a_hp);
    for (const auto& v : t->a_hp)
        t->a_tilde.push_back(static_cast<double>(v));
    for (const auto& v : t->t_hp)
        t->t_tilde.push_back(static_cast<double>(v));
    std::lock_guard<std::mutex> lk(mtx);
    if (cache.size() > 1024)
        cache.clear();
    cache.emplace(key, t);
    return t;
}

inline CoeffTable coeff_table(double beta1, double beta2, double s, int n,
                              const Config& cfg = default_config())
{
    return *coeff_table_ptr(beta1, beta2, s, n, cfg);
}

// ---------------------------------------------------------------------------

namespace detail {

inline void check_positive(double x, const char* what)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError(std::string(what) + ": argument must be positive and finite");
}

// (1-b)_n / n!, without overflow.
inline double poch_over_factorial(double a, int n)
{
    double p = 1.0;
    for (int j = 1; j <= n; ++j)
        p *= (a - 1 + j) / j;
    return p;
}

// R_(n)(x)/n! for the general family, evaluated in high precision.
inline HighPrec general_Rn_hp(const RadialModel& m, int n, double x, bool over_factorial,
                              const Config& cfg)
{
    HighPrec X = HighPrec(x) / (HighPrec(m.ra) * HighPrec(m.ra));
    HighPrec y = boost::multiprecision::pow(X, HighPrec(m.s));
    HighPrec b1 = m.beta1;
    HighPrec zeta = (HighPrec(m.beta2) - b1) / HighPrec(m.s);
    HighPrec R = boost::multiprecision::pow(X, -b1) * boost::multiprecision::pow(1 + y, -zeta);
    HighPrec alpha;
    if (m.beta1 == m.beta2) {
        alpha = hp_poch(1 - b1, n);
    }
    else {
        auto tab = coeff_table_ptr(m.beta1, m.beta2, m.s, n, cfg);
        HighPrec u = y / (1 + y);
        alpha = 0;
        for (int k = n; k >= 0; --k)
            alpha = alpha * u + tab->a_hp[k];
    }
    HighPrec r = R * alpha;
    if (over_factorial)
        for (int j = 2; j <= n; ++j)
            r /= j;
    return r;
}

// sum_j C(n,j) c_j where c_j = f^{(j)}(x) x^j / j!; equals R_(n)(x)/n!.
inline double custom_Rn_over_factorial(const Expr& f, int n, double x)
{
    Jet<double> j = taylor<double>(f, x, x, n);
    double s = 0.0, c = 1.0;
    for (int k = 0; k <= n; ++k) {
        s += c * j.v[k];
        c = c * (n - k) / (k + 1);
    }
    return s;
}

} // namespace detail

inline double radial_R(const RadialModel& m, double x)
{
    detail::check_positive(x, "radial_R");
    switch (m.kind) {
    case RadialKind::constant: return std::pow(x, -m.beta);
    case RadialKind::general: {
        double X = x / (m.ra * m.ra);
        return std::pow(X, -m.beta1) * std::pow(1.0 + std::pow(X, m.s), -m.zeta());
    }
    case RadialKind::custom: return eval<double>(m.f, x);
    }
    return 0.0;
}

// beta(r) = -d log R / d log r^2
inline double beta_profile(const RadialModel& m, double r)
{
    detail::check_positive(r, "beta_profile");
    switch (m.kind) {
    case RadialKind::constant: return m.beta;
    case RadialKind::general: {
        double w = std::pow(r / m.ra, 2.0 * m.s);
        if (!std::isfinite(w))
            return m.beta2;
        return (m.beta1 + m.beta2 * w) / (1.0 + w);
    }
    case RadialKind::custom: {
        double x = r * r;
        Jet<double> j = taylor<double>(m.f, x, x, 1);
        return -j.v[1] / j.v[0];
    }
    }
    return 0.0;
}

// R_(n)(x) = d^n(x^n R)/dx^n
inline double R_n(const RadialModel& m, int n, double x, const Config& cfg = default_config())
{
    if (n < 0)
        throw DomainError("R_n: negative order");
    detail::check_positive(x, "R_n");
    switch (m.kind) {
    case RadialKind::constant: return pochhammer(1.0 - m.beta, n) * std::pow(x, -m.beta);
    case RadialKind::general: return static_cast<double>(detail::general_Rn_hp(m, n, x, false, cfg));
    case RadialKind::custom: {
        if (n > cfg.pw_order_cap)
            throw DifferentiationDepthExceeded("R_n: order above cap");
        double s = detail::custom_Rn_over_factorial(m.f, n, x);
        for (int j = 2; j <= n; ++j)
            s *= j;
        return s;
    }
    }
    return 0.0;
}

// R_(n)(x) / n!
inline double R_n_over_factorial(const RadialModel& m, int n, double x,
                                 const Config& cfg = default_config())
{
    if (n < 0)
        throw DomainError("R_n: negative order");
    detail::check_positive(x, "R_n");
    switch (m.kind) {
    case RadialKind::constant: return detail::poch_over_factorial(1.0 - m.beta, n) * std::pow(x, -m.beta);
    case RadialKind::general: return static_cast<double>(detail::general_Rn_hp(m, n, x, true, cfg));
    case RadialKind::custom:
        if (n > cfg.pw_order_cap)
            throw DifferentiationDepthExceeded("R_n: order above cap");
        return detail::custom_Rn_over_factorial(m.f, n, x);
    }
    return 0.0;
}

struct RnValue {
    double value = 0.0;
    double magnitude = 0.0;
};

// R_(n)(x) together with the size of the terms that produced it.
inline RnValue R_n_detailed(const RadialModel& m, int n, double x, const Config& cfg = default_config())
{
    if (n < 0)
        throw DomainError("R_n: negative order");
    detail::check_positive(x, "R_n");
    switch (m.kind) {
    case RadialKind::constant: {
        double v = R_n(m, n, x, cfg);
        return {v, std::fabs(v)};
    }
    case RadialKind::general: {
        if (m.beta1 == m.beta2) {
            double v = R_n(m, n, x, cfg);
            return {v, std::fabs(v)};
        }
        HighPrec X = HighPrec(x) / (HighPrec(m.ra) * HighPrec(m.ra));
        HighPrec y = boost::multiprecision::pow(X, HighPrec(m.s));
        HighPrec b1 = m.beta1;
        HighPrec zeta = (HighPrec(m.beta2) - b1) / HighPrec(m.s);
        HighPrec R = boost::multiprecision::pow(X, -b1) * boost::multiprecision::pow(1 + y, -zeta);
        auto tab = coeff_table_ptr(m.beta1, m.beta2, m.s, n, cfg);
        HighPrec u = y / (1 + y);
        HighPrec val = 0, mag = 0;
        for (int k = n; k >= 0; --k) {
            val = val * u + tab->a_hp[k];
            mag = mag * u + boost::multiprecision::abs(tab->a_hp[k]);
        }
        return {static_cast<double>(R * val), static_cast<double>(R * mag)};
    }
    case RadialKind::custom: {
        if (n > cfg.pw_order_cap)
            throw DifferentiationDepthExceeded("R_n: order above cap");
        Jet<double> j = taylor<double>(m.f, x, x, n);
        double v = 0.0, mg = 0.0, c = 1.0;
        for (int k = 0; k <= n; ++k) {
            v += c * j.v[k];
            mg += c * j.m[k];
            c = c * (n - k) / (k + 1);
        }
        for (int k = 2; k <= n; ++k) {
            v *= k;
            mg *= k;
        }
        return {v, mg};
    }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Expression forms, all in the variable x = r^2 (or w for the Laplace side).

inline Expr R_expr(const RadialModel& m)
{
    switch (m.kind) {
    case RadialKind::constant: return pow(var(), -m.beta);
    case RadialKind::general: {
        Expr X = var() * (1.0 / (m.ra * m.ra));
        return pow(X, -m.beta1) * pow(1.0 + pow(X, m.s), -m.zeta());
    }
    case RadialKind::custom: return m.f;
    }
    return constant(0.0);
}

// w^{-1} R(1/w)
inline Expr R_laplace_expr(const RadialModel& m)
{
    switch (m.kind) {
    case RadialKind::constant: return pow(var(), m.beta - 1.0);
    case RadialKind::general: {
        double c = std::pow(m.ra, 2.0 * m.beta1);
        double d = std::pow(m.ra, -2.0 * m.s);
        return c * pow(var(), m.beta1 - 1.0) * pow(1.0 + d * pow(var(), -m.s), -m.zeta());
    }
    case RadialKind::custom: return pow(var(), -1.0) * substitute(m.f, pow(var(), -1.0));
    }
    return constant(0.0);
}

inline Expr R_n_expr(const RadialModel& m, int n, const Config& cfg = default_config())
{
    if (n < 0)
        throw DomainError("R_n_expr: negative order");
    switch (m.kind) {
    case RadialKind::constant: return pochhammer(1.0 - m.beta, n) * pow(var(), -m.beta);
    case RadialKind::general: {
        Expr X = var() * (1.0 / (m.ra * m.ra));
        double z = m.zeta();
        if (z == 0.0)
            return pochhammer(1.0 - m.beta1, n) * pow(X, -m.beta1);
        auto tab = coeff_table_ptr(m.beta1, m.beta2, m.s, n, cfg);
        std::vector<Expr> terms;
        for (int k = 0; k <= n; ++k) {
            if (tab->a_tilde[k] == 0.0)
                continue;
            terms.push_back(tab->a_tilde[k] * pow(X, m.s * k - m.beta1) *
                            pow(1.0 + pow(X, m.s), -(z + k)));
        }
        return sum(terms);
    }
    case RadialKind::custom:
        if (n > cfg.cm_order_cap)
            throw DifferentiationDepthExceeded("R_n_expr: order above cap");
        return deriv(pow(var(), double(n)) * m.f, n);
    }
    return constant(0.0);
}

// ---------------------------------------------------------------------------

struct PhiValue {
    double regular = 0.0;
    double atom_weight = 0.0;
};

// phi(t): inverse Laplace transform of w^{-1} R(1/w); an atom at t = 0 when beta1 = 1.
inline PhiValue phi_closed_form(const RadialModel& m, double t, const Config& cfg = default_config())
{
    detail::check_positive(t, "phi_closed_form");
    PhiValue r;
    switch (m.kind) {
    case RadialKind::constant:
        r.regular = std::pow(t, -m.beta) * gamma_recip(1.0 - m.beta);
        r.atom_weight = m.beta == 1.0 ? 1.0 : 0.0;
        return r;
    case RadialKind::general: {
        double T = t / (m.ra * m.ra);
        MLSpec sp{m.zeta(), m.s, 1.0 - m.beta1};
        r.regular = std::pow(T, -m.beta1) * ml_eval(sp, -std::pow(T, m.s), cfg);
        r.atom_weight = m.beta1 == 1.0 ? m.ra * m.ra : 0.0;
        return r;
    }
    case RadialKind::custom: break;
    }
    throw DomainError("phi_closed_form: no closed form for custom radial parts");
}

// n-th approximant (1/n!) R_(n)(t/n) of phi(t).
inline double phi_from_R(const RadialModel& m, double t, int n, const Config& cfg = default_config())
{
    detail::check_positive(t, "phi_from_R");
    if (n < 1)
        throw DomainError("phi_from_R: order must be positive");
    return R_n_over_factorial(m, n, t / n, cfg);
}

} // namespace adcons
