#pragma once

#include <adcons/admodels.hpp>
#include <adcons/cmcheck.hpp>
#include <adcons/config.hpp>
#include <adcons/consistency.hpp>
#include <adcons/expr.hpp>
#include <adcons/fracops.hpp>
#include <adcons/quadrature.hpp>
#include <adcons/specfun.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

namespace adcons {

namespace detail {

inline double eddington_constant(double beta)
{
    return std::pow(2.0, 1.5 - beta) * std::pow(std::numbers::pi, 1.5) * std::tgamma(1.0 - beta);
}

} // namespace detail

// g(E) for F = g(E) L^{-2 beta}:  g = D^{3/2-beta} P / (2^{3/2-beta} pi^{3/2} Gamma(1-beta)).
inline double eddington_invert(const Expr& P, double beta, double E, double E0 = 0.0,
                               const Config& cfg = default_config(),
                               FracMethod method = FracMethod::automatic)
{
    if (!(beta < 1.0))
        throw DomainError("eddington_invert: beta must be below 1");
    return frac_derivative(P, E0, 1.5 - beta, E, cfg, method) / detail::eddington_constant(beta);
}

// f(E) = D^{1/2} P(E) for the radial-orbit model R = 1/x.
inline double radial_orbit_invert(const Expr& P, double E, double E0 = 0.0,
                                  const Config& cfg = default_config())
{
    return frac_derivative(P, E0, 0.5, E, cfg);
}

struct EddingtonCheck {
    double min_g = 0.0;
    double argmin = 0.0;
    // false when the inverted g is not integrable at E0, so it cannot reproduce P
    bool integrable = true;
    bool nonnegative = true;
};

inline EddingtonCheck eddington_df_check(const Expr& P, double beta, double Psi_max, int count = 200,
                                         double tol = 1e-8, const Config& cfg = default_config())
{
    if (count < 1)
        throw DomainError("eddington_df_check: empty grid");
    EddingtonCheck c;
    c.min_g = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= count; ++i) {
        double E = Psi_max * double(i) / count;
        double g = eddington_invert(P, beta, E, 0.0, cfg);
        if (g < c.min_g) {
            c.min_g = g;
            c.argmin = E;
        }
    }
    c.nonnegative = c.min_g >= -tol;
    if (auto ps = power_sum(P, 0.0)) {
        double lam = 1.5 - beta;
        for (const auto& t : *ps) {
            if (t.c == 0.0)
                continue;
            double e = t.e - lam;
            // the power rule coefficient 1/Gamma(e+1) kills integer e <= -1
            bool vanishes = e == std::floor(e);
            if (e <= -1.0 && !vanishes)
                c.integrable = false;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Test distribution functions.

// F = E^a L^{-2 beta}
struct PowerLawDF {
    double a = 0.0;
    double beta = 0.0;
};

// F = f(E) delta(L^2) / (sqrt(2) pi^{3/2})
struct RadialOrbitDF {
    Expr f;
};

using TestDF = std::variant<PowerLawDF, RadialOrbitDF>;

inline void validate(const PowerLawDF& d)
{
    if (!(d.a > -1.0))
        throw DomainError("PowerLawDF: need a > -1");
    if (!(d.beta < 1.0))
        throw DomainError("PowerLawDF: need beta < 1");
}

inline double df_value(const PowerLawDF& d, double E, double L2)
{
    if (E < 0.0)
        return 0.0;
    return std::pow(E, d.a) * std::pow(L2, -d.beta);
}

// Closed-form AD of a power-law df: N = C Psi^{a+3/2-beta} x^{-beta}.
inline SeparableAD powerlaw_ad(const PowerLawDF& d, double Psi_max = 1.0)
{
    validate(d);
    double C = detail::eddington_constant(d.beta) * std::tgamma(d.a + 1.0) /
               std::tgamma(d.a + 2.5 - d.beta);
    SeparableAD ad;
    ad.P = C * pow(var(), d.a + 1.5 - d.beta);
    ad.R = RadialModel::constant_beta(d.beta);
    ad.Psi_max = Psi_max;
    return ad;
}

inline double powerlaw_ad_value(const PowerLawDF& d, double Psi, double x)
{
    SeparableAD ad = powerlaw_ad(d);
    return eval<double>(ad.P, Psi) * std::pow(x, -d.beta);
}

// int int_T K^p F(E, L^2) dE dL^2 with K = 2(Psi-E) - L^2/x and E >= 0.
// L^2 = 2x(Psi-E)(1-v) maps the triangle onto a rectangle, K = 2(Psi-E)v.
inline double kernel_integral(const std::function<double(double, double)>& F, double Psi, double x,
                              double p, const Config& cfg = default_config())
{
    if (!(Psi > 0.0) || !(x > 0.0))
        throw DomainError("kernel_integral: need Psi > 0 and x > 0");
    if (!(p > -1.0))
        throw DomainError("kernel_integral: kernel exponent must exceed -1");
    double tol = std::max(cfg.quad_tol, 1e-12);
    auto inner = [&](double E) {
        double w = Psi - E;
        if (!(w > 0.0) || !(E > 0.0))
            return 0.0;
        auto g = [&](double v) {
            if (!(v > 0.0) || !(v < 1.0))
                return 0.0;
            return std::pow(2.0 * w * v, p) * F(E, 2.0 * x * w * (1.0 - v));
        };
        return 2.0 * x * w * integrate_finite(g, 0.0, 1.0, tol);
    };
    return integrate_finite(inner, 0.0, Psi, tol);
}

// N(Psi, x) straight from the df by quadrature.
inline double oracle_ad_from_df(const TestDF& df, double Psi, double x,
                                const Config& cfg = default_config())
{
    if (!(Psi > 0.0) || !(x > 0.0))
        throw DomainError("oracle_ad_from_df: need Psi > 0 and x > 0");
    if (auto* pl = std::get_if<PowerLawDF>(&df)) {
        validate(*pl);
        auto F = [&](double E, double L2) { return df_value(*pl, E, L2); };
        return 2.0 * std::numbers::pi / x * kernel_integral(F, Psi, x, -0.5, cfg);
    }
    const auto& ro = std::get<RadialOrbitDF>(df);
    // delta(L^2) leaves (2 pi / x) int f(E) (2(Psi-E))^{-1/2} dE / (sqrt(2) pi^{3/2});
    // E = Psi(1 - u^2) removes the endpoint singularity.
    auto g = [&](double u) { return eval<double>(ro.f, Psi * (1.0 - u * u)); };
    double I = 2.0 * std::sqrt(Psi) * integrate_finite(g, 0.0, 1.0, cfg.quad_tol);
    return I / (std::sqrt(std::numbers::pi) * x);
}

// ---------------------------------------------------------------------------
// Moments.

// F_mu(Psi, x): Psi factor  I^{mu-1/2} P (or D^{1/2-mu} P), x factor D^mu (x^mu R) (or I^{-mu}(x^mu R)).
inline double moment_F_mu(const SeparableAD& ad, double mu, double Psi, double x,
                          const Config& cfg = default_config())
{
    if (!std::isfinite(mu))
        throw DomainError("moment_F_mu: mu must be finite");
    if (!(x > 0.0))
        throw DomainError("moment_F_mu: x must be positive");
    double pf = rl_signed(ad.P, ad.E0, mu - 0.5, Psi, cfg);
    double xf;
    if (mu >= 0.0 && mu == std::floor(mu))
        xf = R_n(ad.R, static_cast<int>(mu), x, cfg);
    else
        xf = rl_signed(pow(var(), mu) * R_expr(ad.R), 0.0, -mu, x, cfg);
    return pf * xf;
}

// Direct quadrature of the moment along K = 0:
// F_mu = Psi^{mu+1} int_0^1 y^mu (2 pi)^{3/2} F(Psi - y Psi, 2 x y Psi) dy.
inline double moment_oracle(const std::function<double(double, double)>& F, double mu, double Psi,
                            double x, const Config& cfg = default_config())
{
    if (!(Psi > 0.0) || !(x > 0.0))
        throw DomainError("moment_oracle: need Psi > 0 and x > 0");
    auto g = [&](double y) {
        if (!(y > 0.0) || !(y < 1.0))
            return 0.0;
        return std::pow(y, mu) * F(Psi - y * Psi, 2.0 * x * y * Psi);
    };
    double c = std::pow(2.0 * std::numbers::pi, 1.5) * std::pow(Psi, mu + 1.0);
    return c * integrate_finite(g, 0.0, 1.0, std::max(cfg.quad_tol, 1e-12));
}

// m_{k,n} = 2^{k+n} (1/2)_k I^{k+n} P * D^n (x^n R)
inline double velocity_moment(const SeparableAD& ad, int k, int n, double Psi, double x,
                              const Config& cfg = default_config())
{
    if (k < 0 || n < 0)
        throw DomainError("velocity_moment: orders must be non-negative");
    double pf = rl_integral(ad.P, ad.E0, double(k + n), Psi, cfg);
    return std::ldexp(pochhammer(0.5, k), k + n) * pf * R_n(ad.R, n, x, cfg);
}

// 1 - m_{0,1} / (2 m_{1,0})
inline double beta_from_moments(const SeparableAD& ad, double Psi, double x,
                                const Config& cfg = default_config())
{
    return 1.0 - velocity_moment(ad, 0, 1, Psi, x, cfg) / (2.0 * velocity_moment(ad, 1, 0, Psi, x, cfg));
}

struct PostWidderDF {
    double value = 0.0;
    int order = 0;
};

// Best-effort df for constant beta by Post-Widder inversion of
// s^{3/2} Pcal(s) phi(s L^2 / 2) / (2 pi)^{3/2}; needs P as a power sum about 0.
inline PostWidderDF df_post_widder(const Expr& P, double beta, double E, double L2, int n = 64,
                                   const Config& cfg = default_config())
{
    if (!(beta < 1.0))
        throw DomainError("df_post_widder: beta must be below 1");
    if (!(E > 0.0) || !(L2 > 0.0))
        throw DomainError("df_post_widder: need E > 0 and L^2 > 0");
    auto ps = power_sum(P, 0.0);
    if (!ps)
        throw DomainError("df_post_widder: P must be a sum of powers of psi");
    std::vector<Expr> terms;
    for (const auto& t : *ps) {
        if (!(t.e > -1.0))
            throw BoundarySingularity("df_post_widder: P has no Laplace transform");
        terms.push_back(t.c * std::tgamma(t.e + 1.0) * pow(var(), 0.5 - beta - t.e));
    }
    double pre = std::pow(0.5 * L2, -beta) * gamma_recip(1.0 - beta) /
                 std::pow(2.0 * std::numbers::pi, 1.5);
    return {pre * post_widder(sum(terms), E, n, cfg), n};
}

} // namespace adcons
