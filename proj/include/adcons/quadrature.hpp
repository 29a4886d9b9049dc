#pragma once

#include <adcons/config.hpp>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace adcons {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Golub-Welsch rule for the weight (1-t)^alpha (1+t)^beta on [-1,1].
inline QuadRule make_gauss_jacobi(int n, double alpha, double beta)
{
    if (n < 1 || !(alpha > -1.0) || !(beta > -1.0))
        throw DomainError("gauss_jacobi: invalid parameters");
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(n > 1 ? n - 1 : 1);
    double ab = alpha + beta;
    diag(0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        double t = 2.0 * k + ab;
        diag(k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
        double b2;
        if (k == 1)
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
        off(k - 1) = std::sqrt(b2);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off.head(n - 1));
    double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                          std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v * v;
    }
    return r;
}

inline std::shared_ptr<const QuadRule> gauss_jacobi(int n, double alpha, double beta)
{
    static std::mutex mtx;
    static std::map<std::tuple<int, double, double>, std::shared_ptr<const QuadRule>> cache;
    auto key = std::make_tuple(n, alpha, beta);
    {
        std::lock_guard<std::mutex> lk(mtx);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    auto r = std::make_shared<const QuadRule>(make_gauss_jacobi(n, alpha, beta));
    std::lock_guard<std::mutex> lk(mtx);
    if (cache.size() > 4096)
        cache.clear();
    cache.emplace(key, r);
    return r;
}

// Integral over [a,b] of a function that may carry integrable endpoint singularities.
template <class F>
double integrate_finite(F&& f, double a, double b, double tol)
{
    if (a == b)
        return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts(15);
    double err = 0.0, l1 = 0.0;
    double v;
    try {
        v = ts.integrate(f, a, b, tol, &err, &l1);
    }
    catch (const std::exception& e) {
        throw QuadratureFailure(std::string("tanh-sinh: ") + e.what());
    }
    if (!std::isfinite(v))
        throw QuadratureFailure("tanh-sinh: non-finite result");
    if (err > std::max(1e3 * tol * std::max(std::fabs(v), l1), 1e-300) && err > 1e-6 * l1)
        throw QuadratureFailure("tanh-sinh: tolerance not reached");
    return v;
}

template <class F>
double integrate_half_line(F&& f, double a, double tol)
{
    boost::math::quadrature::exp_sinh<double> es(12);
    double err = 0.0, l1 = 0.0;
    double v;
    try {
        v = es.integrate([&](double t) { return f(a + t); }, 0.0,
                         std::numeric_limits<double>::infinity(), tol, &err, &l1);
    }
    catch (const std::exception& e) {
        throw QuadratureFailure(std::string("exp-sinh: ") + e.what());
    }
    if (!std::isfinite(v))
        throw QuadratureFailure("exp-sinh: non-finite result");
    return v;
}

namespace detail {

// Gauss-Jacobi on [lo, x] with the (x-y)^{nu-1} kernel as weight.
template <class F>
double jacobi_piece(F& f, double lo, double x, double nu, int n)
{
    auto r = gauss_jacobi(n, nu - 1.0, 0.0);
    double half = 0.5 * (x - lo);
    double mid = 0.5 * (x + lo);
    double s = 0.0;
    for (std::size_t i = 0; i < r->x.size(); ++i)
        s += r->w[i] * f(mid + half * r->x[i]);
    return std::pow(half, nu) * s;
}

} // namespace detail

// Abel-type integral  int_a^x (x-y)^{nu-1} f(y) dy  for nu > 0, computed as
// (x-a)^nu int_0^1 (1-u)^{nu-1} f(a + (x-a)u) du.
// The right end uses the kernel as Jacobi weight; the left piece, where f may be
// singular, goes to tanh-sinh. Refinement bisects toward u=1.
template <class F>
double abel_integral(F&& f, double a, double x, double nu, const Config& cfg = default_config())
{
    if (!(x > a))
        throw DomainError("abel_integral: need x > a");
    if (!(nu > 0.0))
        throw DomainError("abel_integral: need nu > 0");
    double h = x - a;
    auto g = [&](double u) { return f(a + h * u); };
    double scale_out = std::pow(h, nu);
    if (nu == 1.0)
        return h * integrate_finite(g, 0.0, 1.0, cfg.quad_tol);
    double total = 0.0;
    double lo = 0.0;
    int n = cfg.jacobi_nodes;
    int n2 = std::max(8, (3 * n) / 4);
    for (int depth = 0; depth <= cfg.quad_max_depth; ++depth) {
        double m = lo + 0.5 * (1.0 - lo);
        double right = detail::jacobi_piece(g, m, 1.0, nu, n);
        double right2 = detail::jacobi_piece(g, m, 1.0, nu, n2);
        if (!std::isfinite(right))
            throw QuadratureFailure("abel_integral: non-finite integrand");
        double left = integrate_finite(
            [&](double u) { return std::pow(1.0 - u, nu - 1.0) * g(u); }, lo, m, cfg.quad_tol);
        double scale = std::fabs(total) + std::fabs(left) + std::fabs(right);
        if (std::fabs(right - right2) <= 10 * cfg.quad_tol * std::max(scale, 1e-300))
            return scale_out * (total + left + right);
        total += left;
        lo = m;
    }
    throw QuadratureFailure("abel_integral: bisection depth exceeded");
}

} // namespace adcons
