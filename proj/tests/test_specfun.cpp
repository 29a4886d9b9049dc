#include <adcons/quadrature.hpp>
#include <adcons/specfun.hpp>

#include <catch_amalgamated.hpp>

#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace adcons;
using testing_support::log_grid;
using testing_support::rel_err;
using testing_support::Rng;

TEST_CASE("gamma_recip values and poles")
{
    CHECK(gamma_recip(1.0) == 1.0);
    CHECK(gamma_recip(0.0) == 0.0);
    CHECK(gamma_recip(-1.0) == 0.0);
    CHECK(gamma_recip(-7.0) == 0.0);
    CHECK(rel_err(gamma_recip(0.5), 1.0 / std::sqrt(std::numbers::pi)) < 1e-15);

    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        double x = rng.uniform(-9.5, 30.0);
        CHECK(rel_err(gamma_recip(x), 1.0 / std::tgamma(x)) < 1e-12);
    }
}

TEST_CASE("gamma_recip stays finite where Gamma overflows")
{
    double v = gamma_recip(200.0);
    CHECK(v >= 0.0);
    CHECK(v < 1e-300);
    CHECK(gamma_recip(-150.5) != 0.0);
}

TEST_CASE("pochhammer symbols")
{
    CHECK(pochhammer(3.7, 0) == 1.0);
    CHECK(pochhammer(2.0, 3) == 24.0);
    // (-a)^-_n = (-1)^n (a)^+_n
    CHECK(pochhammer(-1.5, 4, Direction::falling) == 59.0625);
    CHECK(pochhammer(1.5, 4) == 59.0625);
    CHECK(pochhammer(-1.5, 3, Direction::falling) == -pochhammer(1.5, 3));
    CHECK_THROWS_AS(pochhammer(1.0, -1), DomainError);

    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        double a = rng.uniform(0.1, 6.0);
        int n = static_cast<int>(rng.uniform(0, 12));
        CHECK(rel_err(pochhammer(a, n), std::tgamma(a + n) / std::tgamma(a)) < 1e-12);
    }
}

TEST_CASE("Chu-Vandermonde identity through pochhammer")
{
    struct Case {
        int n;
        double b, c;
    };
    for (auto [n, b, c] : {Case{4, 0.7, 1.3}, Case{6, -0.2, 2.1}}) {
        double lhs = 0.0;
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            lhs += (k % 2 ? -1.0 : 1.0) * binom * pochhammer(b, k) / pochhammer(c, k);
            binom = binom * (n - k) / (k + 1);
        }
        CHECK(std::fabs(lhs - pochhammer(c - b, n) / pochhammer(c, n)) < 1e-10);
    }
}

TEST_CASE("Mittag-Leffler reference values")
{
    CHECK(ml_eval({0.0, 0.7, 0.4}, -3.0) == Catch::Approx(1.0 / std::tgamma(0.4)).epsilon(1e-14));
    CHECK(ml_eval({1.0, 1.0, 1.0}, 1.0) == Catch::Approx(std::exp(1.0)).epsilon(1e-13));
    CHECK(ml_eval({0.7, 1.0, 0.7}, -2.0) ==
          Catch::Approx(std::exp(-2.0) / std::tgamma(0.7)).epsilon(1e-12));
    CHECK(ml_eval({0.7, 1.0, 0.7}, -2.0) == Catch::Approx(0.10426).margin(5e-6));
    for (double b : {0.3, 1.0, 2.5, -0.5})
        CHECK(ml_eval({1.7, 0.6, b}, 0.0) == gamma_recip(b));
}

TEST_CASE("Mittag-Leffler against elementary closed forms")
{
    for (double x : {0.1, 0.5, 2.0, 5.0, 12.0, 30.0, 80.0, 300.0})
        CHECK(rel_err(ml_eval({1.0, 1.0, 1.0}, -x), std::exp(-x)) < 1e-10);
    for (double z : {0.3, 1.0, 2.0, 4.0, 7.5})
        CHECK(std::fabs(ml_eval({1.0, 2.0, 1.0}, -z * z) - std::cos(z)) < 1e-10);
    for (double z : {0.3, 1.0, 3.0, 6.0})
        CHECK(rel_err(ml_eval({1.0, 2.0, 2.0}, -z * z), std::sin(z) / z) < 1e-9);
    // E_{1/2}(-x) = exp(x^2) erfc(x)
    for (double x : {0.1, 1.0, 3.0, 10.0, 20.0, 25.0})
        CHECK(rel_err(ml_eval({1.0, 0.5, 1.0}, -x), std::exp(x * x) * std::erfc(x)) < 1e-9);
    for (double z : {-4.0, -0.5, 0.7, 3.0})
        CHECK(rel_err(ml_eval({1.0, 1.0, 2.0}, z), std::expm1(z) / z) < 1e-12);
    // E^2_{1,2}(z) = e^z (z - 1 + ... ) in closed form: sum (2)_k z^k / (k! Gamma(k+2)) = e^z
    for (double z : {-6.0, -1.0, 0.4, 2.0})
        CHECK(rel_err(ml_eval({2.0, 1.0, 2.0}, z), std::exp(z)) < 1e-10);
}

TEST_CASE("Mittag-Leffler derivative")
{
    CHECK(ml_derivative({1.0, 1.0, 1.0}, 1.0, 0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(ml_derivative({1.0, 1.0, 1.0}, 1.0, 1) == Catch::Approx(-std::exp(-1.0)).epsilon(1e-13));

    MLSpec sp{0.5, 0.5, 1.0};
    auto f = [&](double z) { return ml_eval(sp, -z); };
    double fd = testing_support::second_diff(f, 0.8, 1e-3);
    CHECK(rel_err(ml_derivative(sp, 0.8, 2), fd) < 1e-6);

    Rng rng(13);
    for (int i = 0; i < 30; ++i) {
        MLSpec s{rng.uniform(0.1, 2.0), rng.uniform(0.2, 1.5), rng.uniform(0.2, 3.0)};
        double z = rng.uniform(0.1, 8.0);
        auto g = [&](double w) { return ml_eval(s, -w); };
        double d1 = testing_support::central_diff(g, z, 1e-3);
        CHECK(std::fabs(ml_derivative(s, z, 1) - d1) < 1e-6 * std::max(1.0, std::fabs(d1)));
    }
}

TEST_CASE("negative-order split")
{
    CHECK(ml_neg_order_split({0.0, 0.8, 1.7}, 2.0) == gamma_recip(1.7));
    CHECK(ml_neg_order_split({-2.0, 1.0, 1.0}, 1.0) == Catch::Approx(-0.5).epsilon(1e-15));
    CHECK(std::fabs(ml_neg_order_split({-1.5, 0.5, 1.0}, 0.4) - ml_eval({-1.5, 0.5, 1.0}, 0.4)) < 1e-10);

    Rng rng(14);
    for (int i = 0; i < 40; ++i) {
        MLSpec s{-rng.uniform(0.0, 4.0), rng.uniform(0.3, 1.5), rng.uniform(0.2, 2.5)};
        double z = rng.uniform(-3.0, 3.0);
        double a = ml_neg_order_split(s, z), b = ml_eval(s, z);
        CHECK(std::fabs(a - b) < 1e-10 * std::max(1.0, std::fabs(b)));
    }
}

TEST_CASE("derivative of z^lambda E^lambda(-z)")
{
    Rng rng(15);
    for (int i = 0; i < 40; ++i) {
        MLSpec s{rng.uniform(0.2, 2.5), rng.uniform(0.2, 1.8), rng.uniform(0.3, 2.5)};
        double z = rng.uniform(0.2, 10.0);
        auto g = [&](double w) { return std::pow(w, s.lambda) * ml_eval(s, -w); };
        double fd = testing_support::central_diff(g, z, 1e-3 * z);
        double rhs = s.lambda * std::pow(z, s.lambda - 1.0) * ml_eval({s.lambda + 1.0, s.p, s.b}, -z);
        CHECK(std::fabs(fd - rhs) < 1e-6 * std::max(1e-3, std::fabs(rhs)));
    }
}

namespace {

double laplace_of_ml(const MLSpec& sp, double w, double offset)
{
    auto f = [&](double t) {
        if (w * t > 745.0)
            return 0.0;
        return std::exp(-w * t) * std::pow(t, sp.b - 1.0) * (ml_eval(sp, -std::pow(t, sp.p)) - offset);
    };
    return integrate_half_line(f, 0.0, 1e-12);
}

} // namespace

TEST_CASE("Laplace transform of t^{b-1} E(-t^p)")
{
    for (MLSpec sp : {MLSpec{0.5, 0.5, 1.0}, MLSpec{1.3, 0.8, 1.5}, MLSpec{2.0, 1.0, 2.5}}) {
        for (double w : {0.5, 1.0, 2.0, 5.0}) {
            double want = std::pow(w, -sp.b) * std::pow(1.0 + std::pow(w, -sp.p), -sp.lambda);
            CHECK(rel_err(laplace_of_ml(sp, w, 0.0), want) < 1e-8);
        }
    }
}

TEST_CASE("Mittag-Leffler non-negativity and complete monotonicity samples")
{
    Rng rng(16);
    auto grid = log_grid(1e-3, 1e3, 25);
    for (int i = 0; i < 25; ++i) {
        double p = rng.uniform(0.05, 1.0);
        double b = rng.uniform(0.05, 3.0);
        double lam = rng.uniform(0.01, b / p);
        MLSpec sp{lam, p, b};
        for (double z : grid) {
            CHECK(ml_eval(sp, -z) >= -1e-10);
            for (int n = 0; n <= 8; ++n) {
                double d = (n % 2 ? -1.0 : 1.0) * ml_derivative(sp, z, n);
                double scale = std::max(1.0, std::fabs(pochhammer(lam, n)) * gamma_recip(b + p * n));
                CHECK(d >= -1e-10 * scale);
            }
        }
    }
}

TEST_CASE("integer-order integrals of E(-z)")
{
    // I^n E^lambda_{p,b}(-z) = [E^{lambda-n}_{p,b-pn}(-z) - sum_{k<n} (n-lambda)^-_k z^k / (k! Gamma(b-pn+pk))] / (1-lambda)_n
    Rng rng(17);
    for (int n : {1, 2}) {
        for (int i = 0; i < 8; ++i) {
            MLSpec sp{rng.uniform(0.1, 2.5), rng.uniform(0.3, 1.2), rng.uniform(0.5, 2.5)};
            if (std::fabs(pochhammer(1.0 - sp.lambda, n)) < 1e-3)
                continue;
            double z = rng.uniform(0.2, 4.0);
            // quadrature: I^n g(z) = int_0^z (z-y)^{n-1} g(y) dy / (n-1)!
            auto g = [&](double y) { return std::pow(z - y, n - 1) * ml_eval(sp, -y); };
            double lhs = integrate_finite(g, 0.0, z, 1e-13) / std::tgamma(double(n));
            double bn = sp.b - sp.p * n;
            double rhs = ml_eval({sp.lambda - n, sp.p, bn}, -z);
            double fact = 1.0;
            for (int k = 0; k < n; ++k) {
                if (k > 0)
                    fact *= k;
                rhs -= pochhammer(n - sp.lambda, k, Direction::falling) * std::pow(z, k) / fact *
                       gamma_recip(bn + sp.p * k);
            }
            rhs /= pochhammer(1.0 - sp.lambda, n);
            CHECK(std::fabs(lhs - rhs) < 1e-8 * std::max(1.0, std::fabs(rhs)));
        }
    }
}

TEST_CASE("invalid Mittag-Leffler specs")
{
    CHECK_THROWS_AS(ml_eval({1.0, 0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(ml_eval({1.0, -1.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(ml_eval({1.0, 1.0, 1.0}, std::nan("")), DomainError);
}
