#include <adcons/admodels.hpp>
#include <adcons/cmcheck.hpp>
#include <adcons/parse.hpp>
#include <adcons/quadrature.hpp>

#include <catch_amalgamated.hpp>

#include "support.hpp"

#include <cmath>

using namespace adcons;
using testing_support::rel_err;
using testing_support::Rng;

TEST_CASE("cm_test examples")
{
    CHECK(cm_test(parse_expr("exp(-x)"), 10).status == CMStatus::pass);
    CHECK(cm_test(parse_expr("x^-0.5"), 10).status == CMStatus::pass);
    CHECK(cm_test(parse_expr("log(1 + 1/x)"), 8).status == CMStatus::pass);

    CMVerdict v = cm_test(parse_expr("x^0.5"), 2);
    CHECK(v.status == CMStatus::fail);
    REQUIRE(v.witness);
    CHECK(v.witness->order == 1);
    CHECK(v.witness->value < 0.0);
    // (-1) f'(x) = -0.5 x^{-1/2}
    CHECK(rel_err(v.witness->value, -0.5 / std::sqrt(v.witness->x)) < 1e-12);
    CHECK(v.max_order_checked == 2);
}

TEST_CASE("cm_test order cap and grid validation")
{
    CHECK_THROWS_AS(cm_test(parse_expr("exp(-x)"), 17), DifferentiationDepthExceeded);
    Config cfg;
    cfg.cm_order_cap = 20;
    CHECK(cm_test(parse_expr("exp(-x)"), 20, Grid{}.points(), cfg).status == CMStatus::pass);
    CHECK_THROWS_AS(cm_test(parse_expr("exp(-x)"), 2, std::vector<double>{0.0, 1.0}), DomainError);
}

TEST_CASE("cm_test witness is the lowest failing order")
{
    // 1 + x e^{-x} is positive, first derivative changes sign
    CMVerdict v = cm_test(parse_expr("1 + x*exp(-x)"), 6);
    REQUIRE(v.status == CMStatus::fail);
    CHECK(v.witness->order == 1);
    CMVerdict w = cm_test(parse_expr("exp(-x) - 0.5*exp(-2*x)"), 8);
    // f = e^{-x} - e^{-2x}/2: f > 0, -f' = e^{-x} - e^{-2x} > 0, f'' = e^{-x} - 2e^{-2x} < 0 near 0
    REQUIRE(w.status == CMStatus::fail);
    CHECK(w.witness->order == 2);
}

TEST_CASE("grid parsing")
{
    Grid g = Grid::parse("0.01:100:5");
    auto p = g.points();
    REQUIRE(p.size() == 5);
    CHECK(p.front() == 0.01);
    CHECK(p.back() == 100.0);
    CHECK(rel_err(p[2], 1.0) < 1e-14);
    Grid l = Grid::parse("1:3:3:linear");
    CHECK(l.points() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(Grid::parse(l.str()).points() == l.points());
    for (const char* bad : {"1:2", "a:2:3", "1:2:3:cubic", "0:1:4:log", "2:1:3", "1:2:0", "1:2:3x"})
        CHECK_THROWS_AS(Grid::parse(bad), DomainError);
}

TEST_CASE("cm_sequence_test examples")
{
    CHECK(cm_sequence_test(std::vector<double>(8, 2.5), 5).status == CMStatus::pass);

    std::vector<double> lin(8);
    for (int j = 0; j < 8; ++j)
        lin[j] = j;
    CMVerdict v = cm_sequence_test(lin, 3);
    REQUIRE(v.status == CMStatus::fail);
    CHECK(v.witness->order == 1);
    CHECK(v.witness->value == -1.0);

    std::vector<double> h(13);
    for (int j = 0; j <= 12; ++j)
        h[j] = 1.0 / (j + 1);
    CHECK(cm_sequence_test(h, 6).status == CMStatus::pass);

    CHECK_THROWS_AS(cm_sequence_test(h, 13), DomainError);
}

TEST_CASE("Hausdorff moment sequences pass the sequence test")
{
    Rng rng(41);
    for (int i = 0; i < 20; ++i) {
        // a_j = int_0^1 t^j t^{p-1} (1-t)^{q-1} dt = B(j+p, q)
        double p = rng.uniform(0.2, 3.0), q = rng.uniform(0.2, 3.0);
        std::vector<double> a(16);
        for (int j = 0; j < 16; ++j)
            a[j] = std::exp(std::lgamma(j + p) + std::lgamma(q) - std::lgamma(j + p + q));
        CHECK(cm_sequence_test(a, 10).status == CMStatus::pass);
    }
    // a non-moment sequence: a_j = 1/(j+1) with a bump in the middle
    std::vector<double> b(10);
    for (int j = 0; j < 10; ++j)
        b[j] = 1.0 / (j + 1) + (j == 5 ? 0.01 : 0.0);
    CHECK(cm_sequence_test(b, 6).status == CMStatus::fail);
}

TEST_CASE("post_widder examples")
{
    for (int n : {1, 5, 40, 200})
        CHECK(rel_err(post_widder(parse_expr("1/x"), 0.7, n), 1.0) < 1e-13);
    CHECK(rel_err(post_widder(parse_expr("1/(x + 1)"), 1.0, 10), std::pow(1.1, -11.0)) < 1e-13);

    Expr F = parse_expr("x^-0.6");
    double exact = 1.0 / std::tgamma(0.6);
    double e16 = std::fabs(post_widder(F, 1.0, 16) - exact);
    double e32 = std::fabs(post_widder(F, 1.0, 32) - exact);
    CHECK(e32 < e16);
    CHECK(e32 < 1e-2 * exact);

    CHECK_THROWS_AS(post_widder(F, 1.0, 1000), DifferentiationDepthExceeded);
    CHECK_THROWS_AS(post_widder(F, -1.0, 4), DomainError);
}

TEST_CASE("post_widder converges monotonically for 1/(x+1)")
{
    Expr F = parse_expr("1/(x + 1)");
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {8, 16, 32, 64}) {
        double e = std::fabs(post_widder(F, 1.0, n) - std::exp(-1.0));
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < 5e-3);
    // large orders stay finite (n! and (n/t)^{n+1} never formed)
    double v = post_widder(F, 1.0, 400);
    CHECK(std::fabs(v - std::exp(-1.0)) < 1e-3);
}

namespace {

// Jets of F(x) = int_0^1 e^{-xt} phi(t) dt from quadrature of each derivative.
Jet<double> laplace_jets(const std::function<double(double)>& phi, double x, int n)
{
    Jet<double> j;
    j.v.resize(n + 1);
    j.m.resize(n + 1);
    double fact = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0)
            fact *= k;
        auto g = [&](double t) { return std::pow(-t * x, k) * std::exp(-x * t) * phi(t); };
        auto ga = [&](double t) { return std::pow(t * x, k) * std::exp(-x * t) * std::fabs(phi(t)); };
        j.v[k] = integrate_finite(g, 0.0, 1.0, 1e-13) / fact;
        j.m[k] = integrate_finite(ga, 0.0, 1.0, 1e-13) / fact;
    }
    return j;
}

} // namespace

TEST_CASE("Bernstein direction")
{
    CHECK(cm_test(parse_expr("1/(x + 1)"), 12).status == CMStatus::pass);

    // phi = 1 - 2t on [0,1] takes negative values; its transform is not cm
    auto phi = [](double t) { return 1.0 - 2.0 * t; };
    CMVerdict v = cm_test_jets([&](double x, int n) { return laplace_jets(phi, x, n); }, 6,
                               Grid{1e-2, 1e2, 20, true}.points());
    REQUIRE(v.status == CMStatus::fail);
    CHECK(v.witness->order <= 6);

    // a non-negative phi on [0,1] gives a cm transform
    auto pos = [](double t) { return t * (1.0 - t); };
    CMVerdict w = cm_test_jets([&](double x, int n) { return laplace_jets(pos, x, n); }, 6,
                               Grid{1e-2, 1e2, 20, true}.points());
    CHECK(w.status == CMStatus::pass);
}

TEST_CASE("x^{3/2-lambda} R_(k) for a constant-beta model: order 4 passing implies order 3")
{
    Rng rng(42);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        double beta = rng.uniform(-2.0, 1.0);
        double lam = rng.uniform(1.5 - beta, 4.0);
        RadialModel m = RadialModel::constant_beta(beta);
        auto test = [&](int k) {
            return cm_test(pow(var(), 1.5 - lam) * R_n_expr(m, k), 8).status == CMStatus::pass;
        };
        if (test(4)) {
            ++checked;
            CHECK(test(3));
        }
    }
    CHECK(checked > 10);
}
