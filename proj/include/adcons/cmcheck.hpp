#pragma once

#include <adcons/admodels.hpp>
#include <adcons/config.hpp>
#include <adcons/expr.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace adcons {

struct Grid {
    double min = 1e-3;
    double max = 1e3;
    int count = 40;
    bool log = true;

    std::vector<double> points() const
    {
        if (count < 1 || !(max >= min) || (log && !(min > 0.0)))
            throw DomainError("invalid grid");
        std::vector<double> p(count);
        if (count == 1) {
            p[0] = min;
            return p;
        }
        for (int i = 0; i < count; ++i) {
            double f = double(i) / (count - 1);
            p[i] = log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
                       : min + f * (max - min);
        }
        p.front() = min;
        p.back() = max;
        return p;
    }

    // MIN:MAX:COUNT[:log|linear]
    static Grid parse(const std::string& s)
    {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(item);
        if (parts.size() < 3 || parts.size() > 4)
            throw DomainError("grid must be MIN:MAX:COUNT[:log|linear]");
        Grid g;
        try {
            std::size_t used = 0;
            g.min = std::stod(parts[0], &used);
            if (used != parts[0].size())
                throw DomainError("bad grid minimum");
            g.max = std::stod(parts[1], &used);
            if (used != parts[1].size())
                throw DomainError("bad grid maximum");
            g.count = std::stoi(parts[2], &used);
            if (used != parts[2].size())
                throw DomainError("bad grid count");
        }
        catch (const std::logic_error&) {
            throw DomainError("grid must be MIN:MAX:COUNT[:log|linear]");
        }
        if (parts.size() == 4) {
            if (parts[3] == "log")
                g.log = true;
            else if (parts[3] == "linear")
                g.log = false;
            else
                throw DomainError("grid spacing must be log or linear");
        }
        g.points();
        return g;
    }

    std::string str() const
    {
        std::ostringstream o;
        o << format_number(min) << ':' << format_number(max) << ':' << count << ':'
          << (log ? "log" : "linear");
        return o.str();
    }
};

enum class CMStatus { pass, fail, inconclusive };

inline const char* to_string(CMStatus s)
{
    switch (s) {
    case CMStatus::pass: return "pass";
    case CMStatus::fail: return "fail";
    case CMStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct Witness {
    int order = 0;
    double x = 0.0;
    double value = 0.0;
};

struct CMVerdict {
    CMStatus status = CMStatus::pass;
    int max_order_checked = 0;
    std::optional<Witness> witness;
    // smallest (-1)^n f^(n) seen, relative to its magnitude estimate
    double min_margin = std::numeric_limits<double>::infinity();
    std::string note;
};

// Scaled jet at x: c_j = f^{(j)}(x) x^j / j! with magnitude bounds m_j.
using JetProvider = std::function<Jet<double>(double x, int n)>;

inline CMVerdict cm_test_jets(const JetProvider& jets, int n_max, const std::vector<double>& grid,
                              const Config& cfg = default_config())
{
    if (n_max < 0)
        throw DomainError("cm_test: negative order");
    if (n_max > cfg.cm_order_cap)
        throw DifferentiationDepthExceeded("cm_test: order " + std::to_string(n_max) +
                                           " above cap " + std::to_string(cfg.cm_order_cap));
    CMVerdict v;
    v.max_order_checked = n_max;
    double worst = std::numeric_limits<double>::infinity();
    bool nonfinite = false;
    for (double x : grid) {
        if (!(x > 0.0))
            throw DomainError("cm_test: grid points must be positive");
        Jet<double> j = jets(x, n_max);
        for (int n = 0; n <= n_max; ++n) {
            double c = (n % 2 ? -1.0 : 1.0) * j.v[n];
            double mag = j.m[n];
            if (!std::isfinite(c) || !std::isfinite(mag)) {
                nonfinite = true;
                continue;
            }
            double rel = mag > 0.0 ? c / mag : 0.0;
            bool lower = !v.witness || n < v.witness->order;
            bool same = v.witness && n == v.witness->order && rel < worst;
            if (c < -cfg.eps_abs * mag && (lower || same)) {
                worst = rel;
                // (-1)^n f^(n)(x) = c n! / x^n
                double val = c;
                for (int k = 1; k <= n; ++k)
                    val *= k / x;
                v.witness = Witness{n, x, val};
            }
            if (rel < v.min_margin)
                v.min_margin = rel;
        }
    }
    if (v.witness)
        v.status = CMStatus::fail;
    else if (nonfinite) {
        v.status = CMStatus::inconclusive;
        v.note = "non-finite derivatives on the grid";
    }
    return v;
}

// Finite-order check of (-1)^n f^(n)(x) >= 0 on the grid; a pass only covers n <= n_max.
// A failure reports the lowest failing order, at its most negative point.
inline CMVerdict cm_test(const Expr& f, int n_max, const std::vector<double>& grid,
                         const Config& cfg = default_config())
{
    return cm_test_jets([&](double x, int n) { return taylor<double>(f, x, x, n); }, n_max, grid,
                        cfg);
}

inline CMVerdict cm_test(const Expr& f, int n_max, const Config& cfg = default_config())
{
    return cm_test(f, n_max, Grid{}.points(), cfg);
}

// (-1)^k Delta^k a_j >= 0 for k <= k_max; witness order is k and x holds j.
inline CMVerdict cm_sequence_test(const std::vector<double>& a, int k_max,
                                  const Config& cfg = default_config())
{
    int m = static_cast<int>(a.size()) - 1;
    if (k_max < 0 || m < k_max)
        throw DomainError("cm_sequence_test: need at least k_max + 1 terms");
    CMVerdict v;
    v.max_order_checked = k_max;
    std::vector<double> d = a;
    std::vector<double> mag(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        mag[i] = std::fabs(a[i]);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) {
            for (int j = 0; j + k <= m; ++j) {
                d[j] = d[j + 1] - d[j];
                mag[j] = mag[j + 1] + mag[j];
            }
        }
        for (int j = 0; j + k <= m; ++j) {
            double c = (k % 2 ? -1.0 : 1.0) * d[j];
            double rel = mag[j] > 0.0 ? c / mag[j] : 0.0;
            if (rel < v.min_margin)
                v.min_margin = rel;
            bool lower = !v.witness || k < v.witness->order;
            bool same = v.witness && k == v.witness->order && rel < worst;
            if (c < -cfg.eps_abs * std::max(mag[j], 1.0) && (lower || same)) {
                worst = rel;
                v.witness = Witness{k, double(j), c};
            }
        }
    }
    if (v.witness)
        v.status = CMStatus::fail;
    return v;
}

// n-th approximant ((-1)^n/n!) (n/t)^{n+1} F^{(n)}(n/t) of the inverse Laplace transform.
// Jets at x0 = n/t with step x0 give (-1)^n x0 c_n directly, so nothing overflows.
inline double post_widder(const Expr& F, double t, int n, const Config& cfg = default_config())
{
    if (!(t > 0.0))
        throw DomainError("post_widder: t must be positive");
    if (n < 1)
        throw DomainError("post_widder: order must be positive");
    if (n > cfg.pw_order_cap)
        throw DifferentiationDepthExceeded("post_widder: order above cap " +
                                           std::to_string(cfg.pw_order_cap));
    double x0 = n / t;
    Jet<double> j = taylor<double>(F, x0, x0, n);
    double r = (n % 2 ? -1.0 : 1.0) * x0 * j.v[n];
    if (!std::isfinite(r))
        throw Overflow("post_widder: approximant not representable");
    return r;
}

} // namespace adcons
