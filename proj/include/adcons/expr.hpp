#pragma once

#include <adcons/config.hpp>
#include <adcons/specfun.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adcons {

enum class Op { constant, var, add, mul, pow, exp, log, ml, deriv };

struct Node;

// Immutable expression tree in one variable x.
class Expr {
public:
    Expr();
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    const Node& node() const { return *node_; }
    const Node* get() const { return node_.get(); }
    Op op() const;
    bool is_constant() const { return op() == Op::constant; }
    double constant_value() const;

private:
    std::shared_ptr<const Node> node_;
};

using ExprFn = Expr;

struct Node {
    Op op = Op::constant;
    double c = 0.0; // constant value, or exponent for pow
    std::vector<Expr> args;
    MLSpec ml{};
    int order = 0; // for deriv
};

inline Expr make_node(Node n)
{
    return Expr(std::make_shared<const Node>(std::move(n)));
}

inline Expr constant(double c)
{
    Node n;
    n.op = Op::constant;
    n.c = c;
    return make_node(std::move(n));
}

inline Expr::Expr() : node_(std::make_shared<const Node>()) {}
inline Op Expr::op() const { return node_->op; }
inline double Expr::constant_value() const { return node_->c; }

inline Expr var()
{
    Node n;
    n.op = Op::var;
    return make_node(std::move(n));
}

inline bool is_const(const Expr& e, double v)
{
    return e.is_constant() && e.constant_value() == v;
}

inline Expr sum(const std::vector<Expr>& terms)
{
    std::vector<Expr> out;
    double c = 0.0;
    for (const auto& t : terms) {
        if (t.op() == Op::add) {
            for (const auto& s : t.node().args) {
                if (s.is_constant())
                    c += s.constant_value();
                else
                    out.push_back(s);
            }
        }
        else if (t.is_constant()) {
            c += t.constant_value();
        }
        else {
            out.push_back(t);
        }
    }
    if (c != 0.0 || out.empty())
        out.insert(out.begin(), constant(c));
    if (out.size() == 1)
        return out[0];
    Node n;
    n.op = Op::add;
    n.args = std::move(out);
    return make_node(std::move(n));
}

inline Expr pow(const Expr& u, double a);

inline Expr product(const std::vector<Expr>& factors)
{
    std::vector<Expr> out;
    double c = 1.0;
    double xpow = 0.0;
    bool has_x = false;
    auto take = [&](const Expr& f) {
        if (f.is_constant()) {
            c *= f.constant_value();
        }
        else if (f.op() == Op::var) {
            xpow += 1.0;
            has_x = true;
        }
        else if (f.op() == Op::pow && f.node().args[0].op() == Op::var) {
            xpow += f.node().c;
            has_x = true;
        }
        else {
            out.push_back(f);
        }
    };
    for (const auto& f : factors) {
        if (f.op() == Op::mul) {
            for (const auto& g : f.node().args)
                take(g);
        }
        else {
            take(f);
        }
    }
    if (c == 0.0)
        return constant(0.0);
    if (has_x && xpow != 0.0)
        out.insert(out.begin(), pow(var(), xpow));
    if (c != 1.0 || out.empty())
        out.insert(out.begin(), constant(c));
    if (out.size() == 1)
        return out[0];
    Node n;
    n.op = Op::mul;
    n.args = std::move(out);
    return make_node(std::move(n));
}

inline Expr pow(const Expr& u, double a)
{
    if (a == 0.0)
        return constant(1.0);
    if (a == 1.0)
        return u;
    if (u.is_constant())
        return constant(std::pow(u.constant_value(), a));
    if (u.op() == Op::pow && u.node().args[0].op() == Op::var)
        return pow(u.node().args[0], u.node().c * a);
    if (u.op() == Op::mul && u.node().args[0].is_constant() && u.node().args[0].constant_value() > 0.0) {
        std::vector<Expr> rest(u.node().args.begin() + 1, u.node().args.end());
        return product({constant(std::pow(u.node().args[0].constant_value(), a)), pow(product(rest), a)});
    }
    Node n;
    n.op = Op::pow;
    n.c = a;
    n.args = {u};
    return make_node(std::move(n));
}

inline Expr exp(const Expr& u)
{
    if (u.is_constant())
        return constant(std::exp(u.constant_value()));
    Node n;
    n.op = Op::exp;
    n.args = {u};
    return make_node(std::move(n));
}

inline Expr log(const Expr& u)
{
    if (u.is_constant())
        return constant(std::log(u.constant_value()));
    Node n;
    n.op = Op::log;
    n.args = {u};
    return make_node(std::move(n));
}

// E^lambda_{p,b}(u)
inline Expr mlf(const MLSpec& sp, const Expr& u)
{
    sp.validate();
    if (sp.lambda == 0.0)
        return constant(gamma_recip(sp.b));
    Node n;
    n.op = Op::ml;
    n.ml = sp;
    n.args = {u};
    return make_node(std::move(n));
}

// k-th derivative of u, evaluated through Taylor jets.
inline Expr deriv(const Expr& u, int k)
{
    if (k < 0)
        throw DomainError("deriv: negative order");
    if (k == 0)
        return u;
    if (u.is_constant())
        return constant(0.0);
    if (u.op() == Op::deriv)
        return deriv(u.node().args[0], u.node().order + k);
    Node n;
    n.op = Op::deriv;
    n.order = k;
    n.args = {u};
    return make_node(std::move(n));
}

inline Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
inline Expr operator-(const Expr& a) { return product({constant(-1.0), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return product({a, pow(b, -1.0)}); }
inline Expr operator+(const Expr& a, double b) { return a + constant(b); }
inline Expr operator+(double a, const Expr& b) { return constant(a) + b; }
inline Expr operator*(double a, const Expr& b) { return constant(a) * b; }
inline Expr operator*(const Expr& a, double b) { return a * constant(b); }
inline Expr operator-(double a, const Expr& b) { return constant(a) - b; }
inline Expr operator-(const Expr& a, double b) { return a - constant(b); }

inline bool affine_coefficients(const Expr& g, double& slope);

// Replace x by g throughout e.
inline Expr substitute(const Expr& e, const Expr& g)
{
    const Node& n = e.node();
    switch (n.op) {
    case Op::constant: return e;
    case Op::var: return g;
    case Op::add: {
        std::vector<Expr> v;
        for (const auto& a : n.args)
            v.push_back(substitute(a, g));
        return sum(v);
    }
    case Op::mul: {
        std::vector<Expr> v;
        for (const auto& a : n.args)
            v.push_back(substitute(a, g));
        return product(v);
    }
    case Op::pow: return pow(substitute(n.args[0], g), n.c);
    case Op::exp: return exp(substitute(n.args[0], g));
    case Op::log: return log(substitute(n.args[0], g));
    case Op::ml: return mlf(n.ml, substitute(n.args[0], g));
    case Op::deriv: {
        // u^{(k)}(s x + t) = s^{-k} d^k/dx^k [u(s x + t)]; other substitutions have no tree form
        if (g.op() == Op::var)
            return e;
        double s = 0.0;
        if (!affine_coefficients(g, s) || s == 0.0)
            throw DomainError("substitute: derivative node under non-affine substitution");
        return product({constant(std::pow(s, -n.order)), deriv(substitute(n.args[0], g), n.order)});
    }
    }
    return e;
}

// Symbolic first derivative.
inline Expr diff(const Expr& e)
{
    const Node& n = e.node();
    switch (n.op) {
    case Op::constant: return constant(0.0);
    case Op::var: return constant(1.0);
    case Op::add: {
        std::vector<Expr> v;
        for (const auto& a : n.args)
            v.push_back(diff(a));
        return sum(v);
    }
    case Op::mul: {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            Expr di = diff(n.args[i]);
            if (is_const(di, 0.0))
                continue;
            std::vector<Expr> f;
            for (std::size_t j = 0; j < n.args.size(); ++j)
                f.push_back(i == j ? di : n.args[j]);
            terms.push_back(product(f));
        }
        return sum(terms);
    }
    case Op::pow: {
        const Expr& u = n.args[0];
        return product({constant(n.c), pow(u, n.c - 1.0), diff(u)});
    }
    case Op::exp: return product({e, diff(n.args[0])});
    case Op::log: return product({diff(n.args[0]), pow(n.args[0], -1.0)});
    case Op::ml: {
        const MLSpec& s = n.ml;
        MLSpec up{s.lambda + 1.0, s.p, s.b + s.p};
        return product({constant(s.lambda), mlf(up, n.args[0]), diff(n.args[0])});
    }
    case Op::deriv: return deriv(n.args[0], n.order + 1);
    }
    return constant(0.0);
}

inline Expr diff(const Expr& e, int k)
{
    Expr r = e;
    for (int i = 0; i < k; ++i)
        r = diff(r);
    return r;
}

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_string(const Expr& e)
{
    const Node& n = e.node();
    switch (n.op) {
    case Op::constant: return n.c < 0 ? "(" + format_number(n.c) + ")" : format_number(n.c);
    case Op::var: return "x";
    case Op::add: {
        std::string s = "(";
        for (std::size_t i = 0; i < n.args.size(); ++i)
            s += (i ? " + " : "") + to_string(n.args[i]);
        return s + ")";
    }
    case Op::mul: {
        std::string s;
        for (std::size_t i = 0; i < n.args.size(); ++i)
            s += (i ? "*" : "") + to_string(n.args[i]);
        return s;
    }
    case Op::pow: return "pow(" + to_string(n.args[0]) + ", " + format_number(n.c) + ")";
    case Op::exp: return "exp(" + to_string(n.args[0]) + ")";
    case Op::log: return "log(" + to_string(n.args[0]) + ")";
    case Op::ml:
        return "mlf(" + format_number(n.ml.lambda) + ", " + format_number(n.ml.p) + ", " +
               format_number(n.ml.b) + "; " + to_string(n.args[0]) + ")";
    case Op::deriv: return "diff(" + to_string(n.args[0]) + ", " + std::to_string(n.order) + ")";
    }
    return "?";
}



inline bool has_ml(const Expr& e)
{
    if (e.op() == Op::ml)
        return true;
    for (const auto& a : e.node().args)
        if (has_ml(a))
            return true;
    return false;
}

// ---------------------------------------------------------------------------
// Taylor jets: coefficients c_j = f^{(j)}(x0) h^j / j!, plus a magnitude jet that
// bounds the size of intermediate quantities (roundoff is ~eps times it).

template <class T>
struct Jet {
    std::vector<T> v;
    std::vector<T> m;
};

namespace detail {

template <class T>
T tabs(const T& x)
{
    using std::abs;
    return abs(x);
}

template <class T>
std::vector<T> cauchy(const std::vector<T>& a, const std::vector<T>& b)
{
    std::size_t n = a.size();
    std::vector<T> r(n, T(0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            r[k] += a[j] * b[k - j];
    return r;
}

template <class T>
Jet<T> jet_mul(const Jet<T>& a, const Jet<T>& b)
{
    return {cauchy(a.v, b.v), cauchy(a.m, b.m)};
}

template <class T>
T nan_value()
{
    return T(std::numeric_limits<double>::quiet_NaN());
}

template <class T>
using JetMemo = std::map<std::pair<const Node*, int>, Jet<T>>;

template <class T>
Jet<T> jets_rec(const Expr& e, const T& x0, const T& h, int N, JetMemo<T>& memo);

template <class T>
Jet<T> jet_pow(const Jet<T>& u, double a, int N)
{
    using std::pow;
    std::size_t n = N + 1;
    if (a == std::floor(a) && a >= 0.0 && a <= 64.0) {
        Jet<T> r{std::vector<T>(n, T(0)), std::vector<T>(n, T(0))};
        r.v[0] = T(1);
        r.m[0] = T(1);
        for (int i = 0; i < static_cast<int>(a); ++i)
            r = jet_mul(r, u);
        return r;
    }
    Jet<T> r{std::vector<T>(n, T(0)), std::vector<T>(n, T(0))};
    T u0 = u.v[0];
    if (u0 == T(0)) {
        r.v[0] = a > 0 ? T(0) : T(std::numeric_limits<double>::infinity());
        r.m[0] = tabs(r.v[0]);
        for (std::size_t k = 1; k < n; ++k)
            r.v[k] = r.m[k] = nan_value<T>();
        return r;
    }
    r.v[0] = pow(u0, T(a));
    r.m[0] = tabs(r.v[0]);
    T au0 = tabs(u0);
    for (std::size_t k = 1; k < n; ++k) {
        T s(0), sm(0);
        for (std::size_t j = 1; j <= k; ++j) {
            T coef = T(a) * T(double(j)) - T(double(k - j));
            s += coef * u.v[j] * r.v[k - j];
            sm += tabs(coef) * u.m[j] * r.m[k - j];
        }
        r.v[k] = s / (T(double(k)) * u0);
        r.m[k] = sm / (T(double(k)) * au0);
    }
    return r;
}

template <class T>
Jet<T> jet_exp(const Jet<T>& u, int N)
{
    using std::exp;
    std::size_t n = N + 1;
    Jet<T> r{std::vector<T>(n, T(0)), std::vector<T>(n, T(0))};
    r.v[0] = exp(u.v[0]);
    r.m[0] = tabs(r.v[0]);
    for (std::size_t k = 1; k < n; ++k) {
        T s(0), sm(0);
        for (std::size_t j = 1; j <= k; ++j) {
            s += T(double(j)) * u.v[j] * r.v[k - j];
            sm += T(double(j)) * u.m[j] * r.m[k - j];
        }
        r.v[k] = s / T(double(k));
        r.m[k] = sm / T(double(k));
    }
    return r;
}

template <class T>
Jet<T> jet_log(const Jet<T>& u, int N)
{
    using std::log;
    std::size_t n = N + 1;
    Jet<T> r{std::vector<T>(n, T(0)), std::vector<T>(n, T(0))};
    T u0 = u.v[0];
    if (!(u0 > T(0))) {
        for (std::size_t k = 0; k < n; ++k)
            r.v[k] = r.m[k] = nan_value<T>();
        return r;
    }
    r.v[0] = log(u0);
    r.m[0] = tabs(r.v[0]) + T(1);
    for (std::size_t k = 1; k < n; ++k) {
        T s(0), sm(0);
        for (std::size_t j = 1; j < k; ++j) {
            s += T(double(j)) * r.v[j] * u.v[k - j];
            sm += T(double(j)) * r.m[j] * u.m[k - j];
        }
        r.v[k] = (u.v[k] - s / T(double(k))) / u0;
        r.m[k] = (u.m[k] + sm / T(double(k))) / u0;
    }
    return r;
}

template <class T>
Jet<T> jet_ml(const MLSpec& sp, const Jet<T>& u, int N)
{
    std::size_t n = N + 1;
    double u0 = static_cast<double>(u.v[0]);
    const double eps = std::numeric_limits<double>::epsilon();
    // g_j = (lambda)_j E^{lambda+j}_{p,b+pj}(u0) / j!
    std::vector<T> g(n), gm(n);
    double poch = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (poch == 0.0) {
            g[j] = gm[j] = T(0);
        }
        else {
            MLSpec sj{sp.lambda + double(j), sp.p, sp.b + sp.p * double(j)};
            MLResult r = ml_eval_detailed(sj, u0);
            g[j] = T(poch * r.value);
            gm[j] = T(std::fabs(poch) * (std::fabs(r.value) + r.abs_err / eps));
        }
        poch *= (sp.lambda + double(j)) / double(j + 1);
    }
    Jet<T> d = u;
    d.v[0] = T(0);
    d.m[0] = T(0);
    Jet<T> r{std::vector<T>(n, T(0)), std::vector<T>(n, T(0))};
    Jet<T> pw{std::vector<T>(n, T(0)), std::vector<T>(n, T(0))};
    pw.v[0] = T(1);
    pw.m[0] = T(1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            r.v[k] += g[j] * pw.v[k];
            r.m[k] += gm[j] * pw.m[k];
        }
        pw = jet_mul(pw, d);
    }
    return r;
}

template <class T>
Jet<T> jets_rec(const Expr& e, const T& x0, const T& h, int N, JetMemo<T>& memo)
{
    auto key = std::make_pair(e.get(), N);
    auto it = memo.find(key);
    if (it != memo.end())
        return it->second;
    const Node& nd = e.node();
    std::size_t n = N + 1;
    Jet<T> r{std::vector<T>(n, T(0)), std::vector<T>(n, T(0))};
    switch (nd.op) {
    case Op::constant:
        r.v[0] = T(nd.c);
        r.m[0] = tabs(r.v[0]);
        break;
    case Op::var:
        r.v[0] = x0;
        r.m[0] = tabs(x0);
        if (n > 1) {
            r.v[1] = h;
            r.m[1] = tabs(h);
        }
        break;
    case Op::add:
        for (const auto& a : nd.args) {
            Jet<T> ja = jets_rec(a, x0, h, N, memo);
            for (std::size_t k = 0; k < n; ++k) {
                r.v[k] += ja.v[k];
                r.m[k] += ja.m[k];
            }
        }
        break;
    case Op::mul:
        r.v[0] = T(1);
        r.m[0] = T(1);
        for (const auto& a : nd.args)
            r = jet_mul(r, jets_rec(a, x0, h, N, memo));
        break;
    case Op::pow: r = jet_pow(jets_rec(nd.args[0], x0, h, N, memo), nd.c, N); break;
    case Op::exp: r = jet_exp(jets_rec(nd.args[0], x0, h, N, memo), N); break;
    case Op::log: r = jet_log(jets_rec(nd.args[0], x0, h, N, memo), N); break;
    case Op::ml: r = jet_ml(nd.ml, jets_rec(nd.args[0], x0, h, N, memo), N); break;
    case Op::deriv: {
        int k = nd.order;
        Jet<T> w = jets_rec(nd.args[0], x0, h, N + k, memo);
        // coefficient_j = w_{j+k} (j+1)_k / h^k
        T hk(1);
        for (int i = 0; i < k; ++i)
            hk *= h;
        for (std::size_t j = 0; j < n; ++j) {
            T f(1);
            for (int i = 1; i <= k; ++i)
                f *= T(double(j + i));
            r.v[j] = w.v[j + k] * f / hk;
            r.m[j] = w.m[j + k] * f / tabs(hk);
        }
        break;
    }
    }
    memo.emplace(key, r);
    return r;
}

} // namespace detail

// Taylor jet of e at x0 with step scale h, orders 0..N.
template <class T = double>
Jet<T> taylor(const Expr& e, const T& x0, const T& h, int N)
{
    detail::JetMemo<T> memo;
    return detail::jets_rec(e, x0, h, N, memo);
}

// f^{(k)}(x) for k = 0..N.
inline std::vector<double> derivatives(const Expr& e, double x, int N)
{
    Jet<double> j = taylor<double>(e, x, 1.0, N);
    std::vector<double> d(N + 1);
    double f = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0)
            f *= k;
        d[k] = j.v[k] * f;
    }
    return d;
}

template <class T = double>
T eval(const Expr& e, const T& x)
{
    using std::exp;
    using std::log;
    using std::pow;
    const Node& n = e.node();
    switch (n.op) {
    case Op::constant: return T(n.c);
    case Op::var: return x;
    case Op::add: {
        T s(0);
        for (const auto& a : n.args)
            s += eval<T>(a, x);
        return s;
    }
    case Op::mul: {
        T s(1);
        for (const auto& a : n.args)
            s *= eval<T>(a, x);
        return s;
    }
    case Op::pow: {
        T u = eval<T>(n.args[0], x);
        if (n.c == std::floor(n.c) && std::fabs(n.c) <= 64.0) {
            T r(1);
            T b = n.c < 0 ? T(1) / u : u;
            for (int i = 0; i < static_cast<int>(std::fabs(n.c)); ++i)
                r *= b;
            return r;
        }
        return pow(u, T(n.c));
    }
    case Op::exp: return exp(eval<T>(n.args[0], x));
    case Op::log: return log(eval<T>(n.args[0], x));
    case Op::ml: return T(ml_eval(n.ml, static_cast<double>(eval<T>(n.args[0], x))));
    case Op::deriv: {
        Jet<T> j = taylor<T>(n.args[0], x, T(1), n.order);
        T f(1);
        for (int i = 2; i <= n.order; ++i)
            f *= T(double(i));
        return j.v[n.order] * f;
    }
    }
    return T(0);
}

// ---------------------------------------------------------------------------
// Finite sums of c (x - a)^e.

struct PowTerm {
    double c;
    double e;
};
using PowerSum = std::vector<PowTerm>;

inline void normalize(PowerSum& s)
{
    std::sort(s.begin(), s.end(), [](const PowTerm& l, const PowTerm& r) { return l.e < r.e; });
    PowerSum out;
    for (const auto& t : s) {
        if (!out.empty() && std::fabs(out.back().e - t.e) <= 1e-14 * std::max(1.0, std::fabs(t.e)))
            out.back().c += t.c;
        else
            out.push_back(t);
    }
    s.clear();
    for (const auto& t : out)
        if (t.c != 0.0)
            s.push_back(t);
}

inline PowerSum ps_mul(const PowerSum& a, const PowerSum& b)
{
    PowerSum r;
    for (const auto& x : a)
        for (const auto& y : b)
            r.push_back({x.c * y.c, x.e + y.e});
    normalize(r);
    return r;
}

inline std::optional<PowerSum> power_sum(const Expr& e, double a)
{
    const Node& n = e.node();
    constexpr std::size_t cap = 256;
    auto constant_of = [](const PowerSum& s) -> std::optional<double> {
        if (s.empty())
            return 0.0;
        if (s.size() == 1 && s[0].e == 0.0)
            return s[0].c;
        return std::nullopt;
    };
    switch (n.op) {
    case Op::constant: {
        PowerSum s;
        if (n.c != 0.0)
            s.push_back({n.c, 0.0});
        return s;
    }
    case Op::var: {
        PowerSum s{{1.0, 1.0}};
        if (a != 0.0)
            s.push_back({a, 0.0});
        normalize(s);
        return s;
    }
    case Op::add: {
        PowerSum s;
        for (const auto& t : n.args) {
            auto p = power_sum(t, a);
            if (!p)
                return std::nullopt;
            s.insert(s.end(), p->begin(), p->end());
        }
        normalize(s);
        return s;
    }
    case Op::mul: {
        PowerSum s{{1.0, 0.0}};
        for (const auto& t : n.args) {
            auto p = power_sum(t, a);
            if (!p)
                return std::nullopt;
            s = ps_mul(s, *p);
            if (s.size() > cap)
                return std::nullopt;
        }
        return s;
    }
    case Op::pow: {
        auto p = power_sum(n.args[0], a);
        if (!p)
            return std::nullopt;
        double al = n.c;
        if (p->empty())
            return al > 0 ? std::optional<PowerSum>(PowerSum{}) : std::nullopt;
        if (p->size() == 1) {
            double c = (*p)[0].c;
            if (c < 0.0 && al != std::floor(al))
                return std::nullopt;
            return PowerSum{{std::pow(c, al), (*p)[0].e * al}};
        }
        if (al == std::floor(al) && al >= 2.0 && al <= 16.0) {
            PowerSum s{{1.0, 0.0}};
            for (int i = 0; i < static_cast<int>(al); ++i) {
                s = ps_mul(s, *p);
                if (s.size() > cap)
                    return std::nullopt;
            }
            return s;
        }
        return std::nullopt;
    }
    case Op::exp:
    case Op::log:
    case Op::ml: {
        auto p = power_sum(n.args[0], a);
        if (!p)
            return std::nullopt;
        auto c = constant_of(*p);
        if (!c)
            return std::nullopt;
        double v = eval<double>(e, 0.0);
        PowerSum s;
        if (v != 0.0)
            s.push_back({v, 0.0});
        return s;
    }
    case Op::deriv: {
        auto p = power_sum(n.args[0], a);
        if (!p)
            return std::nullopt;
        PowerSum s;
        for (const auto& t : *p)
            s.push_back({t.c * pochhammer(t.e, n.order, Direction::falling), t.e - n.order});
        normalize(s);
        return s;
    }
    }
    return std::nullopt;
}

inline bool affine_coefficients(const Expr& g, double& slope)
{
    auto p = power_sum(g, 0.0);
    if (!p)
        return false;
    slope = 0.0;
    for (const auto& t : *p) {
        if (t.e == 1.0)
            slope = t.c;
        else if (t.e != 0.0)
            return false;
    }
    return true;
}

} // namespace adcons
