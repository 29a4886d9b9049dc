#pragma once

#include <adcons/admodels.hpp>
#include <adcons/cmcheck.hpp>
#include <adcons/config.hpp>
#include <adcons/expr.hpp>
#include <adcons/fracops.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace adcons {

// N(Psi, r^2) = P(Psi) R(r^2)
struct SeparableAD {
    Expr P;
    RadialModel R;
    double E0 = 0.0;
    double Psi_max = 1.0;

    void validate() const
    {
        if (!std::isfinite(E0))
            throw DomainError("E0 must be finite");
        if (!(Psi_max > 0.0) || !std::isfinite(Psi_max))
            throw DomainError("Psi_max must be positive");
        if (!(Psi_max > E0))
            throw DomainError("Psi_max must exceed E0");
    }
};

enum class Verdict { consistent, inconsistent, inconclusive };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct RadialCheck {
    CMVerdict combined;
    CMVerdict rn;      // R_(n)(x) >= 0
    CMVerdict laplace; // w^{-1} R(1/w) completely monotonic; witness x holds w
    std::string witness_type;
};

struct PotentialCheck {
    double mu = 0.0;
    CMVerdict verdict; // witness x holds Psi
};

struct SufficientCheck {
    double lambda = 0.0;
    bool radial_ok = false;
    bool potential_ok = false;
    bool boundary_ok = false;
    std::string radial_basis;
    std::optional<Witness> potential_witness;
    std::optional<int> boundary_order;
    std::optional<Witness> radial_witness;
};

struct ConsistencyReport {
    Verdict verdict = Verdict::inconclusive;
    double beta0 = 0.0;
    std::optional<RadialCheck> necessary_radial;
    std::vector<PotentialCheck> necessary_potential;
    std::optional<SufficientCheck> sufficient;
    std::vector<std::string> caveats;
};

struct VerdictOptions {
    int orders = 8;
    int k_max = 4;
    Grid grid;
    int psi_count = 64;
    Config cfg;
};

namespace detail {

inline Config fail_config(const Config& cfg)
{
    Config c = cfg;
    c.eps_abs = cfg.eps_fail;
    return c;
}

inline void add_caveat(std::vector<std::string>& c, const std::string& s)
{
    if (std::find(c.begin(), c.end(), s) == c.end())
        c.push_back(s);
}

} // namespace detail

// Points in (E0, Psi_max]: half log-spaced toward E0, half linear.
inline std::vector<double> psi_grid(double E0, double Psi_max, int count = 64)
{
    if (count < 2)
        throw DomainError("psi grid needs at least two points");
    double span = Psi_max - E0;
    std::vector<double> u;
    int nl = count / 2;
    int nn = count - nl;
    for (int i = 0; i < nl; ++i)
        u.push_back(std::exp(std::log(1e-4) * (1.0 - double(i) / nl)));
    for (int i = 1; i <= nn; ++i)
        u.push_back(double(i) / nn);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    std::vector<double> p;
    for (double v : u)
        p.push_back(E0 + span * v);
    p.back() = Psi_max;
    return p;
}

// lim_{x->0} beta(x); custom radial parts use Aitken extrapolation over three scales.
inline double beta0(const RadialModel& m, bool* estimated = nullptr)
{
    if (estimated)
        *estimated = m.kind == RadialKind::custom;
    switch (m.kind) {
    case RadialKind::constant: return m.beta;
    case RadialKind::general: return m.beta1;
    case RadialKind::custom: {
        double b1 = beta_profile(m, std::sqrt(1e-3));
        double b2 = beta_profile(m, std::sqrt(1e-4));
        double b3 = beta_profile(m, std::sqrt(1e-5));
        double d1 = b2 - b1, d2 = b3 - b2;
        double den = d2 - d1;
        if (!std::isfinite(b3))
            throw DomainError("beta0: radial part not evaluable near the origin");
        if (std::fabs(den) <= 1e-14 * (std::fabs(b3) + 1.0) || std::fabs(d2) <= 1e-14)
            return b3;
        double r = b3 - d2 * d2 / den;
        if (!std::isfinite(r))
            return b3;
        double snapped = std::round(r * 1e6) / 1e6;
        return std::fabs(r - snapped) < 1e-7 ? snapped : r;
    }
    }
    return 0.0;
}

// R_(n) >= 0 on the grid for n <= n_max, and w^{-1}R(1/w) cm to order n_max.
inline RadialCheck necessary_radial(const RadialModel& m, int n_max, const std::vector<double>& grid,
                                    const Config& cfg = default_config())
{
    RadialCheck rc;
    CMVerdict& rn = rc.rn;
    rn.max_order_checked = n_max;
    double worst = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_max && !rn.witness; ++n) {
        for (double x : grid) {
            RnValue v = R_n_detailed(m, n, x, cfg);
            if (!std::isfinite(v.value)) {
                rn.status = CMStatus::inconclusive;
                rn.note = "non-finite R_(n) on the grid";
                continue;
            }
            double rel = v.magnitude > 0.0 ? v.value / v.magnitude : 0.0;
            rn.min_margin = std::min(rn.min_margin, rel);
            if (v.value < -cfg.eps_fail * v.magnitude && rel < worst) {
                worst = rel;
                rn.witness = Witness{n, x, v.value};
            }
        }
    }
    if (rn.witness)
        rn.status = CMStatus::fail;

    rc.laplace = cm_test(R_laplace_expr(m), n_max, grid, detail::fail_config(cfg));

    rc.combined.max_order_checked = n_max;
    rc.combined.min_margin = std::min(rn.min_margin, rc.laplace.min_margin);
    if (rc.laplace.status == CMStatus::fail) {
        rc.combined.status = CMStatus::fail;
        rc.combined.witness = rc.laplace.witness;
        rc.witness_type = "radial_laplace";
    }
    else if (rn.status == CMStatus::fail) {
        rc.combined.status = CMStatus::fail;
        rc.combined.witness = rn.witness;
        rc.witness_type = "radial";
    }
    else if (rn.status == CMStatus::inconclusive || rc.laplace.status == CMStatus::inconclusive) {
        rc.combined.status = CMStatus::inconclusive;
    }
    return rc;
}

inline std::vector<double> potential_orders(double b0)
{
    double end = std::max(0.5, 1.5 - b0);
    std::vector<double> mus;
    for (int i = 0; 0.25 * i < end - 1e-12; ++i)
        mus.push_back(0.25 * i);
    mus.push_back(end);
    return mus;
}

// D^mu P >= 0 for mu in quarter steps up to 3/2 - beta0.
inline std::vector<PotentialCheck> necessary_potential(const SeparableAD& ad, double b0,
                                                       const std::vector<double>& psi,
                                                       const Config& cfg = default_config())
{
    std::vector<PotentialCheck> out;
    for (double mu : potential_orders(b0)) {
        PotentialCheck pc;
        pc.mu = mu;
        pc.verdict.max_order_checked = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (double x : psi) {
            FracValue fv;
            try {
                fv = rl_signed_detailed(ad.P, ad.E0, -mu, x, cfg);
            }
            catch (const BoundarySingularity& e) {
                throw BoundarySingularity("mu=" + format_number(mu) + ": " + e.what());
            }
            catch (const QuadratureFailure& e) {
                throw QuadratureFailure("mu=" + format_number(mu) + ": " + e.what());
            }
            if (!std::isfinite(fv.value)) {
                pc.verdict.status = CMStatus::inconclusive;
                pc.verdict.note = "non-finite derivative";
                continue;
            }
            double rel = fv.magnitude > 0.0 ? fv.value / fv.magnitude : 0.0;
            pc.verdict.min_margin = std::min(pc.verdict.min_margin, rel);
            if (fv.value < -cfg.eps_fail * fv.magnitude && rel < worst) {
                worst = rel;
                pc.verdict.witness = Witness{0, x, fv.value};
            }
        }
        if (pc.verdict.witness)
            pc.verdict.status = CMStatus::fail;
        out.push_back(pc);
    }
    return out;
}

struct Threshold {
    double lambda = 0.0;
    std::string basis;
};

// Smallest lambda for which the radial sufficiency condition is proven.
inline std::optional<Threshold> sufficiency_threshold(const RadialModel& m)
{
    switch (m.kind) {
    case RadialKind::constant: return Threshold{1.5 - m.beta, "constant_beta"};
    case RadialKind::general: {
        if (m.s > 1.0)
            return std::nullopt;
        if (m.beta1 <= m.beta2)
            return Threshold{1.5 - m.beta1, "beta1_le_beta2"};
        if (m.beta2 <= 1.0 - m.s)
            return Threshold{1.5 - m.beta2, "beta2_le_1_minus_s"};
        return Threshold{1.5 - (m.beta1 - m.s), "restrictive_threshold"};
    }
    case RadialKind::custom: return std::nullopt;
    }
    return std::nullopt;
}

struct PotentialSufficiency {
    bool ok = false;
    bool derivative_ok = false;
    bool boundary_ok = false;
    std::optional<Witness> witness;
    std::optional<int> boundary_order;
};

namespace detail {

// P^{(k)}(0) for k = 0..kmax; non-finite entries mean the limit does not exist.
inline std::vector<double> boundary_derivatives(const Expr& P, int kmax)
{
    std::vector<double> d(kmax + 1, 0.0);
    if (auto ps = power_sum(P, 0.0)) {
        for (int k = 0; k <= kmax; ++k) {
            for (const auto& t : *ps) {
                bool poly = t.e >= 0.0 && t.e == std::floor(t.e);
                if (poly && t.e < k)
                    continue;
                if (t.e > k)
                    continue;
                if (t.e == k) {
                    double f = 1.0;
                    for (int j = 2; j <= k; ++j)
                        f *= j;
                    d[k] += t.c * f;
                }
                else {
                    d[k] = std::numeric_limits<double>::infinity();
                }
            }
        }
        return d;
    }
    return derivatives(P, 0.0, kmax);
}

} // namespace detail

// D^lambda P >= 0 on the grid and P(0) = ... = P^{(floor(lambda)-1)}(0) = 0.
inline PotentialSufficiency sufficient_potential(const Expr& P, double lambda,
                                                 const std::vector<double>& psi,
                                                 const Config& cfg = default_config())
{
    if (lambda < 0.0)
        throw DomainError("sufficient_potential: negative lambda");
    PotentialSufficiency r;
    r.boundary_ok = true;
    int kmax = static_cast<int>(std::floor(lambda)) - 1;
    if (kmax >= 0) {
        std::vector<double> b = detail::boundary_derivatives(P, kmax);
        for (int k = 0; k <= kmax; ++k) {
            if (!std::isfinite(b[k]) || std::fabs(b[k]) > cfg.eps_abs) {
                r.boundary_ok = false;
                r.boundary_order = k;
                break;
            }
        }
    }
    r.derivative_ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double x : psi) {
        FracValue fv = rl_signed_detailed(P, 0.0, -lambda, x, cfg);
        double rel = fv.magnitude > 0.0 ? fv.value / fv.magnitude : 0.0;
        if (!std::isfinite(fv.value) || (fv.value < -cfg.eps_fail * fv.magnitude && rel < worst)) {
            worst = rel;
            r.derivative_ok = false;
            r.witness = Witness{0, x, fv.value};
        }
    }
    r.ok = r.derivative_ok && r.boundary_ok;
    return r;
}

struct RadialSufficiency {
    bool ok = false;
    std::optional<int> failed_k;
    std::optional<Witness> witness;
};

// x^{3/2-lambda} R_(k)(x) cm to order n_max for every k <= k_max.
inline RadialSufficiency sufficient_radial(const RadialModel& m, double lambda, int k_max, int n_max,
                                           const std::vector<double>& grid,
                                           const Config& cfg = default_config())
{
    RadialSufficiency r;
    r.ok = true;
    for (int k = 0; k <= k_max; ++k) {
        Expr e = pow(var(), 1.5 - lambda) * R_n_expr(m, k, cfg);
        CMVerdict v = cm_test(e, n_max, grid, detail::fail_config(cfg));
        if (v.status != CMStatus::pass) {
            r.ok = false;
            r.failed_k = k;
            r.witness = v.witness;
            break;
        }
    }
    return r;
}

inline ConsistencyReport verdict(const SeparableAD& ad, const VerdictOptions& opt = {})
{
    ad.validate();
    const Config& cfg = opt.cfg;
    ConsistencyReport rep;
    std::vector<double> grid = opt.grid.points();
    std::vector<double> psi = psi_grid(ad.E0, ad.Psi_max, opt.psi_count);
    bool failed = false;
    bool errored = false;

    detail::add_caveat(rep.caveats, "finite_order_cm: derivative signs checked to order " +
                                        std::to_string(opt.orders) + " on the sampled grid");
    if (ad.R.regime == Regime::unresolved && ad.R.kind == RadialKind::general)
        detail::add_caveat(rep.caveats, "s_gt_1_unresolved: no closed-form criteria for s > 1");

    try {
        rep.necessary_radial = necessary_radial(ad.R, opt.orders, grid, cfg);
        if (rep.necessary_radial->combined.status == CMStatus::fail)
            failed = true;
        else if (rep.necessary_radial->combined.status == CMStatus::inconclusive)
            errored = true;
        if (rep.necessary_radial->combined.min_margin < 0.0 && !failed)
            detail::add_caveat(rep.caveats, "near_zero_margin: radial");
    }
    catch (const Error& e) {
        errored = true;
        detail::add_caveat(rep.caveats, std::string("necessary_radial_error: ") + e.what());
    }

    bool estimated = false;
    try {
        rep.beta0 = beta0(ad.R, &estimated);
        if (estimated)
            detail::add_caveat(rep.caveats, "beta0_estimated: extrapolated from -dlogR/dlogx near 0");
        rep.necessary_potential = necessary_potential(ad, rep.beta0, psi, cfg);
        for (const auto& pc : rep.necessary_potential) {
            if (pc.verdict.status == CMStatus::fail)
                failed = true;
            else if (pc.verdict.status == CMStatus::inconclusive)
                errored = true;
            else if (pc.verdict.min_margin < 0.0)
                detail::add_caveat(rep.caveats, "near_zero_margin: potential");
        }
    }
    catch (const Error& e) {
        errored = true;
        detail::add_caveat(rep.caveats, std::string("necessary_potential_error: ") + e.what());
    }

    if (failed) {
        rep.verdict = Verdict::inconsistent;
        return rep;
    }
    if (ad.E0 != 0.0) {
        detail::add_caveat(rep.caveats, "sufficiency_requires_E0_zero");
        rep.verdict = Verdict::inconclusive;
        return rep;
    }

    try {
        SufficientCheck sc;
        std::optional<Threshold> th = sufficiency_threshold(ad.R);
        if (th) {
            sc.lambda = th->lambda;
            sc.radial_ok = true;
            sc.radial_basis = th->basis;
            if (th->basis == "restrictive_threshold")
                detail::add_caveat(rep.caveats,
                                   "conjectured_regime: 1-s < beta2 < beta1 < 1 uses the restrictive "
                                   "proven threshold");
        }
        else if (ad.R.kind == RadialKind::custom) {
            detail::add_caveat(rep.caveats,
                               "custom_radial: radial sufficiency checked numerically to finite order");
            sc.radial_basis = "numerical";
            double start = std::max(0.5, 1.5 - rep.beta0);
            for (int j = 0; j <= 8; ++j) {
                double lam = start + 0.25 * j;
                RadialSufficiency rs = sufficient_radial(ad.R, lam, opt.k_max, opt.orders, grid, cfg);
                if (rs.ok) {
                    sc.lambda = lam;
                    sc.radial_ok = true;
                    break;
                }
                sc.lambda = lam;
                sc.radial_witness = rs.witness;
            }
        }
        if (th || ad.R.kind == RadialKind::custom) {
            if (sc.radial_ok) {
                PotentialSufficiency ps = sufficient_potential(ad.P, sc.lambda, psi, cfg);
                sc.potential_ok = ps.derivative_ok;
                sc.boundary_ok = ps.boundary_ok;
                sc.potential_witness = ps.witness;
                sc.boundary_order = ps.boundary_order;
            }
            rep.sufficient = sc;
            if (sc.radial_ok && sc.potential_ok && sc.boundary_ok && !errored) {
                rep.verdict = Verdict::consistent;
                return rep;
            }
        }
    }
    catch (const Error& e) {
        detail::add_caveat(rep.caveats, std::string("sufficiency_error: ") + e.what());
    }
    detail::add_caveat(rep.caveats, "sufficiency_not_established");
    rep.verdict = Verdict::inconclusive;
    return rep;
}

} // namespace adcons
