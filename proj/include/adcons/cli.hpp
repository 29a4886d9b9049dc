#pragma once

#include <adcons/admodels.hpp>
#include <adcons/cmcheck.hpp>
#include <adcons/config.hpp>
#include <adcons/consistency.hpp>
#include <adcons/dfinversion.hpp>
#include <adcons/fracops.hpp>
#include <adcons/parse.hpp>
#include <adcons/report.hpp>
#include <adcons/specfun.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace adcons::cli {

enum ExitCode { ok = 0, input_error = 2, numerical_failure = 3 };

struct InputError : Error {
    using Error::Error;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                           const std::string& where)
{
    if (!j.is_object())
        throw InputError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw InputError(where + ": unknown key '" + it.key() + "'");
}

inline double number(const nlohmann::json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key))
        throw InputError(where + ": missing '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number())
        throw InputError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::string text(const nlohmann::json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key))
        throw InputError(where + ": missing '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_string())
        throw InputError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Temp file in the target directory, then rename over the destination.
inline void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    fs::path dst(path);
    fs::path tmp = dst;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out)
            throw InputError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, dst, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InputError("cannot rename onto '" + path + "'");
    }
}

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        }
        catch (const std::logic_error&) {
            throw InputError(what + ": bad number '" + item + "'");
        }
        if (used != item.size())
            throw InputError(what + ": bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw InputError(what + ": empty list");
    return out;
}

} // namespace detail

// {"radial": {...}, "potential": {"expr": ..., "psi_max": ...}, "e0": ...}
inline SeparableAD parse_model(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("malformed model JSON: ") + e.what());
    }
    detail::reject_unknown(j, {"radial", "potential", "e0"}, "model");
    if (!j.contains("radial") || !j.contains("potential"))
        throw InputError("model: needs 'radial' and 'potential'");

    const auto& r = j.at("radial");
    if (!r.is_object())
        throw InputError("model.radial: expected an object");
    std::string kind = detail::text(r, "kind", "model.radial");
    SeparableAD ad;
    try {
        if (kind == "constant") {
            detail::reject_unknown(r, {"kind", "beta"}, "model.radial");
            ad.R = RadialModel::constant_beta(detail::number(r, "beta", "model.radial"));
        }
        else if (kind == "general") {
            detail::reject_unknown(r, {"kind", "beta1", "beta2", "s", "ra"}, "model.radial");
            double ra = r.contains("ra") ? detail::number(r, "ra", "model.radial") : 1.0;
            ad.R = RadialModel::general(detail::number(r, "beta1", "model.radial"),
                                        detail::number(r, "beta2", "model.radial"),
                                        detail::number(r, "s", "model.radial"), ra);
        }
        else if (kind == "custom") {
            detail::reject_unknown(r, {"kind", "expr"}, "model.radial");
            ad.R = RadialModel::custom(parse_expr(detail::text(r, "expr", "model.radial")));
        }
        else {
            throw InputError("model.radial.kind: expected constant, general or custom");
        }

        const auto& p = j.at("potential");
        detail::reject_unknown(p, {"expr", "psi_max"}, "model.potential");
        ad.P = parse_expr(detail::text(p, "expr", "model.potential"));
        ad.Psi_max = p.contains("psi_max") ? detail::number(p, "psi_max", "model.potential") : 1.0;
        ad.E0 = j.contains("e0") ? detail::number(j, "e0", "model") : 0.0;
        ad.validate();
    }
    catch (const DomainError& e) {
        throw InputError(e.what());
    }
    return ad;
}

namespace detail {

struct Common {
    std::string out_path;
    std::string format = "json";
    double tol_abs = 0.0;
    double tol_fail = 0.0;
    double quad_tol = 0.0;

    void add(CLI::App* app, bool csv_default = false)
    {
        if (csv_default)
            format = "csv";
        app->add_option("--out", out_path, "Output path (default: standard output)");
        app->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        app->add_option("--tol-abs", tol_abs, "Absolute sign tolerance")->check(CLI::PositiveNumber);
        app->add_option("--tol-fail", tol_fail, "Failure threshold for necessary checks")
            ->check(CLI::PositiveNumber);
        app->add_option("--quad-tol", quad_tol, "Quadrature tolerance")->check(CLI::PositiveNumber);
    }

    Config config() const
    {
        Config c;
        if (tol_abs > 0.0)
            c.eps_abs = tol_abs;
        if (tol_fail > 0.0)
            c.eps_fail = tol_fail;
        if (quad_tol > 0.0)
            c.quad_tol = quad_tol;
        return c;
    }

    void emit(std::ostream& out, const std::string& content) const
    {
        if (out_path.empty())
            out << content;
        else
            write_atomic(out_path, content);
    }
};

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Phase-space consistency checks for separable augmented densities", "adcons"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(report_version));

    // check consistency | check cm
    auto* check = app.add_subcommand("check", "Consistency and complete-monotonicity checks");
    check->require_subcommand(1);

    auto* cons = check->add_subcommand("consistency", "Verdict for a separable AD model");
    detail::Common cons_common;
    std::string model_path;
    std::string grid_text;
    int orders = 8;
    int k_max = 4;
    bool timings = false;
    cons->add_option("--model", model_path, "Model JSON")->required();
    cons->add_option("--orders", orders, "Highest derivative order")->check(CLI::Range(0, 16));
    cons->add_option("--k-max", k_max, "Highest R_(k) in radial sufficiency")->check(CLI::Range(0, 16));
    cons->add_option("--grid", grid_text, "MIN:MAX:COUNT[:log|linear]");
    cons->add_flag("--timings", timings, "Record wall-clock timings (breaks byte-identity)");
    cons_common.add(cons);

    auto* cm = check->add_subcommand("cm", "Finite-order complete-monotonicity test");
    detail::Common cm_common;
    std::string cm_expr;
    int cm_order = 8;
    std::string cm_grid;
    cm->add_option("--expr", cm_expr, "Expression in x")->required();
    cm->add_option("--order", cm_order, "Highest derivative order")->check(CLI::Range(0, 16));
    cm->add_option("--grid", cm_grid, "MIN:MAX:COUNT[:log|linear]");
    cm_common.add(cm);

    // eval ml | frd | rli
    auto* ev = app.add_subcommand("eval", "Evaluate special functions and fractional operators");
    ev->require_subcommand(1);
    auto* ml = ev->add_subcommand("ml", "Generalized Mittag-Leffler function");
    MLSpec sp;
    double z = 0.0;
    int ml_deriv = -1;
    ml->add_option("--lam", sp.lambda, "lambda")->required();
    ml->add_option("--p", sp.p, "p")->required();
    ml->add_option("--b", sp.b, "b")->required();
    ml->add_option("--z", z, "argument")->required();
    ml->add_option("--deriv", ml_deriv, "n-th derivative of w -> E(-w) at w = -z")->check(CLI::NonNegativeNumber);

    auto* frd = ev->add_subcommand("frd", "Riemann-Liouville fractional derivative");
    auto* rli = ev->add_subcommand("rli", "Riemann-Liouville fractional integral");
    std::string op_expr;
    double op_order = 0.0, op_x = 0.0, op_a = 0.0;
    bool op_quad = false;
    for (auto* sc : {frd, rli}) {
        sc->add_option("--expr", op_expr, "Expression in x")->required();
        sc->add_option("--order", op_order, "Order")->required()->check(CLI::NonNegativeNumber);
        sc->add_option("--x", op_x, "Evaluation point")->required();
        sc->add_option("--a", op_a, "Lower terminal");
        sc->add_flag("--quadrature", op_quad, "Skip the closed-form power rule");
    }

    // invert
    auto* inv = app.add_subcommand("invert", "Constant-beta df by generalized Eddington inversion");
    detail::Common inv_common;
    std::string inv_model;
    std::string inv_grid;
    double inv_beta = std::numeric_limits<double>::quiet_NaN();
    inv->add_option("--model", inv_model, "Model JSON")->required();
    inv->add_option("--beta", inv_beta, "Anisotropy (default: the model's constant beta)");
    inv->add_option("--grid", inv_grid, "MIN:MAX:COUNT[:log|linear] in E");
    inv_common.add(inv, true);

    // moments
    auto* mom = app.add_subcommand("moments", "Moment sequence F_mu along K = 0");
    detail::Common mom_common;
    std::string mom_model, mu_list, at;
    mom->add_option("--model", mom_model, "Model JSON")->required();
    mom->add_option("--mu-list", mu_list, "Comma-separated mu values")->required();
    mom->add_option("--at", at, "Psi,x")->required();
    mom_common.add(mom, true);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    }
    catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    }
    catch (const CLI::CallForVersion&) {
        out << report_version << '\n';
        return ok;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }

    try {
        if (*cons) {
            SeparableAD ad = parse_model(detail::read_file(model_path));
            VerdictOptions opt;
            opt.orders = orders;
            opt.k_max = k_max;
            opt.cfg = cons_common.config();
            if (!grid_text.empty())
                opt.grid = Grid::parse(grid_text);
            auto t0 = std::chrono::steady_clock::now();
            ConsistencyReport rep = verdict(ad, opt);
            auto t1 = std::chrono::steady_clock::now();
            ordered_json tj = ordered_json::object();
            if (timings)
                tj["verdict_seconds"] = std::chrono::duration<double>(t1 - t0).count();
            if (cons_common.format == "json") {
                cons_common.emit(out, dump_json(report_json(rep, ad, opt, tj)));
            }
            else {
                std::string s = "check,order,status,witness_x,witness_value\n";
                auto row = [&](const std::string& name, double order, const CMVerdict& v) {
                    s += name + "," + detail::fmt(order) + "," + to_string(v.status) + ",";
                    if (v.witness)
                        s += detail::fmt(v.witness->x) + "," + detail::fmt(v.witness->value);
                    else
                        s += ",";
                    s += "\n";
                };
                if (rep.necessary_radial) {
                    const auto& rc = *rep.necessary_radial;
                    row("radial", rc.rn.witness ? rc.rn.witness->order : rc.rn.max_order_checked, rc.rn);
                    row("radial_laplace",
                        rc.laplace.witness ? rc.laplace.witness->order : rc.laplace.max_order_checked,
                        rc.laplace);
                }
                for (const auto& pc : rep.necessary_potential)
                    row("potential", pc.mu, pc.verdict);
                s += "verdict,," + std::string(to_string(rep.verdict)) + ",,\n";
                cons_common.emit(out, s);
            }
            return ok;
        }
        if (*cm) {
            Config cfg = cm_common.config();
            Grid g = cm_grid.empty() ? Grid{} : Grid::parse(cm_grid);
            Expr f = parse_expr(cm_expr);
            CMVerdict v = cm_test(f, cm_order, g.points(), cfg);
            if (cm_common.format == "json") {
                ordered_json j;
                j["version"] = report_version;
                ordered_json c = config_json(cfg);
                c["grid"] = g.str();
                c["expr"] = to_string(f);
                j["config"] = c;
                j["cm"] = cm_json(v, "cm");
                cm_common.emit(out, dump_json(j));
            }
            else {
                std::string s = "status,max_order_checked,witness_n,witness_x,witness_value\n";
                s += std::string(to_string(v.status)) + "," + std::to_string(v.max_order_checked) + ",";
                if (v.witness)
                    s += std::to_string(v.witness->order) + "," + detail::fmt(v.witness->x) + "," +
                         detail::fmt(v.witness->value);
                else
                    s += ",,";
                cm_common.emit(out, s + "\n");
            }
            return ok;
        }
        if (*ml) {
            double v = ml_deriv >= 0 ? ml_derivative(sp, -z, ml_deriv) : ml_eval(sp, z);
            out << detail::fmt(v) << '\n';
            return ok;
        }
        if (*frd || *rli) {
            Expr f = parse_expr(op_expr);
            FracMethod m = op_quad ? FracMethod::quadrature : FracMethod::automatic;
            double v = *frd ? frac_derivative(f, op_a, op_order, op_x, default_config(), m)
                            : rl_integral(f, op_a, op_order, op_x, default_config(), m);
            out << detail::fmt(v) << '\n';
            return ok;
        }
        if (*inv) {
            SeparableAD ad = parse_model(detail::read_file(inv_model));
            double beta = inv_beta;
            if (std::isnan(beta)) {
                if (ad.R.kind != RadialKind::constant)
                    throw InputError("invert: --beta required for non-constant radial parts");
                beta = ad.R.beta;
            }
            if (!(beta <= 1.0))
                throw InputError("invert: beta must be at most 1");
            Grid g{ad.E0 + (ad.Psi_max - ad.E0) / 100.0, ad.Psi_max, 100, false};
            if (!inv_grid.empty())
                g = Grid::parse(inv_grid);
            Config cfg = inv_common.config();
            std::vector<double> E = g.points();
            std::vector<double> gv;
            for (double e : E) {
                if (!(e > ad.E0) || e > ad.Psi_max)
                    throw InputError("invert: grid must lie in (E0, Psi_max]");
                gv.push_back(beta == 1.0 ? radial_orbit_invert(ad.P, e, ad.E0, cfg)
                                         : eddington_invert(ad.P, beta, e, ad.E0, cfg));
            }
            if (inv_common.format == "csv") {
                std::string s = "E,g\n";
                for (std::size_t i = 0; i < E.size(); ++i)
                    s += detail::fmt(E[i]) + "," + detail::fmt(gv[i]) + "\n";
                inv_common.emit(out, s);
            }
            else {
                ordered_json j;
                j["version"] = report_version;
                ordered_json c = config_json(cfg);
                c["beta"] = beta;
                c["grid"] = g.str();
                c["model"] = model_json(ad);
                j["config"] = c;
                j["E"] = E;
                j["g"] = gv;
                inv_common.emit(out, dump_json(j));
            }
            return ok;
        }
        if (*mom) {
            SeparableAD ad = parse_model(detail::read_file(mom_model));
            std::vector<double> mus = detail::parse_list(mu_list, "--mu-list");
            std::vector<double> px = detail::parse_list(at, "--at");
            if (px.size() != 2)
                throw InputError("--at expects Psi,x");
            Config cfg = mom_common.config();
            std::vector<double> F;
            for (double mu : mus)
                F.push_back(moment_F_mu(ad, mu, px[0], px[1], cfg));
            if (mom_common.format == "csv") {
                std::string s = "mu,F\n";
                for (std::size_t i = 0; i < mus.size(); ++i)
                    s += detail::fmt(mus[i]) + "," + detail::fmt(F[i]) + "\n";
                mom_common.emit(out, s);
            }
            else {
                ordered_json j;
                j["version"] = report_version;
                ordered_json c = config_json(cfg);
                c["psi"] = px[0];
                c["x"] = px[1];
                c["model"] = model_json(ad);
                j["config"] = c;
                j["mu"] = mus;
                j["F"] = F;
                mom_common.emit(out, dump_json(j));
            }
            return ok;
        }
    }
    catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
    err << "error: no command\n";
    return input_error;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

} // namespace adcons::cli
