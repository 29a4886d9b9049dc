#pragma once

#include <adcons/cmcheck.hpp>
#include <adcons/config.hpp>
#include <adcons/consistency.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>

namespace adcons {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* report_version = "1.0";

namespace detail {

inline void format_double(std::string& out, double v)
{
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    // keep floats recognizable as floats
    std::string_view s(buf);
    if (s.find_first_of(".eE") == std::string_view::npos)
        out += ".0";
}

inline void dump_rec(std::string& out, const ordered_json& j, int indent, int depth)
{
    auto pad = [&](int d) {
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case ordered_json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            pad(depth + 1);
            out += ordered_json(it.key()).dump();
            out += ": ";
            dump_rec(out, it.value(), indent, depth + 1);
        }
        pad(depth);
        out += '}';
        return;
    }
    case ordered_json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first)
                out += ',';
            first = false;
            pad(depth + 1);
            dump_rec(out, e, indent, depth + 1);
        }
        pad(depth);
        out += ']';
        return;
    }
    case ordered_json::value_t::number_float: format_double(out, j.get<double>()); return;
    default: out += j.dump(); return;
    }
}

} // namespace detail

// Stable serialization: insertion-ordered keys, floats at 17 significant digits.
inline std::string dump_json(const ordered_json& j, int indent = 2)
{
    std::string out;
    detail::dump_rec(out, j, indent, 0);
    out += '\n';
    return out;
}

inline ordered_json config_json(const Config& c)
{
    ordered_json j;
    j["eps_ml"] = c.eps_ml;
    j["eps_abs"] = c.eps_abs;
    j["eps_fail"] = c.eps_fail;
    j["quad_tol"] = c.quad_tol;
    j["ml_max_terms"] = c.ml_max_terms;
    j["z_switch"] = c.z_switch;
    j["jacobi_nodes"] = c.jacobi_nodes;
    j["quad_max_depth"] = c.quad_max_depth;
    j["cm_order_cap"] = c.cm_order_cap;
    j["pw_order_cap"] = c.pw_order_cap;
    j["coeff_order_cap"] = c.coeff_order_cap;
    return j;
}

inline ordered_json config_json(const VerdictOptions& o)
{
    ordered_json j = config_json(o.cfg);
    j["orders"] = o.orders;
    j["k_max"] = o.k_max;
    j["grid"] = o.grid.str();
    j["psi_count"] = o.psi_count;
    return j;
}

inline ordered_json witness_json(const std::string& type, const Witness& w)
{
    ordered_json j;
    j["type"] = type;
    j["n"] = w.order;
    j["x"] = w.x;
    j["value"] = w.value;
    return j;
}

inline ordered_json cm_json(const CMVerdict& v, const std::string& witness_type)
{
    ordered_json j;
    j["status"] = to_string(v.status);
    j["max_order_checked"] = v.max_order_checked;
    j["min_margin"] = v.min_margin;
    j["witness"] = v.witness ? witness_json(witness_type, *v.witness) : ordered_json(nullptr);
    if (!v.note.empty())
        j["note"] = v.note;
    return j;
}

inline ordered_json model_json(const SeparableAD& ad)
{
    ordered_json r;
    const RadialModel& m = ad.R;
    r["kind"] = to_string(m.kind);
    switch (m.kind) {
    case RadialKind::constant: r["beta"] = m.beta; break;
    case RadialKind::general:
        r["beta1"] = m.beta1;
        r["beta2"] = m.beta2;
        r["s"] = m.s;
        r["ra"] = m.ra;
        break;
    case RadialKind::custom: r["expr"] = to_string(m.f); break;
    }
    ordered_json j;
    j["radial"] = r;
    j["potential"] = {{"expr", to_string(ad.P)}, {"psi_max", ad.Psi_max}};
    j["e0"] = ad.E0;
    return j;
}

inline ordered_json report_json(const ConsistencyReport& rep, const SeparableAD& ad,
                                const VerdictOptions& opt, const ordered_json& timings = ordered_json::object())
{
    ordered_json j;
    j["version"] = report_version;
    ordered_json cfg = config_json(opt);
    cfg["model"] = model_json(ad);
    j["config"] = cfg;
    j["verdict"] = to_string(rep.verdict);

    ordered_json nec;
    nec["beta0"] = rep.beta0;
    if (rep.necessary_radial) {
        const RadialCheck& rc = *rep.necessary_radial;
        ordered_json r = cm_json(rc.combined, rc.witness_type.empty() ? "radial" : rc.witness_type);
        r["rn"] = cm_json(rc.rn, "radial");
        r["laplace"] = cm_json(rc.laplace, "radial_laplace");
        nec["radial"] = r;
    }
    else {
        nec["radial"] = nullptr;
    }
    ordered_json pots = ordered_json::array();
    for (const auto& pc : rep.necessary_potential) {
        ordered_json p;
        p["mu"] = pc.mu;
        p["status"] = to_string(pc.verdict.status);
        p["min_margin"] = pc.verdict.min_margin;
        if (pc.verdict.witness) {
            ordered_json w;
            w["type"] = "potential";
            w["mu"] = pc.mu;
            w["x"] = pc.verdict.witness->x;
            w["value"] = pc.verdict.witness->value;
            p["witness"] = w;
        }
        else {
            p["witness"] = nullptr;
        }
        pots.push_back(p);
    }
    nec["potential"] = pots;
    j["necessary"] = nec;

    if (rep.sufficient) {
        const SufficientCheck& s = *rep.sufficient;
        ordered_json sj;
        sj["lambda"] = s.lambda;
        sj["radial_ok"] = s.radial_ok;
        sj["radial_basis"] = s.radial_basis;
        sj["potential_ok"] = s.potential_ok;
        sj["boundary_ok"] = s.boundary_ok;
        if (s.boundary_order)
            sj["boundary_order"] = *s.boundary_order;
        if (s.potential_witness)
            sj["potential_witness"] = witness_json("potential", *s.potential_witness);
        if (s.radial_witness)
            sj["radial_witness"] = witness_json("radial_sufficient", *s.radial_witness);
        j["sufficient"] = sj;
    }
    else {
        j["sufficient"] = nullptr;
    }
    j["caveats"] = rep.caveats;
    j["timings"] = timings;
    return j;
}

} // namespace adcons
