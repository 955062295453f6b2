#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tmsurf/singular.hpp"

namespace tmsurf {

// Text description of a surface: either a [wdata] or a [nullcurves] block,
// plus the scan domain and numeric options. This is the on-disk contract for
// every CLI command; fixtures are emitted in the same format.
struct SurfaceSpec {
    struct WBlock {
        std::string g1, g2, w1, w2;
        double base_u = 0.0, base_v = 0.0;
        std::array<double, 3> f0{0.0, 0.0, 0.0};
    };
    struct CurveBlock {
        std::array<std::string, 3> phi, psi;
        bool derivative_form = false;
        double u_min = -1.0, u_max = 1.0, v_min = -1.0, v_max = 1.0;
        double base_u = 0.0, base_v = 0.0;
        std::array<double, 3> f0{0.0, 0.0, 0.0};
    };

    std::optional<WBlock> wdata;
    std::optional<CurveBlock> nullcurves;
    Domain domain;
    int grid_nu = 96, grid_nv = 96;
    int jet_order = 8;
    double quad_tol = 1e-10;

    static SurfaceSpec parse(const std::string& text);
    static SurfaceSpec load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrKind::Usage, "cannot open spec file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    std::string serialize() const;

    WData to_wdata() const {
        WData w;
        if (wdata) {
            w = WData(Expr::parse(wdata->g1), Expr::parse(wdata->g2), Expr::parse(wdata->w1),
                      Expr::parse(wdata->w2), wdata->base_u, wdata->base_v,
                      Vec3{wdata->f0[0], wdata->f0[1], wdata->f0[2]});
        } else if (nullcurves) {
            NullCurvePair p;
            for (int i = 0; i < 3; ++i) {
                p.phi[static_cast<std::size_t>(i)] = Expr::parse(nullcurves->phi[static_cast<std::size_t>(i)]);
                p.psi[static_cast<std::size_t>(i)] = Expr::parse(nullcurves->psi[static_cast<std::size_t>(i)]);
            }
            p.derivative_form = nullcurves->derivative_form;
            p.u_min = nullcurves->u_min;
            p.u_max = nullcurves->u_max;
            p.v_min = nullcurves->v_min;
            p.v_max = nullcurves->v_max;
            std::optional<Vec3> f0;
            if (nullcurves->derivative_form)
                f0 = Vec3{nullcurves->f0[0], nullcurves->f0[1], nullcurves->f0[2]};
            w = from_null_curves(p, nullcurves->base_u, nullcurves->base_v, f0);
        } else {
            throw Error(ErrKind::Parse, "spec has neither [wdata] nor [nullcurves]");
        }
        w.jet_order = jet_order;
        return w;
    }
};

namespace detail {

struct SpecValue {
    std::string raw;
    std::size_t offset = 0;

    double as_number() const {
        try {
            std::size_t pos = 0;
            double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ParseError(offset, "a number", "spec: expected a number, got '" + raw + "'");
        }
    }
    bool as_bool() const {
        if (raw == "true") return true;
        if (raw == "false") return false;
        throw ParseError(offset, "true or false", "spec: expected a boolean, got '" + raw + "'");
    }
};

struct SpecTable {
    std::map<std::string, std::vector<SpecValue>> entries; // key -> array of values
    std::size_t offset = 0;

    bool has(const std::string& k) const { return entries.count(k) != 0; }

    const std::vector<SpecValue>& get(const std::string& k, std::size_t n) const {
        auto it = entries.find(k);
        if (it == entries.end())
            throw ParseError(offset, "key '" + k + "'", "spec: missing key '" + k + "'");
        if (n != 0 && it->second.size() != n)
            throw ParseError(it->second.front().offset, std::to_string(n) + " values",
                             "spec: key '" + k + "' needs " + std::to_string(n) + " values");
        return it->second;
    }
};

// Values: quoted string, number, boolean, or a [v, v, ...] array of those.
inline std::vector<SpecValue> parse_spec_value(const std::string& s, std::size_t base,
                                               std::size_t off0) {
    std::vector<SpecValue> out;
    std::size_t i = 0;
    auto skip = [&] { while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i; };
    auto one = [&]() -> SpecValue {
        skip();
        const std::size_t voff = base + i;
        if (i < s.size() && s[i] == '"') {
            const std::size_t end = s.find('"', i + 1);
            if (end == std::string::npos)
                throw ParseError(voff, "closing '\"'", "spec: unterminated string");
            SpecValue v{s.substr(i + 1, end - i - 1), voff};
            i = end + 1;
            return v;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ',' && s[j] != ']' && s[j] != '#') ++j;
        std::size_t e = j;
        while (e > i && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
        SpecValue v{s.substr(i, e - i), voff};
        i = j;
        return v;
    };
    skip();
    if (i < s.size() && s[i] == '[') {
        ++i;
        for (;;) {
            skip();
            if (i < s.size() && s[i] == ']') {
                ++i;
                break;
            }
            out.push_back(one());
            skip();
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                break;
            }
            throw ParseError(base + i, "',' or ']'", "spec: malformed array");
        }
    } else {
        out.push_back(one());
        if (out.back().raw.empty())
            throw ParseError(off0, "a value", "spec: empty value");
    }
    return out;
}

inline std::map<std::string, SpecTable> parse_spec_tables(const std::string& text) {
    std::map<std::string, SpecTable> tables;
    std::string section;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        const std::size_t base = pos;
        pos = eol + 1;

        const std::size_t hash = line.find('#');
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        std::size_t b = 0, e = body.size();
        while (b < e && (body[b] == ' ' || body[b] == '\t')) ++b;
        while (e > b && (body[e - 1] == ' ' || body[e - 1] == '\t' || body[e - 1] == '\r')) --e;
        if (b == e) {
            if (pos > text.size()) break;
            continue;
        }
        body = body.substr(b, e - b);

        if (body.front() == '[' && body.back() == ']') {
            section = body.substr(1, body.size() - 2);
            tables[section].offset = base + b;
        } else {
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos)
                throw ParseError(base + b, "'key = value' or '[section]'",
                                 "spec: cannot parse line '" + body + "'");
            std::string key = body.substr(0, eq);
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
            if (section.empty())
                throw ParseError(base + b, "a '[section]' header", "spec: key outside any section");
            tables[section].entries[key] =
                parse_spec_value(body.substr(eq + 1), base + b + eq + 1, base + b);
        }
        if (pos > text.size()) break;
    }
    return tables;
}

inline std::string quote(const std::string& s) { return '"' + s + '"'; }

} // namespace detail

inline SurfaceSpec SurfaceSpec::parse(const std::string& text) {
    auto tables = detail::parse_spec_tables(text);
    SurfaceSpec spec;

    const bool has_w = tables.count("wdata") != 0;
    const bool has_c = tables.count("nullcurves") != 0;
    if (has_w == has_c)
        throw ParseError(0, "exactly one of [wdata] or [nullcurves]",
                         "spec: need exactly one of [wdata] or [nullcurves]");

    if (has_w) {
        const auto& t = tables.at("wdata");
        WBlock b;
        b.g1 = t.get("g1", 1)[0].raw;
        b.g2 = t.get("g2", 1)[0].raw;
        b.w1 = t.get("w1", 1)[0].raw;
        b.w2 = t.get("w2", 1)[0].raw;
        if (t.has("base")) {
            const auto& base = t.get("base", 2);
            b.base_u = base[0].as_number();
            b.base_v = base[1].as_number();
        }
        if (t.has("f0")) {
            const auto& f0 = t.get("f0", 3);
            for (int i = 0; i < 3; ++i) b.f0[static_cast<std::size_t>(i)] = f0[static_cast<std::size_t>(i)].as_number();
        }
        spec.wdata = std::move(b);
    } else {
        const auto& t = tables.at("nullcurves");
        CurveBlock b;
        const auto& phi = t.get("phi", 3);
        const auto& psi = t.get("psi", 3);
        for (int i = 0; i < 3; ++i) {
            b.phi[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i)].raw;
            b.psi[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(i)].raw;
        }
        if (t.has("derivative_form")) b.derivative_form = t.get("derivative_form", 1)[0].as_bool();
        if (t.has("u_range")) {
            const auto& r = t.get("u_range", 2);
            b.u_min = r[0].as_number();
            b.u_max = r[1].as_number();
        }
        if (t.has("v_range")) {
            const auto& r = t.get("v_range", 2);
            b.v_min = r[0].as_number();
            b.v_max = r[1].as_number();
        }
        if (t.has("base")) {
            const auto& base = t.get("base", 2);
            b.base_u = base[0].as_number();
            b.base_v = base[1].as_number();
        }
        if (t.has("f0")) {
            const auto& f0 = t.get("f0", 3);
            for (int i = 0; i < 3; ++i) b.f0[static_cast<std::size_t>(i)] = f0[static_cast<std::size_t>(i)].as_number();
        }
        spec.nullcurves = std::move(b);
    }

    if (tables.count("domain")) {
        const auto& t = tables.at("domain");
        if (t.has("u")) {
            const auto& r = t.get("u", 2);
            spec.domain.u_min = r[0].as_number();
            spec.domain.u_max = r[1].as_number();
        }
        if (t.has("v")) {
            const auto& r = t.get("v", 2);
            spec.domain.v_min = r[0].as_number();
            spec.domain.v_max = r[1].as_number();
        }
        if (t.has("grid")) {
            const auto& g = t.get("grid", 2);
            spec.grid_nu = static_cast<int>(g[0].as_number());
            spec.grid_nv = static_cast<int>(g[1].as_number());
        }
    }
    if (tables.count("options")) {
        const auto& t = tables.at("options");
        if (t.has("jet_order")) spec.jet_order = static_cast<int>(t.get("jet_order", 1)[0].as_number());
        if (t.has("quad_tol")) spec.quad_tol = t.get("quad_tol", 1)[0].as_number();
        if (t.has("zero_tol")) tol::kZero = t.get("zero_tol", 1)[0].as_number();
        if (t.has("nonzero_tol")) tol::kNonzero = t.get("nonzero_tol", 1)[0].as_number();
        if (t.has("kind_tol")) tol::kKind = t.get("kind_tol", 1)[0].as_number();
        if (t.has("dedup_tol")) tol::kDedup = t.get("dedup_tol", 1)[0].as_number();
        if (t.has("root_tol")) tol::kRootTarget = t.get("root_tol", 1)[0].as_number();
    }
    if (spec.domain.u_min >= spec.domain.u_max || spec.domain.v_min >= spec.domain.v_max)
        throw ParseError(0, "a nonempty domain", "spec: domain ranges must be nonempty");

    // every expression must parse now, so errors carry positions early
    (void)spec.to_wdata();
    return spec;
}

inline std::string SurfaceSpec::serialize() const {
    std::ostringstream os;
    auto num = [](double v) { return detail::format_double(v); };
    if (wdata) {
        os << "[wdata]\n";
        os << "g1 = " << detail::quote(wdata->g1) << "\n";
        os << "g2 = " << detail::quote(wdata->g2) << "\n";
        os << "w1 = " << detail::quote(wdata->w1) << "\n";
        os << "w2 = " << detail::quote(wdata->w2) << "\n";
        os << "base = [" << num(wdata->base_u) << ", " << num(wdata->base_v) << "]\n";
        os << "f0 = [" << num(wdata->f0[0]) << ", " << num(wdata->f0[1]) << ", " << num(wdata->f0[2])
           << "]\n";
    } else if (nullcurves) {
        os << "[nullcurves]\n";
        os << "phi = [" << detail::quote(nullcurves->phi[0]) << ", " << detail::quote(nullcurves->phi[1])
           << ", " << detail::quote(nullcurves->phi[2]) << "]\n";
        os << "psi = [" << detail::quote(nullcurves->psi[0]) << ", " << detail::quote(nullcurves->psi[1])
           << ", " << detail::quote(nullcurves->psi[2]) << "]\n";
        os << "derivative_form = " << (nullcurves->derivative_form ? "true" : "false") << "\n";
        os << "u_range = [" << num(nullcurves->u_min) << ", " << num(nullcurves->u_max) << "]\n";
        os << "v_range = [" << num(nullcurves->v_min) << ", " << num(nullcurves->v_max) << "]\n";
        os << "base = [" << num(nullcurves->base_u) << ", " << num(nullcurves->base_v) << "]\n";
        os << "f0 = [" << num(nullcurves->f0[0]) << ", " << num(nullcurves->f0[1]) << ", "
           << num(nullcurves->f0[2]) << "]\n";
    }
    os << "\n[domain]\n";
    os << "u = [" << num(domain.u_min) << ", " << num(domain.u_max) << "]\n";
    os << "v = [" << num(domain.v_min) << ", " << num(domain.v_max) << "]\n";
    os << "grid = [" << grid_nu << ", " << grid_nv << "]\n";
    os << "\n[options]\n";
    os << "jet_order = " << jet_order << "\n";
    os << "quad_tol = " << num(quad_tol) << "\n";
    return os.str();
}

} // namespace tmsurf
