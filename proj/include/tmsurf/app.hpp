#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "tmsurf/export.hpp"
#include "tmsurf/fixtures.hpp"
#include "tmsurf/report.hpp"

namespace tmsurf::app {

// Exit codes: 0 ok, 1 usage, 2 parse error, 3 not singular, 4 numeric failure.
inline int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrKind::Parse: return 2;
        case ErrKind::NotSingular: return 3;
        case ErrKind::Usage: return 1;
        default: return 4;
    }
}

inline int fail(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (const auto* pe = dynamic_cast<const ParseError*>(&e))
        err << "  at byte offset " << pe->offset() << ", expected " << pe->expected() << "\n";
    return exit_code(e);
}

inline ScanOptions scan_options_for(const SurfaceSpec& spec) {
    ScanOptions o;
    (void)spec;
    return o;
}

inline int run_classify(const std::string& spec_path, double u, double v, std::ostream& out,
                        std::ostream& err) {
    try {
        SurfaceSpec spec = SurfaceSpec::load(spec_path);
        WData w = spec.to_wdata();
        SingularPoint sp = analyze_point(w, u, v);
        Classification c = classify_point(w, sp);
        OracleVerdict o = oracle_classify(w, sp);
        out << full_point_report(w, sp, c, o).dump(2) << "\n";
        return 0;
    } catch (const Error& e) {
        return fail(e, err);
    }
}

inline int run_scan(const std::string& spec_path, const std::string& out_path,
                    const std::string& curves_csv, const std::string& points_csv,
                    bool with_transforms, std::ostream& out, std::ostream& err) {
    try {
        SurfaceSpec spec = SurfaceSpec::load(spec_path);
        WData w = spec.to_wdata();
        ScanResult res = singular_scan(w, spec.domain, spec.grid_nu, spec.grid_nv,
                                       scan_options_for(spec));
        std::vector<Classification> cls;
        cls.reserve(res.points.size());
        for (const auto& p : res.points) cls.push_back(classify_point(w, p));
        CrosscheckReport cc = crosscheck(w, res.points, cls);
        AuditReport audit = nonexistence_audit(w, res.points);
        json j = scan_report_json(w, res, cls, cc, audit, with_transforms);

        if (out_path.empty() || out_path == "-") {
            out << j.dump(2) << "\n";
        } else {
            std::ofstream f(out_path);
            if (!f) throw Error(ErrKind::Usage, "cannot write " + out_path);
            f << j.dump(2) << "\n";
        }
        if (!curves_csv.empty()) {
            std::ofstream f(curves_csv);
            if (!f) throw Error(ErrKind::Usage, "cannot write " + curves_csv);
            write_curves_csv(f, res);
        }
        if (!points_csv.empty()) {
            std::ofstream f(points_csv);
            if (!f) throw Error(ErrKind::Usage, "cannot write " + points_csv);
            write_points_csv(f, res.points);
        }
        return 0;
    } catch (const Error& e) {
        return fail(e, err);
    }
}

inline int run_transform(const std::string& spec_path, bool conj, std::optional<double> theta,
                         const std::string& out_path, std::ostream& out, std::ostream& err) {
    try {
        if (conj == theta.has_value())
            throw Error(ErrKind::Usage, "transform: pass exactly one of --conjugate / --associate");
        SurfaceSpec spec = SurfaceSpec::load(spec_path);
        if (spec.wdata) {
            if (conj) {
                spec.wdata->w2 = "-(" + spec.wdata->w2 + ")";
            } else {
                const std::string th = detail::format_double(*theta);
                spec.wdata->w1 = "exp(" + th + ")*(" + spec.wdata->w1 + ")";
                spec.wdata->w2 = "exp(-(" + th + "))*(" + spec.wdata->w2 + ")";
            }
        } else if (spec.nullcurves) {
            // conjugate: f = (phi - psi)/2, i.e. negate psi; associated family
            // scales the two generating curves by reciprocal factors
            if (conj) {
                for (auto& c : spec.nullcurves->psi) c = "-(" + c + ")";
            } else {
                const std::string th = detail::format_double(*theta);
                for (auto& c : spec.nullcurves->phi) c = "exp(" + th + ")*(" + c + ")";
                for (auto& c : spec.nullcurves->psi) c = "exp(-(" + th + "))*(" + c + ")";
            }
        }
        (void)spec.to_wdata(); // validate before writing
        const std::string text = spec.serialize();
        if (out_path.empty() || out_path == "-") {
            out << text;
        } else {
            std::ofstream f(out_path);
            if (!f) throw Error(ErrKind::Usage, "cannot write " + out_path);
            f << text;
        }
        return 0;
    } catch (const Error& e) {
        return fail(e, err);
    }
}

inline int run_mesh(const std::string& spec_path, const std::string& out_path, bool overlay,
                    std::ostream& out, std::ostream& err) {
    try {
        SurfaceSpec spec = SurfaceSpec::load(spec_path);
        WData w = spec.to_wdata();
        std::optional<ScanResult> res;
        if (overlay)
            res = singular_scan(w, spec.domain, spec.grid_nu, spec.grid_nv, scan_options_for(spec));
        auto emit = [&](std::ostream& os) {
            write_obj(os, w, spec.domain, spec.grid_nu, spec.grid_nv, res ? &*res : nullptr,
                      spec.quad_tol);
        };
        if (out_path.empty() || out_path == "-") {
            emit(out);
        } else {
            std::ofstream f(out_path);
            if (!f) throw Error(ErrKind::Usage, "cannot write " + out_path);
            emit(f);
        }
        return 0;
    } catch (const Error& e) {
        return fail(e, err);
    }
}

inline int run_fixtures(const std::string& dir, std::ostream& out, std::ostream& err) {
    try {
        for (const Fixture& f : fixtures::all()) {
            const std::string path = dir.empty() ? f.name + ".toml" : dir + "/" + f.name + ".toml";
            std::ofstream os(path);
            if (!os) throw Error(ErrKind::Usage, "cannot write " + path);
            if (!f.notes.empty()) os << "# " << f.notes << "\n";
            os << f.spec.serialize();
            out << path << "\n";
        }
        return 0;
    } catch (const Error& e) {
        return fail(e, err);
    }
}

struct FuzzSummary {
    int surfaces = 0;
    int points = 0;
    int agreed = 0, disagreed = 0, excluded = 0;
    int audit_checked = 0, audit_violations = 0;
    std::map<std::string, int> verdicts;
    json disagreements = json::array();

    double agreement_rate() const {
        const int n = agreed + disagreed;
        return n == 0 ? 1.0 : static_cast<double>(agreed) / n;
    }
};

inline FuzzSummary run_fuzz(std::uint64_t seed, int count) {
    FuzzSummary sum;
    std::mt19937_64 rng(seed);
    const Domain dom{-1.5, 1.5, -1.5, 1.5};
    ScanOptions opts;
    opts.n_scan_1d = 512;
    opts.curve_samples = 9;
    opts.max_trace_steps = 400;
    for (int i = 0; i < count; ++i) {
        WData w = fixtures::random_wdata(rng);
        sum.surfaces++;
        ScanResult res;
        try {
            res = singular_scan(w, dom, 48, 48, opts);
        } catch (const Error&) {
            continue;
        }
        std::vector<Classification> cls;
        cls.reserve(res.points.size());
        for (const auto& p : res.points) cls.push_back(classify_point(w, p));
        CrosscheckReport cc = crosscheck(w, res.points, cls);
        AuditReport audit = nonexistence_audit(w, res.points);
        sum.points += static_cast<int>(res.points.size());
        sum.agreed += cc.agreed;
        sum.disagreed += cc.disagreed;
        sum.excluded += cc.excluded;
        sum.audit_checked += audit.checked;
        sum.audit_violations += audit.violations;
        for (const auto& c : cls) sum.verdicts[c.verdict_string()]++;
        for (const auto& e : cc.entries)
            if (!e.agree && e.counted && sum.disagreements.size() < 64)
                sum.disagreements.push_back({{"seed_index", i},
                                             {"u", e.u},
                                             {"v", e.v},
                                             {"wdata", e.wdata_verdict},
                                             {"oracle", e.oracle_verdict}});
    }
    return sum;
}

inline int run_audit(std::uint64_t seed, int count, const std::string& out_path, std::ostream& out,
                     std::ostream& err) {
    try {
        FuzzSummary s = run_fuzz(seed, count);
        json j;
        j["seed"] = seed;
        j["surfaces"] = s.surfaces;
        j["singular_points"] = s.points;
        j["crosscheck"] = {{"agreed", s.agreed},
                           {"disagreed", s.disagreed},
                           {"excluded", s.excluded},
                           {"agreement_rate", s.agreement_rate()}};
        j["audit"] = {{"checked", s.audit_checked}, {"violations", s.audit_violations}};
        j["verdict_histogram"] = s.verdicts;
        j["disagreements"] = s.disagreements;
        if (out_path.empty() || out_path == "-") {
            out << j.dump(2) << "\n";
        } else {
            std::ofstream f(out_path);
            if (!f) throw Error(ErrKind::Usage, "cannot write " + out_path);
            f << j.dump(2) << "\n";
        }
        return s.audit_violations == 0 ? 0 : 1;
    } catch (const Error& e) {
        return fail(e, err);
    }
}

} // namespace tmsurf::app
