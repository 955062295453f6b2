#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tmsurf/oracle.hpp"

namespace tmsurf {

using json = nlohmann::json;

inline json margins_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

inline json point_json(const SingularPoint& sp) {
    json j;
    j["u"] = sp.u;
    j["v"] = sp.v;
    json kinds = json::array();
    if (sp.kindG) kinds.push_back("G");
    if (sp.kindW1) kinds.push_back("W1");
    if (sp.kindW2) kinds.push_back("W2");
    j["kinds"] = kinds;
    j["rank"] = sp.rank;
    j["front"] = sp.is_front;
    j["degenerate"] = sp.is_degenerate;
    if (sp.low_confidence) j["low_confidence"] = true;
    if (!sp.notes.empty()) j["notes"] = sp.notes;
    j["margins"] = margins_json(sp.margins);
    return j;
}

inline json classification_json(const Classification& c) {
    json j;
    j["verdict"] = c.verdict_string();
    if (c.verdict == Verdict::CandidateHigherCusp) j["higher_k"] = c.higher_k;
    if (c.borderline) j["borderline"] = true;
    if (!c.reasons.empty()) j["reasons"] = c.reasons;
    j["trace"] = margins_json(c.trace);
    return j;
}

inline json oracle_json(const OracleVerdict& o) {
    json j;
    j["verdict"] = o.verdict;
    if (o.borderline) j["borderline"] = true;
    if (o.violation) j["violation"] = true;
    if (!o.notes.empty()) j["notes"] = o.notes;
    j["margins"] = margins_json(o.margins);
    return j;
}

// Verdicts of the same point on the conjugate surface and one associated-family
// member; the invariant classes must survive these transforms.
inline json transforms_json(const WData& w, double u, double v, double theta = 1.0) {
    json j;
    auto safe = [&](const WData& wt) -> std::string {
        try {
            return classify(wt, u, v).verdict_string();
        } catch (const Error& e) {
            return std::string("error: ") + e.what();
        }
    };
    j["conjugate"] = safe(conjugate(w));
    j["associate_theta"] = theta;
    j["associate"] = safe(associate(w, theta));
    return j;
}

inline json full_point_report(const WData& w, const SingularPoint& sp, const Classification& c,
                              const OracleVerdict& o, bool with_transforms = true) {
    json j = point_json(sp);
    j["classification"] = classification_json(c);
    j["oracle"] = oracle_json(o);
    j["agree"] = detail::verdicts_match(c, o) ||
                 (c.verdict == Verdict::Unclassified && o.verdict == "Unclassified");
    if (with_transforms) j["transforms"] = transforms_json(w, sp.u, sp.v);
    return j;
}

inline json scan_report_json(const WData& w, const ScanResult& res,
                             const std::vector<Classification>& cls, const CrosscheckReport& cc,
                             const AuditReport& audit, bool with_transforms = true) {
    json j;
    json pts = json::array();
    for (std::size_t i = 0; i < res.points.size(); ++i) {
        OracleVerdict o;
        for (const auto& e : cc.entries)
            if (e.u == res.points[i].u && e.v == res.points[i].v) {
                o.verdict = e.oracle_verdict;
                o.margins = e.oracle_margins;
                break;
            }
        pts.push_back(full_point_report(w, res.points[i], cls[i], o, with_transforms));
    }
    j["points"] = pts;

    json curves = json::array();
    for (const auto& c : res.curves) {
        json cj;
        cj["samples"] = c.pts.size();
        if (!c.pts.empty()) {
            cj["start"] = {c.pts.front().u, c.pts.front().v};
            cj["end"] = {c.pts.back().u, c.pts.back().v};
        }
        cj["degenerate_end"] = c.degenerate_end;
        curves.push_back(cj);
    }
    j["g_curves"] = curves;
    json ur = json::array(), vr = json::array();
    for (const auto& r : res.u_roots) ur.push_back(r.x);
    for (const auto& r : res.v_roots) vr.push_back(r.x);
    j["omega_u_roots"] = ur;
    j["omega_v_roots"] = vr;
    if (!res.notes.empty()) j["notes"] = res.notes;

    j["crosscheck"] = {{"agreed", cc.agreed},
                       {"disagreed", cc.disagreed},
                       {"excluded", cc.excluded},
                       {"agreement_rate", cc.agreement_rate()}};
    json disagreements = json::array();
    for (const auto& e : cc.entries)
        if (!e.agree && e.counted)
            disagreements.push_back({{"u", e.u},
                                     {"v", e.v},
                                     {"wdata", e.wdata_verdict},
                                     {"oracle", e.oracle_verdict},
                                     {"margins", margins_json(e.oracle_margins)}});
    j["disagreements"] = disagreements;

    j["audit"] = {{"checked", audit.checked}, {"violations", audit.violations}};
    json viol = json::array();
    for (const auto& e : audit.entries)
        if (e.violated)
            viol.push_back({{"u", e.u}, {"v", e.v}, {"quantity", e.quantity}, {"value", e.value}});
    j["audit_violations"] = viol;

    json hist = json::object();
    for (const auto& c : cls) {
        const std::string v = c.verdict_string();
        hist[v] = hist.value(v, 0) + 1;
    }
    j["verdict_histogram"] = hist;
    return j;
}

} // namespace tmsurf
