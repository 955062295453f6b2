#pragma once

#include <map>
#include <string>
#include <vector>

#include "tmsurf/singular.hpp"

namespace tmsurf {

// Diffeomorphism classes reachable on generalized timelike minimal surfaces.
// The S1-minus, lips and D4-minus classes are deliberately absent: they cannot
// occur on these surfaces, so the type cannot express them.
enum class Verdict {
    CuspidalEdge,
    Swallowtail,
    CuspidalCrossCap,
    CuspidalButterfly,
    CuspidalS1Plus,
    Cusp25Edge,
    CuspidalBeaks,
    D4Plus,
    CandidateHigherCusp,
    Unclassified,
};

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::CuspidalEdge: return "CuspidalEdge";
        case Verdict::Swallowtail: return "Swallowtail";
        case Verdict::CuspidalCrossCap: return "CuspidalCrossCap";
        case Verdict::CuspidalButterfly: return "CuspidalButterfly";
        case Verdict::CuspidalS1Plus: return "CuspidalS1Plus";
        case Verdict::Cusp25Edge: return "Cusp25Edge";
        case Verdict::CuspidalBeaks: return "CuspidalBeaks";
        case Verdict::D4Plus: return "D4Plus";
        case Verdict::CandidateHigherCusp: return "CandidateHigherCusp";
        case Verdict::Unclassified: return "Unclassified";
    }
    return "?";
}

struct Classification {
    Verdict verdict = Verdict::Unclassified;
    int higher_k = 0; // CandidateHigherCusp order hint
    std::map<std::string, double> trace;
    std::vector<std::string> reasons;
    bool borderline = false;

    std::string verdict_string() const {
        if (verdict == Verdict::CandidateHigherCusp)
            return std::string("CandidateHigherCusp(") + std::to_string(higher_k) + ")";
        return verdict_name(verdict);
    }
};

// ---------------------------------------------------------------------------
// Quantities for g-singular (minface) points:
//   varphi_i = g_i' / (g_i^2 w_i),  phi_i = (g_i/g_i') varphi_i',
//   Phi_i = (g_i/g_i') phi_i'.

struct MinfaceQuantities {
    bool varphi_ok = false;
    bool nested_ok = false;
    std::string error;

    double varphi1 = 0, varphi2 = 0;
    double phi1 = 0, phi2 = 0;
    double Phi1 = 0, Phi2 = 0;

    // Scales carry the magnitude of the whole jet computation, so that
    // ill-conditioned evaluations (huge coefficients cancelling down to small
    // values) widen the borderline gap instead of producing a confident verdict.
    double varphi_scale = 1.0, phi_scale = 1.0, Phi_scale = 1.0;

    Q sum() const { return {varphi1 + varphi2, varphi_scale}; }
    Q diff() const { return {varphi1 - varphi2, varphi_scale}; }
    Q D() const { return {phi1 - phi2, phi_scale}; }
    Q Dplus() const { return {phi1 + phi2, phi_scale}; }
    Q nested_sum() const { return {Phi1 + Phi2, Phi_scale}; }
    Q nested_diff() const { return {Phi1 - Phi2, Phi_scale}; }
};

inline MinfaceQuantities minface_quantities(const WData& w, double u, double v) {
    MinfaceQuantities m;
    VarphiJets vp = compute_varphi_jets(w, u, v);
    if (!vp.ok1 || !vp.ok2) {
        m.error = vp.ok1 ? vp.err2 : vp.err1;
        return m;
    }
    m.varphi1 = vp.varphi1.value();
    m.varphi2 = vp.varphi2.value();
    m.varphi_ok = true;
    m.varphi_scale = std::max({1.0, detail::coeff_scale(vp.varphi1), detail::coeff_scale(vp.varphi2)});

    try {
        Jet g1 = w.g1_jet(u), g2 = w.g2_jet(v);
        Jet g1p = g1.derivative(), g2p = g2.derivative();

        auto nested = [](const Jet& g, const Jet& gp, const Jet& varphi, double& phi_out,
                         double& Phi_out, double& phi_cs, double& Phi_cs) {
            Jet ratio = jet_div(g.truncated(gp.order()), gp); // may cancel if g'(p) = 0
            Jet dv = varphi.derivative();
            Jet r = ratio, d = dv;
            jet_align(r, d);
            Jet phi = jet_mul(r, d);
            phi_out = phi.value();
            phi_cs = detail::coeff_scale(phi);
            Jet dphi = phi.derivative();
            Jet r2 = ratio, d2 = dphi;
            jet_align(r2, d2);
            Jet Phi = jet_mul(r2, d2);
            Phi_out = Phi.value();
            Phi_cs = detail::coeff_scale(Phi);
        };
        double cs1 = 1, cs2 = 1, CS1 = 1, CS2 = 1;
        nested(g1, g1p, vp.varphi1, m.phi1, m.Phi1, cs1, CS1);
        nested(g2, g2p, vp.varphi2, m.phi2, m.Phi2, cs2, CS2);
        m.phi_scale = std::max({1.0, cs1, cs2});
        m.Phi_scale = std::max({1.0, CS1, CS2});
        m.nested_ok = true;
    } catch (const Error& e) {
        m.error = e.what();
    }
    return m;
}

namespace detail {

inline void record_minface(Classification& c, const MinfaceQuantities& m) {
    c.trace["varphi1"] = m.varphi1;
    c.trace["varphi2"] = m.varphi2;
    c.trace["sum"] = m.sum().value;
    c.trace["diff"] = m.diff().value;
    if (m.nested_ok) {
        c.trace["phi1"] = m.phi1;
        c.trace["phi2"] = m.phi2;
        c.trace["Phi1"] = m.Phi1;
        c.trace["Phi2"] = m.Phi2;
        c.trace["D"] = m.D().value;
        c.trace["Dplus"] = m.Dplus().value;
        c.trace["nested_sum"] = m.nested_sum().value;
        c.trace["nested_diff"] = m.nested_diff().value;
    }
}

inline Classification unresolved(Classification c, const std::string& why) {
    c.verdict = Verdict::Unclassified;
    c.reasons.push_back(why);
    return c;
}

inline Classification borderline(Classification c, const std::string& name) {
    c.verdict = Verdict::Unclassified;
    c.borderline = true;
    c.reasons.push_back("borderline:" + name);
    return c;
}

} // namespace detail

// Criteria chain for non-degenerate rank-one g-singular points.
inline Classification classify_g_point(const WData& w, const SingularPoint& sp) {
    if (!sp.pure_g() || sp.rank != 1 || sp.is_degenerate)
        throw Error(ErrKind::Usage, "classify_g_point: expects a non-degenerate rank-1 pure g-point");

    Classification c;
    MinfaceQuantities m = minface_quantities(w, sp.u, sp.v);
    if (!m.varphi_ok) return detail::unresolved(c, "varphi unresolved: " + m.error);
    detail::record_minface(c, m);

    const Tri tdiff = tri(m.diff());
    const Tri tsum = tri(m.sum());
    if (tdiff == Tri::Borderline) return detail::borderline(c, "diff");
    if (tsum == Tri::Borderline) return detail::borderline(c, "sum");

    if (tdiff == Tri::NonZero && tsum == Tri::NonZero) {
        c.verdict = Verdict::CuspidalEdge;
        return c;
    }

    if (tdiff == Tri::NonZero && tsum == Tri::Zero) {
        if (!m.nested_ok) return detail::unresolved(c, "nested quotient unresolved: " + m.error);
        switch (tri(m.D())) {
            case Tri::NonZero: c.verdict = Verdict::Swallowtail; return c;
            case Tri::Borderline: return detail::borderline(c, "D");
            case Tri::Zero: break;
        }
        switch (tri(m.nested_sum())) {
            case Tri::NonZero: c.verdict = Verdict::CuspidalButterfly; return c;
            case Tri::Borderline: return detail::borderline(c, "nested_sum");
            case Tri::Zero: return detail::unresolved(c, "butterfly chain exhausted (nested sum = 0)");
        }
    }

    if (tdiff == Tri::Zero && tsum == Tri::NonZero) {
        if (!m.nested_ok) return detail::unresolved(c, "nested quotient unresolved: " + m.error);
        switch (tri(m.Dplus())) {
            case Tri::NonZero: c.verdict = Verdict::CuspidalCrossCap; return c;
            case Tri::Borderline: return detail::borderline(c, "Dplus");
            case Tri::Zero: break;
        }
        switch (tri(m.nested_diff())) {
            case Tri::NonZero: {
                c.verdict = Verdict::CuspidalS1Plus;
                // Sign identity from the S1 analysis; recorded for the audit.
                try {
                    const double w1 = w.w1_jet(sp.u, 0).value();
                    const double w2 = w.w2_jet(sp.v, 0).value();
                    const double g1p = w.g1_jet(sp.u, 1).derive(1);
                    const double g2p = w.g2_jet(sp.v, 1).derive(1);
                    const double p6 = std::pow(m.varphi1, 6);
                    const double dPhi = m.Phi1 - m.Phi2;
                    c.trace["AB_product"] =
                        48.0 * w1 * w1 * w2 * w2 * g1p * g1p * g2p * g2p * p6 * dPhi * dPhi;
                } catch (const Error&) {
                }
                return c;
            }
            case Tri::Borderline: return detail::borderline(c, "nested_diff");
            case Tri::Zero: return detail::unresolved(c, "S1 chain exhausted (nested diff = 0)");
        }
    }

    return detail::unresolved(c, "diff = sum = 0: outside the rank-1 g-point criteria");
}

// Non-degenerate rank-one omega-singular points: fronts are cuspidal edges;
// non-fronts are tested for the (2,5)-cuspidal edge, deeper patterns are
// reported as candidates only.
inline Classification classify_w_rank1(const WData& w, const SingularPoint& sp) {
    if (!sp.pure_w() || sp.rank != 1 || sp.is_degenerate)
        throw Error(ErrKind::Usage, "classify_w_rank1: expects a non-degenerate rank-1 pure omega point");

    Classification c;
    const bool w2side = sp.kindW2;

    if (sp.is_front) {
        c.verdict = Verdict::CuspidalEdge;
        c.trace["front_g_derivative"] = w2side ? sp.margins.at("g2_v") : sp.margins.at("g1_u");
        return c;
    }

    try {
        Jet g = w2side ? w.g2_jet(sp.v) : w.g1_jet(sp.u);
        Jet om = w2side ? w.w2_jet(sp.v) : w.w1_jet(sp.u);
        Jet gpp = g.derivative().derivative();
        Jet omp = om.derivative();
        Jet num = gpp, den = omp;
        jet_align(num, den);
        Jet ratio = jet_div(num, den);
        const double q = ratio.derivative().value();
        const double qs = std::max(1.0, detail::coeff_scale(ratio));
        c.trace["cusp25_quantity"] = q;

        switch (tri(Q{q, qs})) {
            case Tri::NonZero: c.verdict = Verdict::Cusp25Edge; return c;
            case Tri::Borderline: return detail::borderline(c, "cusp25_quantity");
            case Tri::Zero: break;
        }

        // Higher-order candidate: read (2, 2k+1) off the first nonvanishing
        // coefficient of g' against a simple omega zero. Reported, not certified.
        Jet gp = g.derivative();
        const double gs = detail::coeff_scale(gp);
        int mfirst = -1;
        for (int i = 0; i <= gp.order(); ++i) {
            if (std::abs(gp.c[static_cast<std::size_t>(i)]) > 1e-12 * std::max(1.0, gs)) {
                mfirst = i;
                break;
            }
        }
        if (mfirst >= 2 && mfirst % 2 == 0) {
            c.verdict = Verdict::CandidateHigherCusp;
            c.higher_k = mfirst / 2 + 1;
            c.trace["higher_cusp_k"] = c.higher_k;
            c.reasons.push_back("cusp order beyond (2,5): reported as a candidate only");
            return c;
        }
        return detail::unresolved(c, "no (2,2k+1) pattern in the g-jet");
    } catch (const Error& e) {
        return detail::unresolved(c, std::string("cusp quantity unresolved: ") + e.what());
    }
}

// Degenerate rank-one points carrying both a g- and an omega-singularity.
inline Classification classify_beaks(const WData& w, const SingularPoint& sp) {
    if (!sp.is_degenerate || sp.rank != 1 || !sp.kindG || !(sp.kindW1 || sp.kindW2))
        throw Error(ErrKind::Usage, "classify_beaks: expects a degenerate rank-1 point in both singular sets");
    (void)w;

    Classification c;
    const bool w2side = sp.kindW2;
    const Q other_omega{w2side ? sp.margins.at("w1") : sp.margins.at("w2"), 1.0};
    const Q omega_deriv{w2side ? sp.margins.at("w2_v") : sp.margins.at("w1_u"), 1.0};
    const double g1p = sp.margins.at("g1_u"), g2p = sp.margins.at("g2_v");
    const Q gprod{g1p * g2p, std::max({1.0, std::abs(g1p), std::abs(g2p)})};

    c.trace["beaks_other_omega"] = other_omega.value;
    c.trace["beaks_omega_deriv"] = omega_deriv.value;
    c.trace["beaks_g_derivatives"] = gprod.value;

    Tri t1 = tri(other_omega), t2 = tri(omega_deriv), t3 = tri(gprod);
    if (t1 == Tri::Borderline) return detail::borderline(c, "beaks_other_omega");
    if (t2 == Tri::Borderline) return detail::borderline(c, "beaks_omega_deriv");
    if (t3 == Tri::Borderline) return detail::borderline(c, "beaks_g_derivatives");
    if (t1 == Tri::NonZero && t2 == Tri::NonZero && t3 == Tri::NonZero) {
        c.verdict = Verdict::CuspidalBeaks;
        return c;
    }
    std::string why = "beaks conditions failed:";
    if (t1 != Tri::NonZero) why += " other omega vanishes;";
    if (t2 != Tri::NonZero) why += " omega derivative vanishes;";
    if (t3 != Tri::NonZero) why += " g derivatives vanish;";
    return detail::unresolved(c, why);
}

// Rank-zero points; the only classifiable pattern is D4-plus.
inline Classification classify_rank0(const WData& w, const SingularPoint& sp) {
    if (sp.rank != 0) throw Error(ErrKind::Usage, "classify_rank0: expects a rank-0 point");

    Classification c;
    const double G = sp.margins.at("g1g2_minus_1");
    const double g1p = sp.margins.at("g1_u"), g2p = sp.margins.at("g2_v");
    const double w1p = sp.margins.at("w1_u"), w2p = sp.margins.at("w2_v");
    const double g1 = sp.margins.at("g1"), g2 = sp.margins.at("g2");

    const Q qg{G, std::max(1.0, std::abs(g1 * g2))};
    const Q qgp{g1p * g2p, std::max({1.0, std::abs(g1p), std::abs(g2p)})};
    const Q qwp{w1p * w2p, std::max({1.0, std::abs(w1p), std::abs(w2p)})};

    const double m = std::sqrt(G * G + 2.0 * (g1 + g2) * (g1 + g2));
    const double Lt = 0.5 * G * m; // \tilde Lambda = -(1 - g1 g2) sqrt(...)/2
    const double luv = Lt * w1p * w2p;
    c.trace["hess_det"] = -luv * luv;
    c.trace["lambda_uv"] = luv;
    c.trace["d4_g_condition"] = G;
    c.trace["d4_g_derivatives"] = qgp.value;
    c.trace["d4_omega_derivatives"] = qwp.value;
    (void)w;

    Tri t1 = tri(qg), t2 = tri(qgp), t3 = tri(qwp);
    if (t1 == Tri::Borderline) return detail::borderline(c, "d4_g_condition");
    if (t2 == Tri::Borderline) return detail::borderline(c, "d4_g_derivatives");
    if (t3 == Tri::Borderline) return detail::borderline(c, "d4_omega_derivatives");
    if (t1 == Tri::NonZero && t2 == Tri::NonZero && t3 == Tri::NonZero) {
        c.verdict = Verdict::D4Plus;
        return c;
    }
    std::string why = "D4 conditions failed:";
    if (t1 != Tri::NonZero) why += " g1 g2 = 1;";
    if (t2 != Tri::NonZero) why += " (g1)_u (g2)_v = 0;";
    if (t3 != Tri::NonZero) why += " (w1)_u (w2)_v = 0;";
    return detail::unresolved(c, why);
}

// Route an analyzed singular point to the applicable criteria chain.
inline Classification classify_point(const WData& w, const SingularPoint& sp) {
    Classification c;
    if (sp.rank == 0) {
        c = classify_rank0(w, sp);
    } else if (sp.is_degenerate && sp.kindG && (sp.kindW1 || sp.kindW2)) {
        c = classify_beaks(w, sp);
    } else if (sp.pure_g() && !sp.is_degenerate) {
        c = classify_g_point(w, sp);
    } else if (sp.pure_w() && !sp.is_degenerate) {
        c = classify_w_rank1(w, sp);
    } else {
        c.verdict = Verdict::Unclassified;
        c.reasons.push_back(sp.is_degenerate ? "degenerate point outside the criteria (kinds " +
                                                   sp.kinds_string() + ")"
                                             : "kind combination outside the criteria (kinds " +
                                                   sp.kinds_string() + ")");
    }
    for (const auto& [k, val] : sp.margins) c.trace.emplace("margin_" + k, val);
    return c;
}

inline Classification classify(const WData& w, double u, double v) {
    return classify_point(w, analyze_point(w, u, v));
}

} // namespace tmsurf
