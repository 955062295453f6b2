#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "tmsurf/classify.hpp"

namespace tmsurf {

// ---------------------------------------------------------------------------
// Functions on the (u, v) square represented as finite sums of separable terms
// a_i(u) b_i(v), each factor a univariate jet. Closed under addition, products
// and first-order differential operators with separable coefficients, which is
// exactly what iterated null-direction derivatives of f = F1(u) + F2(v) need.

struct SepTerm {
    Jet a, b;
};

struct SepFn {
    std::vector<SepTerm> terms;

    static SepFn zero() { return {}; }

    static SepFn of_u(const Jet& a, double v0, int order_v) {
        if (all_zero(a)) return {};
        return {{{a, Jet::constant(1.0, v0, order_v)}}};
    }
    static SepFn of_v(const Jet& b, double u0, int order_u) {
        if (all_zero(b)) return {};
        return {{{Jet::constant(1.0, u0, order_u), b}}};
    }

    double value() const {
        double s = 0.0;
        for (const auto& t : terms) s += t.a.value() * t.b.value();
        return s;
    }

    static bool all_zero(const Jet& j) {
        for (double c : j.c)
            if (c != 0.0) return false;
        return true;
    }
};

inline SepFn sep_add(const SepFn& x, const SepFn& y) {
    SepFn r = x;
    r.terms.insert(r.terms.end(), y.terms.begin(), y.terms.end());
    return r;
}

inline SepFn sep_mul(const SepFn& x, const SepFn& y) {
    SepFn r;
    for (const auto& s : x.terms)
        for (const auto& t : y.terms) {
            Jet a1 = s.a, a2 = t.a, b1 = s.b, b2 = t.b;
            jet_align(a1, a2);
            jet_align(b1, b2);
            SepTerm nt{jet_mul(a1, a2), jet_mul(b1, b2)};
            if (!SepFn::all_zero(nt.a) && !SepFn::all_zero(nt.b)) r.terms.push_back(std::move(nt));
        }
    return r;
}

inline SepFn sep_du(const SepFn& x) {
    SepFn r;
    for (const auto& t : x.terms) {
        if (t.a.order() < 1)
            throw Error(ErrKind::InsufficientOrder, "sep_du: u-factor exhausted its jet order");
        SepTerm nt{t.a.derivative(), t.b};
        if (!SepFn::all_zero(nt.a)) r.terms.push_back(std::move(nt));
    }
    return r;
}

inline SepFn sep_dv(const SepFn& x) {
    SepFn r;
    for (const auto& t : x.terms) {
        if (t.b.order() < 1)
            throw Error(ErrKind::InsufficientOrder, "sep_dv: v-factor exhausted its jet order");
        SepTerm nt{t.a, t.b.derivative()};
        if (!SepFn::all_zero(nt.b)) r.terms.push_back(std::move(nt));
    }
    return r;
}

// X = P d_u + Q d_v applied to F.
inline SepFn sep_apply(const SepFn& P, const SepFn& Q, const SepFn& F) {
    SepFn r;
    if (!P.terms.empty()) r = sep_mul(P, sep_du(F));
    if (!Q.terms.empty()) r = sep_add(r, sep_mul(Q, sep_dv(F)));
    return r;
}

using VecSep = std::array<SepFn, 3>;

inline VecSep vec_apply(const SepFn& P, const SepFn& Q, const VecSep& F) {
    return {sep_apply(P, Q, F[0]), sep_apply(P, Q, F[1]), sep_apply(P, Q, F[2])};
}

inline Vec3 vec_value(const VecSep& F) { return {F[0].value(), F[1].value(), F[2].value()}; }

// ---------------------------------------------------------------------------
// Unit normal and its partial derivatives as jet-valued vectors, from jets of
// g1 and g2 along an arbitrary common parameter.

namespace detail {

struct NormalJets {
    JetVec3 n;      // unit normal
    JetVec3 n_u;    // partial in u (per unit g1')
    JetVec3 n_v;    // partial in v (per unit g2')
};

// g1t, g2t, g1pt, g2pt: jets of g1, g2, (g1)_u, (g2)_v in a common parameter.
inline NormalJets normal_jets(const Jet& g1t, const Jet& g2t, const Jet& g1pt, const Jet& g2pt) {
    const Jet one = Jet::constant(1.0, g1t.base, g1t.order());
    const Jet g12 = jet_mul(g1t, g1t);
    const Jet g22 = jet_mul(g2t, g2t);
    const Jet gg = jet_mul(g1t, g2t);
    const Jet om = jet_sub(one, gg);
    const Jet sum = jet_add(g1t, g2t);
    const Jet m2 = jet_add(jet_mul(om, om), jet_scale(jet_mul(sum, sum), 2.0));
    const Jet m = jet_compose(Kernel::Sqrt, m2);
    const Jet m3 = jet_mul(m, jet_mul(m, m));

    NormalJets r;
    r.n = {jet_div(sum, m), jet_div(jet_sub(g2t, g1t), m), jet_div(jet_add(one, gg), m)};

    // V1 = ((1+g2^2)(1-g1g2), -1-3g1g2-3g2^2-g1g2^3, 2(g2^3-g1))
    const Jet g23 = jet_mul(g22, g2t);
    JetVec3 V1{jet_mul(jet_add(one, g22), om),
               jet_neg(jet_add(jet_add(one, jet_scale(gg, 3.0)),
                               jet_add(jet_scale(g22, 3.0), jet_mul(g1t, g23)))),
               jet_scale(jet_sub(g23, g1t), 2.0)};
    // V2 = ((1+g1^2)(1-g1g2), 1+3g1g2+3g1^2+g1^3 g2, 2(g1^3-g2))
    const Jet g13 = jet_mul(g12, g1t);
    JetVec3 V2{jet_mul(jet_add(one, g12), om),
               jet_add(jet_add(one, jet_scale(gg, 3.0)),
                       jet_add(jet_scale(g12, 3.0), jet_mul(g13, g2t))),
               jet_scale(jet_sub(g13, g2t), 2.0)};

    const Jet cu = jet_div(g1pt, m3);
    const Jet cv = jet_div(g2pt, m3);
    r.n_u = jet_vec_scale(V1, cu);
    r.n_v = jet_vec_scale(V2, cv);
    return r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Jets of the criterion functions delta and psi along the singular curve.

struct DeltaPsi {
    bool g_case = false;
    Jet delta;      // determinant definition
    Jet psi;        // determinant definition
    Jet delta_closed, psi_closed; // closed forms (g-case only; equal to delta/psi otherwise)
    double cross_delta = 0.0;     // max coefficient discrepancy between the two routes
    double cross_psi = 0.0;
    Vec3 dn_eta{};                // dn(eta) at the point (front test)
    double dn_eta_scale = 1.0;
};

namespace detail {

// Taylor jets of the singular-curve flow (u(t), v(t)) for the rank-one g-case
// field  gamma' = (g2'/g2) d_u - (g1'/g1) d_v.
inline void g_curve_jets(const Jet& av, const Jet& bu, double u0, double v0, Jet& ut, Jet& vt) {
    const int K = std::min(av.order(), bu.order());
    ut = Jet::constant(u0, 0.0, K);
    vt = Jet::constant(v0, 0.0, K);
    for (int it = 0; it <= K; ++it) {
        const Jet du = jet_compose_series(av, vt);
        const Jet dv = jet_compose_series(bu, ut);
        Jet nut = Jet::constant(u0, 0.0, K);
        Jet nvt = Jet::constant(v0, 0.0, K);
        for (int k = 0; k + 1 <= K; ++k) {
            nut.c[static_cast<std::size_t>(k + 1)] = du.c[static_cast<std::size_t>(k)] / (k + 1);
            nvt.c[static_cast<std::size_t>(k + 1)] = dv.c[static_cast<std::size_t>(k)] / (k + 1);
        }
        ut = nut;
        vt = nvt;
    }
}

} // namespace detail

inline DeltaPsi delta_psi_jets(const WData& w, const SingularPoint& sp) {
    if (sp.rank != 1 || sp.is_degenerate)
        throw Error(ErrKind::Usage, "delta_psi_jets: expects a non-degenerate rank-1 point");

    DeltaPsi r;
    const double u0 = sp.u, v0 = sp.v;
    const int K = w.jet_order;

    if (sp.pure_g()) {
        r.g_case = true;
        Jet g1 = w.g1_jet(u0), g2 = w.g2_jet(v0);
        Jet w1 = w.w1_jet(u0), w2 = w.w2_jet(v0);
        Jet g1p = g1.derivative(), g2p = g2.derivative();

        Jet av = jet_div(g2p, g2.truncated(g2p.order()));            // (g2'/g2)(v)
        Jet bu = jet_neg(jet_div(g1p, g1.truncated(g1p.order())));   // -(g1'/g1)(u)
        Jet ut, vt;
        detail::g_curve_jets(av, bu, u0, v0, ut, vt);
        const int Kc = ut.order();

        auto cu = [&](const Jet& h) { return jet_compose_series(h.order() > Kc ? h.truncated(Kc) : h, ut); };
        auto cv = [&](const Jet& h) { return jet_compose_series(h.order() > Kc ? h.truncated(Kc) : h, vt); };

        VarphiJets vp = compute_varphi_jets(w, u0, v0);
        if (!vp.ok1 || !vp.ok2)
            throw Error(ErrKind::InsufficientOrder, "delta_psi_jets: varphi quotients unresolved");
        Jet f1t = cu(vp.varphi1), f2t = cv(vp.varphi2);

        r.delta_closed = jet_add(f1t, f2t);

        // determinant definition: det(gamma', eta)
        Jet Pu = jet_div(Jet::constant(1.0, u0, K), jet_mul(g1, w1)); // 1/(g1 w1)
        Jet Qv = jet_div(Jet::constant(1.0, v0, K), jet_mul(g2, w2)); // 1/(g2 w2)
        Jet avt = cv(av), but = cu(bu);
        r.delta = jet_sub(jet_mul(avt, cv(Qv)), jet_mul(but, cu(Pu)));

        // psi closed form: -(1/2) w1 w2 (varphi1 + varphi2)(varphi1 - varphi2)
        Jet w1t = cu(w1), w2t = cv(w2);
        r.psi_closed = jet_scale(
            jet_mul(jet_mul(w1t, w2t), jet_mul(r.delta_closed, jet_sub(f1t, f2t))), -0.5);

        // psi determinant: det(df(gamma'), n, dn(eta))
        JetVec3 fu{cu(w.fu_expr[0].eval_jet(u0, K)), cu(w.fu_expr[1].eval_jet(u0, K)),
                   cu(w.fu_expr[2].eval_jet(u0, K))};
        JetVec3 fv{cv(w.fv_expr[0].eval_jet(v0, K)), cv(w.fv_expr[1].eval_jet(v0, K)),
                   cv(w.fv_expr[2].eval_jet(v0, K))};
        JetVec3 dfg = jet_vec_scale(fu, avt) + jet_vec_scale(fv, but);

        detail::NormalJets nj = detail::normal_jets(cu(g1), cv(g2), cu(g1p), cv(g2p));
        JetVec3 dn = jet_vec_scale(nj.n_u, cu(Pu)) + jet_vec_scale(nj.n_v, cv(Qv));
        r.psi = jet_det3(dfg, nj.n, dn);

        r.dn_eta = dn.value();
        r.dn_eta_scale = std::max({1.0, euclid_norm(jet_vec_scale(nj.n_u, cu(Pu)).value()),
                                   euclid_norm(jet_vec_scale(nj.n_v, cv(Qv)).value())});

        auto cross = [](const Jet& x, const Jet& y) {
            double m = 0.0, s = 0.0;
            const int n = std::min({x.order(), y.order(), 3});
            for (int k = 0; k <= n; ++k) {
                m = std::max(m, std::abs(x.c[static_cast<std::size_t>(k)] - y.c[static_cast<std::size_t>(k)]));
                s = std::max({s, std::abs(x.c[static_cast<std::size_t>(k)]), std::abs(y.c[static_cast<std::size_t>(k)])});
            }
            return m / std::max(1.0, s);
        };
        r.cross_delta = cross(r.delta, r.delta_closed);
        r.cross_psi = cross(r.psi, r.psi_closed);
        return r;
    }

    // omega case: the singular curve is a coordinate line and eta the transverse
    // coordinate field. Every ingredient is a single-variable jet.
    if (!sp.pure_w())
        throw Error(ErrKind::Usage, "delta_psi_jets: mixed-kind point");

    const bool w2side = sp.kindW2;
    if (w2side) {
        Jet g1 = w.g1_jet(u0), g1p = g1.derivative();
        const int Ka = g1p.order();
        const double c2 = w.g2_jet(v0, 0).value();
        const double c2p = w.g2_jet(v0, 1).derive(1);
        Jet c2j = Jet::constant(c2, u0, Ka), c2pj = Jet::constant(c2p, u0, Ka);
        detail::NormalJets nj = detail::normal_jets(g1.truncated(Ka), c2j, g1p, c2pj);
        JetVec3 fu{w.fu_expr[0].eval_jet(u0, Ka), w.fu_expr[1].eval_jet(u0, Ka),
                   w.fu_expr[2].eval_jet(u0, Ka)};
        r.delta = Jet::constant(1.0, 0.0, Ka);
        r.psi = jet_det3(fu, nj.n, nj.n_v);
        r.delta_closed = r.delta;
        r.psi_closed = r.psi;
        r.dn_eta = nj.n_v.value();
        r.dn_eta_scale = std::max(1.0, euclid_norm(nj.n_u.value()));
    } else {
        Jet g2 = w.g2_jet(v0), g2p = g2.derivative();
        const double c1 = w.g1_jet(u0, 0).value();
        const double c1p = w.g1_jet(u0, 1).derive(1);
        const int Ka = g2p.order();
        Jet c1j = Jet::constant(c1, v0, Ka), c1pj = Jet::constant(c1p, v0, Ka);
        detail::NormalJets nj = detail::normal_jets(c1j, g2.truncated(Ka), c1pj, g2p);
        JetVec3 fv{w.fv_expr[0].eval_jet(v0, Ka), w.fv_expr[1].eval_jet(v0, Ka),
                   w.fv_expr[2].eval_jet(v0, Ka)};
        r.delta = Jet::constant(1.0, 0.0, Ka);
        r.psi = jet_det3(fv, nj.n, nj.n_u);
        r.delta_closed = r.delta;
        r.psi_closed = r.psi;
        r.dn_eta = nj.n_u.value();
        r.dn_eta_scale = std::max(1.0, euclid_norm(nj.n_v.value()));
    }
    return r;
}

// ---------------------------------------------------------------------------
// S1 constants: A = psi''(0) and B = 3 det(xi f, eta^2 f, eta^5 f), with the
// hypotheses of the reduction lemma checked numerically.

struct S1Constants {
    bool ok = false;
    std::string error;
    double A = 0.0, B = 0.0;
    double eta3_residual = 0.0;     // |eta^3 f| relative to neighbour derivatives
    double xi_eta2_independence = 0.0;
    double xieta3_dependence = 0.0; // |cross(xi eta^3 f, eta^2 f)| (should vanish)
};

inline S1Constants s1_constants(const WData& w, const SingularPoint& sp, const DeltaPsi& dp) {
    S1Constants r;
    if (!sp.pure_g()) {
        r.error = "S1 constants are defined on g-singular points";
        return r;
    }
    try {
        const double u0 = sp.u, v0 = sp.v;
        const int K = w.jet_order;
        Jet g1 = w.g1_jet(u0), g2 = w.g2_jet(v0);
        Jet w1 = w.w1_jet(u0), w2 = w.w2_jet(v0);
        Jet g1p = g1.derivative(), g2p = g2.derivative();

        Jet Pu = jet_div(Jet::constant(1.0, u0, K), jet_mul(g1, w1));
        Jet Qv = jet_div(Jet::constant(1.0, v0, K), jet_mul(g2, w2));
        Jet av = jet_div(g2p, g2.truncated(g2p.order()));
        Jet bu = jet_neg(jet_div(g1p, g1.truncated(g1p.order())));

        const SepFn P = SepFn::of_u(Pu, v0, K);
        const SepFn Q = SepFn::of_v(Qv, u0, K);
        const SepFn Pxi = SepFn::of_v(av, u0, K);
        const SepFn Qxi = SepFn::of_u(bu, v0, K);

        VecSep etaf, xif;
        for (int i = 0; i < 3; ++i) {
            Jet fui = w.fu_expr[static_cast<std::size_t>(i)].eval_jet(u0, K);
            Jet fvi = w.fv_expr[static_cast<std::size_t>(i)].eval_jet(v0, K);
            Jet pa = Pu, fa = fui;
            jet_align(pa, fa);
            Jet qb = Qv, fb = fvi;
            jet_align(qb, fb);
            // eta f = (1/(g1 w1)) f_u + (1/(g2 w2)) f_v
            etaf[static_cast<std::size_t>(i)] =
                sep_add(SepFn::of_u(jet_mul(pa, fa), v0, K), SepFn::of_v(jet_mul(qb, fb), u0, K));
            // xi f = a(v) f_u + b(u) f_v
            xif[static_cast<std::size_t>(i)] = SepFn{{{fui, av}, {bu, fvi}}};
        }

        VecSep eta2 = vec_apply(P, Q, etaf);
        VecSep eta3 = vec_apply(P, Q, eta2);
        VecSep eta4 = vec_apply(P, Q, eta3);
        VecSep eta5 = vec_apply(P, Q, eta4);
        VecSep xieta3 = vec_apply(Pxi, Qxi, eta3);

        const Vec3 e2 = vec_value(eta2), e3 = vec_value(eta3), e4 = vec_value(eta4);
        const Vec3 e5 = vec_value(eta5), xf = vec_value(xif), xe3 = vec_value(xieta3);

        const double nscale = std::max({1.0, euclid_norm(e2), euclid_norm(e4)});
        r.eta3_residual = euclid_norm(e3) / nscale;
        r.xi_eta2_independence =
            euclid_norm(cross_e(xf, e2)) / std::max(1.0, euclid_norm(xf) * euclid_norm(e2));
        r.xieta3_dependence =
            euclid_norm(cross_e(xe3, e2)) / std::max(1.0, euclid_norm(xe3) * euclid_norm(e2));

        r.A = dp.psi.derive(2);
        r.B = 3.0 * det3(xf, e2, e5);
        r.ok = true;
    } catch (const Error& e) {
        r.error = e.what();
    }
    return r;
}

// ---------------------------------------------------------------------------
// (2,5)-cuspidal edge check at a non-front rank-one omega point, via the
// special null field eta~ = (a s + b s^2) d_u + d_v and the determinant
// det(xi f, eta~^2 f, 3 eta~^5 f - 10 C eta~^4 f).

struct Hks25Result {
    bool ok = false;
    std::string error;
    double det = 0.0;       // the full determinant
    double shortcut = 0.0;  // 6 w1 (w2)_v^3 (1-g1g2)^2 ((g2)_vv/(w2)_v)_v
    double agreement = 0.0; // |det - shortcut| / scale
    bool is_25 = false;
    bool borderline = false;
};

inline Hks25Result hks_25_check(const WData& w, const SingularPoint& sp) {
    Hks25Result r;
    if (!sp.pure_w() || sp.rank != 1 || sp.is_degenerate || sp.is_front) {
        r.error = "hks_25_check expects a non-front, non-degenerate rank-1 omega point";
        return r;
    }
    try {
        const double u0 = sp.u, v0 = sp.v;
        const int K = w.jet_order;
        const bool w2side = sp.kindW2;

        // Mirrored quantities: the roles of (u, g1, w1) and (v, g2, w2) swap.
        const Jet gU = w.g1_jet(u0), gV = w.g2_jet(v0);
        const Jet wU = w.w1_jet(u0), wV = w.w2_jet(v0);

        const double g1 = gU.value(), g2 = gV.value();
        const double omega_other = w2side ? wU.value() : wV.value();
        const double wp = w2side ? wV.derive(1) : wU.derive(1);
        const double wpp = w2side ? wV.derive(2) : wU.derive(2);
        const double gden = w2side ? (1.0 + g1 * g1) : (1.0 + g2 * g2);
        const double s = ((g1 + g2) / gden) * ((g1 + g2) / gden);
        const double a = wp / omega_other * s;
        const double b = wpp / (2.0 * omega_other) * s;
        const double C = wpp / wp;

        // c(s) = a s + b s^2 in the coordinate transverse to the singular line
        Jet cpoly = Jet::constant(0.0, w2side ? v0 : u0, K);
        if (K >= 1) cpoly.c[1] = a;
        if (K >= 2) cpoly.c[2] = b;

        VecSep etaf;
        SepFn Pf, Qf;
        if (w2side) {
            Pf = SepFn::of_v(cpoly, u0, K); // coefficient of d_u depends on v
            Qf = SepFn::of_v(Jet::constant(1.0, v0, K), u0, K);
        } else {
            Pf = SepFn::of_u(Jet::constant(1.0, u0, K), v0, K);
            Qf = SepFn::of_u(cpoly, v0, K); // coefficient of d_v depends on u
        }
        for (int i = 0; i < 3; ++i) {
            Jet fui = w.fu_expr[static_cast<std::size_t>(i)].eval_jet(u0, K);
            Jet fvi = w.fv_expr[static_cast<std::size_t>(i)].eval_jet(v0, K);
            if (w2side) {
                etaf[static_cast<std::size_t>(i)] =
                    sep_add(SepFn{{{fui, cpoly}}}, SepFn::of_v(fvi, u0, K));
            } else {
                etaf[static_cast<std::size_t>(i)] =
                    sep_add(SepFn{{{cpoly, fvi}}}, SepFn::of_u(fui, v0, K));
            }
        }
        VecSep eta2 = vec_apply(Pf, Qf, etaf);
        VecSep eta3 = vec_apply(Pf, Qf, eta2);
        VecSep eta4 = vec_apply(Pf, Qf, eta3);
        VecSep eta5 = vec_apply(Pf, Qf, eta4);

        Vec3 xf{};
        {
            const auto& comp = w2side ? w.fu_expr : w.fv_expr;
            const double at = w2side ? u0 : v0;
            xf.t = comp[0].eval_jet(at, 0).value();
            xf.x = comp[1].eval_jet(at, 0).value();
            xf.y = comp[2].eval_jet(at, 0).value();
        }

        const Vec3 e2 = vec_value(eta2);
        const Vec3 M = vec_value(eta5) * 3.0 - vec_value(eta4) * (10.0 * C);
        r.det = det3(xf, e2, M);

        // Closed-form shortcut from the same criterion.
        const Jet g_own = w2side ? gV : gU;
        const Jet w_own = w2side ? wV : wU;
        Jet gpp = g_own.derivative().derivative();
        Jet wpj = w_own.derivative();
        Jet num = gpp, den = wpj;
        jet_align(num, den);
        const double t43 = jet_div(num, den).derivative().value();
        const double G = 1.0 - g1 * g2;
        r.shortcut = 6.0 * omega_other * wp * wp * wp * G * G * t43;
        const double scale = std::max({1.0, std::abs(r.det), std::abs(r.shortcut)});
        r.agreement = std::abs(r.det - r.shortcut) / scale;

        switch (tri(Q{r.det, scale})) {
            case Tri::NonZero: r.is_25 = true; break;
            case Tri::Zero: r.is_25 = false; break;
            case Tri::Borderline:
                r.is_25 = false;
                r.borderline = true;
                break;
        }
        r.ok = true;
    } catch (const Error& e) {
        r.error = e.what();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Hessian data for degenerate points.

struct HessianData {
    double hess_det = 0.0;
    double eta_eta_lambda = 0.0;
    double scale = 1.0;
};

inline HessianData hessian_check(const WData& w, const SingularPoint& sp) {
    const Jet2 lam = lambda_jet2(w, sp.u, sp.v);
    HessianData h;
    h.hess_det = lam.fuu * lam.fvv - lam.fuv * lam.fuv;
    h.eta_eta_lambda = sp.kindW2 ? lam.fvv : lam.fuu;
    h.scale = std::max(1.0, lam.max_abs());
    return h;
}


// ---------------------------------------------------------------------------
// Oracle-side verdicts from the intrinsic criteria, plus the agreement report
// against the W-data engine.

struct OracleVerdict {
    std::string verdict = "Unclassified";
    bool borderline = false;
    bool violation = false; // a sign pattern the theory forbids (numerics bug)
    std::map<std::string, double> margins;
    std::vector<std::string> notes;
};

namespace detail {

inline double jet_scale_low(const Jet& j, int upto) {
    double s = 1.0;
    for (int k = 0; k <= std::min(upto, j.order()); ++k)
        s = std::max(s, std::abs(j.c[static_cast<std::size_t>(k)]));
    return s;
}

// n_u and n_v as plain vectors at a point.
inline void normal_partials(const WData& w, double u, double v, Vec3& nu, Vec3& nv) {
    const Jet j1 = w.g1_jet(u, 1), j2 = w.g2_jet(v, 1);
    const double g1 = j1.value(), g2 = j2.value();
    const double g1p = j1.derive(1), g2p = j2.derive(1);
    const double om = 1.0 - g1 * g2;
    const double m = std::sqrt(om * om + 2.0 * (g1 + g2) * (g1 + g2));
    const double m3 = m * m * m;
    nu = Vec3{(1 + g2 * g2) * om, -1 - 3 * g1 * g2 - 3 * g2 * g2 - g1 * g2 * g2 * g2,
              2 * (g2 * g2 * g2 - g1)} *
         (g1p / m3);
    nv = Vec3{(1 + g1 * g1) * om, 1 + 3 * g1 * g2 + 3 * g1 * g1 + g1 * g1 * g1 * g2,
              2 * (g1 * g1 * g1 - g2)} *
         (g2p / m3);
}

} // namespace detail

inline OracleVerdict oracle_classify(const WData& w, const SingularPoint& sp) {
    OracleVerdict o;

    if (sp.rank == 0) {
        Vec3 nu, nv;
        detail::normal_partials(w, sp.u, sp.v, nu, nv);
        const double indep = euclid_norm(cross_e(nu, nv));
        const double iscale = std::max(1.0, euclid_norm(nu) * euclid_norm(nv));
        o.margins["normal_independence"] = indep;
        const HessianData h = hessian_check(w, sp);
        o.margins["hess_det"] = h.hess_det;
        const Q qdet{h.hess_det, h.scale * h.scale};
        const Tri tf = tri(Q{indep, iscale});
        const Tri td = tri(qdet);
        if (tf == Tri::Borderline || td == Tri::Borderline) {
            o.borderline = true;
            o.notes.push_back("borderline rank-0 quantities");
            return o;
        }
        if (tf == Tri::NonZero && td == Tri::NonZero) {
            if (h.hess_det < 0) {
                o.verdict = "D4Plus";
            } else {
                o.verdict = "D4MinusPattern";
                o.violation = true;
                o.notes.push_back("positive Hessian determinant at a rank-0 front point");
            }
        } else {
            o.notes.push_back(tf != Tri::NonZero ? "not a front (degenerate normal)"
                                                 : "Hessian determinant vanishes");
        }
        return o;
    }

    if (sp.is_degenerate && sp.kindG && (sp.kindW1 || sp.kindW2)) {
        // beaks / lips discrimination at a degenerate rank-1 point
        Vec3 nu, nv;
        detail::normal_partials(w, sp.u, sp.v, nu, nv);
        const Vec3 dn = sp.kindW2 ? nv : nu;
        const double fscale = std::max(1.0, euclid_norm(sp.kindW2 ? nu : nv));
        const HessianData h = hessian_check(w, sp);
        o.margins["dn_eta_norm"] = euclid_norm(dn);
        o.margins["hess_det"] = h.hess_det;
        o.margins["eta_eta_lambda"] = h.eta_eta_lambda;
        const Tri tf = tri(Q{euclid_norm(dn), fscale});
        const Tri te = tri(Q{h.eta_eta_lambda, h.scale});
        const Tri td = tri(Q{h.hess_det, h.scale * h.scale});
        if (tf == Tri::Borderline || te == Tri::Borderline || td == Tri::Borderline) {
            o.borderline = true;
            return o;
        }
        if (tf == Tri::NonZero && te == Tri::NonZero && td == Tri::NonZero) {
            if (h.hess_det < 0) {
                o.verdict = "CuspidalBeaks";
            } else {
                o.verdict = "CuspidalLipsPattern";
                o.violation = true;
                o.notes.push_back("positive Hessian determinant at a degenerate front point");
            }
        } else {
            o.notes.push_back("degenerate point fails the beaks hypotheses");
        }
        return o;
    }

    if (sp.rank != 1 || sp.is_degenerate) {
        o.notes.push_back("outside the oracle's coverage");
        return o;
    }

    if (sp.pure_w()) {
        DeltaPsi dp;
        try {
            dp = delta_psi_jets(w, sp);
        } catch (const Error& e) {
            o.notes.push_back(std::string("delta/psi unresolved: ") + e.what());
            return o;
        }
        const Tri tf = tri(Q{euclid_norm(dp.dn_eta), dp.dn_eta_scale});
        o.margins["dn_eta_norm"] = euclid_norm(dp.dn_eta);
        if (tf == Tri::Borderline) {
            o.borderline = true;
            return o;
        }
        if (tf == Tri::NonZero) {
            // a front along a coordinate singular line with delta = 1 != 0
            o.verdict = "CuspidalEdge";
            return o;
        }
        const Hks25Result h = hks_25_check(w, sp);
        if (!h.ok) {
            o.notes.push_back("(2,5) check unresolved: " + h.error);
            return o;
        }
        o.margins["hks_det"] = h.det;
        o.margins["hks_shortcut"] = h.shortcut;
        o.margins["hks_agreement"] = h.agreement;
        if (h.borderline) {
            o.borderline = true;
            return o;
        }
        o.verdict = h.is_25 ? "Cusp25Edge" : "NotCusp25";
        return o;
    }

    if (!sp.pure_g()) {
        o.notes.push_back("kind combination outside the oracle's coverage");
        return o;
    }

    DeltaPsi dp;
    try {
        dp = delta_psi_jets(w, sp);
    } catch (const Error& e) {
        o.notes.push_back(std::string("delta/psi unresolved: ") + e.what());
        return o;
    }
    o.margins["cross_delta"] = dp.cross_delta;
    o.margins["cross_psi"] = dp.cross_psi;

    const double d0 = dp.delta.value();
    const double d1 = dp.delta.derive(1);
    const double d2 = dp.delta.derive(2);
    const double p0 = dp.psi.value();
    const double p1 = dp.psi.derive(1);
    const double p2 = dp.psi.derive(2);
    const double ds = detail::jet_scale_low(dp.delta, 2);
    const double ps = detail::jet_scale_low(dp.psi, 2);
    o.margins["delta0"] = d0;
    o.margins["delta1"] = d1;
    o.margins["delta2"] = d2;
    o.margins["psi0"] = p0;
    o.margins["psi1"] = p1;
    o.margins["psi2"] = p2;

    const Tri tfront = tri(Q{euclid_norm(dp.dn_eta), dp.dn_eta_scale});
    o.margins["dn_eta_norm"] = euclid_norm(dp.dn_eta);
    if (tfront == Tri::Borderline) {
        o.borderline = true;
        return o;
    }

    auto step = [&](double val, double scale, const char* name, Tri& out) {
        out = tri(Q{val, scale});
        if (out == Tri::Borderline) {
            o.borderline = true;
            o.notes.push_back(std::string("borderline:") + name);
        }
        return out != Tri::Borderline;
    };

    if (tfront == Tri::NonZero) {
        Tri t;
        if (!step(d0, ds, "delta0", t)) return o;
        if (t == Tri::NonZero) {
            o.verdict = "CuspidalEdge";
            return o;
        }
        if (!step(d1, ds, "delta1", t)) return o;
        if (t == Tri::NonZero) {
            o.verdict = "Swallowtail";
            return o;
        }
        if (!step(d2, ds, "delta2", t)) return o;
        if (t == Tri::NonZero) {
            o.verdict = "CuspidalButterfly";
            return o;
        }
        o.notes.push_back("front with delta vanishing to high order");
        return o;
    }

    // frontal but not a front: cross-cap and S1 territory
    Tri t;
    if (!step(p0, ps, "psi0", t)) return o;
    if (t == Tri::NonZero) {
        o.notes.push_back("psi(0) != 0 at a non-front point (unexpected)");
        return o;
    }
    if (!step(p1, ps, "psi1", t)) return o;
    if (t == Tri::NonZero) {
        Tri tdelta;
        if (!step(d0, ds, "delta0", tdelta)) return o;
        if (tdelta == Tri::NonZero) {
            o.verdict = "CuspidalCrossCap";
        } else {
            o.notes.push_back("psi'(0) != 0 but delta(0) = 0: outside the cross-cap criterion");
        }
        return o;
    }
    if (!step(p2, ps, "psi2", t)) return o;
    if (t == Tri::Zero) {
        o.notes.push_back("psi vanishes to second order: outside the S1 criterion");
        return o;
    }
    const S1Constants s1 = s1_constants(w, sp, dp);
    if (!s1.ok) {
        o.notes.push_back("S1 constants unresolved: " + s1.error);
        return o;
    }
    o.margins["A"] = s1.A;
    o.margins["B"] = s1.B;
    o.margins["AB"] = s1.A * s1.B;
    o.margins["eta3_residual"] = s1.eta3_residual;
    o.margins["xi_eta2_independence"] = s1.xi_eta2_independence;
    o.margins["xieta3_dependence"] = s1.xieta3_dependence;
    if (s1.eta3_residual > 1e-6)
        o.notes.push_back("eta^3 f does not vanish at the point: reduction hypotheses violated");
    Tri tb;
    if (!step(s1.B, std::max(1.0, std::abs(s1.B)), "B", tb)) return o;
    if (tb == Tri::NonZero && s1.A * s1.B > 0) {
        o.verdict = "CuspidalS1Plus";
    } else if (tb == Tri::NonZero && s1.A * s1.B < 0) {
        o.verdict = "S1MinusPattern";
        o.violation = true;
        o.notes.push_back("negative AB at an S1-type point");
    } else {
        o.notes.push_back("B vanishes: outside the S1 criterion");
    }
    return o;
}

// ---------------------------------------------------------------------------
// Agreement report between the two engines.

struct CrosscheckEntry {
    double u = 0, v = 0;
    std::string wdata_verdict, oracle_verdict;
    bool agree = false;
    bool counted = true; // false when either side is borderline or unresolved
    std::map<std::string, double> oracle_margins;
};

struct CrosscheckReport {
    std::vector<CrosscheckEntry> entries;
    int agreed = 0, disagreed = 0, excluded = 0;

    double agreement_rate() const {
        const int n = agreed + disagreed;
        return n == 0 ? 1.0 : static_cast<double>(agreed) / n;
    }
};

namespace detail {

inline bool verdicts_match(const Classification& c, const OracleVerdict& o) {
    const std::string wd = verdict_name(c.verdict);
    if (o.verdict == wd) return true;
    if (c.verdict == Verdict::CandidateHigherCusp && o.verdict == "NotCusp25") return true;
    return false;
}

inline bool classification_is_unresolved(const Classification& c) {
    if (c.verdict != Verdict::Unclassified) return false;
    for (const auto& r : c.reasons)
        if (r.find("unresolved") != std::string::npos) return true;
    return false;
}

} // namespace detail

inline CrosscheckReport crosscheck(const WData& w, const std::vector<SingularPoint>& pts,
                                   const std::vector<Classification>& cls) {
    CrosscheckReport rep;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CrosscheckEntry e;
        e.u = pts[i].u;
        e.v = pts[i].v;
        e.wdata_verdict = cls[i].verdict_string();
        OracleVerdict o = oracle_classify(w, pts[i]);
        e.oracle_verdict = o.verdict;
        e.oracle_margins = o.margins;
        e.agree = detail::verdicts_match(cls[i], o);
        e.counted = !(o.borderline || cls[i].borderline || detail::classification_is_unresolved(cls[i]));
        if (!e.counted) {
            rep.excluded++;
        } else if (e.agree) {
            rep.agreed++;
        } else {
            rep.disagreed++;
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sign audit: AB must be positive wherever the S1 branch was evaluated, and
// every degenerate/rank-0 Hessian determinant must be non-positive. A failure
// indicates a numerical defect, never a new singularity class.

struct AuditEntry {
    double u = 0, v = 0;
    std::string quantity;
    double value = 0;
    bool violated = false;
};

struct AuditReport {
    std::vector<AuditEntry> entries;
    int checked = 0;
    int violations = 0;

    void add(double u, double v, const std::string& name, double value, bool ok) {
        checked++;
        if (!ok) violations++;
        entries.push_back({u, v, name, value, !ok});
    }
};

inline AuditReport nonexistence_audit(const WData& w, const std::vector<SingularPoint>& points) {
    AuditReport rep;
    for (const auto& sp : points) {
        if (sp.rank == 0 || sp.is_degenerate) {
            try {
                const HessianData h = hessian_check(w, sp);
                rep.add(sp.u, sp.v, "hess_det", h.hess_det,
                        h.hess_det <= tol::kNonzero * h.scale * h.scale);
            } catch (const Error&) {
            }
        }
        if (sp.pure_g() && !sp.is_degenerate) {
            OracleVerdict o = oracle_classify(w, sp);
            auto it = o.margins.find("AB");
            if (it != o.margins.end() && std::abs(it->second) > 0)
                rep.add(sp.u, sp.v, "AB_product", it->second, it->second > 0.0);
            if (o.violation) rep.add(sp.u, sp.v, "oracle_verdict:" + o.verdict, 0.0, false);
        }
    }
    return rep;
}

} // namespace tmsurf
