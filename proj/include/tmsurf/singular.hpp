#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmsurf/bijet.hpp"
#include "tmsurf/surface.hpp"

namespace tmsurf {

// Shared numeric policy. Criterion quantities are "zero" below kZero * scale and
// "nonzero" above kNonzero * scale; the gap in between is reported as borderline
// rather than silently resolved either way.
namespace tol {
inline double kZero = 1e-9;
inline double kNonzero = 1e-6;
inline double kKind = 1e-10;       // singular-set membership
inline double kRootTarget = 1e-12; // root polish target
inline double kDedup = 1e-7;       // parameter-space merge radius
} // namespace tol

// A measured quantity together with the magnitude scale of its constituents.
struct Q {
    double value = 0.0;
    double scale = 1.0;
};

enum class Tri { Zero, NonZero, Borderline };

inline Tri tri(const Q& q) {
    const double s = std::max(1.0, q.scale);
    const double a = std::abs(q.value);
    if (a <= tol::kZero * s) return Tri::Zero;
    if (a >= tol::kNonzero * s) return Tri::NonZero;
    return Tri::Borderline;
}

inline bool is_zero(const Q& q) { return tri(q) == Tri::Zero; }
inline bool is_nonzero(const Q& q) { return tri(q) == Tri::NonZero; }

// ---------------------------------------------------------------------------
// 1-D root isolation: 2048-point scan, sign changes polished by bisection and
// Newton; tangential (no-sign-change) zeros recovered by local minimization and
// flagged low-confidence.

struct RootInfo {
    double x = 0.0;
    bool tangential = false;
    bool low_confidence = false;
    int multiplicity = 1; // hint: >1 when the derivative also vanishes
};

namespace detail {

struct Fn1D {
    // value and derivative; evaluations may throw, callers treat that as a gap
    std::function<double(double)> f;
    std::function<double(double)> df;
};

inline std::vector<RootInfo> find_roots_1d(const Fn1D& fn, double a, double b, int n_scan) {
    std::vector<RootInfo> roots;
    if (!(b > a)) return roots;
    auto safe_f = [&](double x) {
        try {
            return fn.f(x);
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    auto safe_df = [&](double x) {
        try {
            return fn.df(x);
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    std::vector<double> xs(static_cast<std::size_t>(n_scan)), ys(xs.size());
    double scale = 0.0;
    for (int i = 0; i < n_scan; ++i) {
        xs[static_cast<std::size_t>(i)] = a + (b - a) * i / (n_scan - 1);
        const double y = safe_f(xs[static_cast<std::size_t>(i)]);
        ys[static_cast<std::size_t>(i)] = y;
        if (std::isfinite(y)) scale = std::max(scale, std::abs(y));
    }
    if (scale == 0.0) return roots; // identically zero within sampling; nothing isolable
    const double target = tol::kRootTarget * std::max(1.0, scale);

    auto polish = [&](double lo, double hi) -> double {
        double flo = safe_f(lo);
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = safe_f(mid);
            if (fm == 0.0) return mid;
            if (!std::isfinite(fm)) break;
            if ((flo < 0) != (fm < 0)) {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 10; ++it) {
            const double fx = safe_f(x);
            if (!std::isfinite(fx) || std::abs(fx) <= target) break;
            const double dx = safe_df(x);
            if (dx == 0.0 || !std::isfinite(dx)) break;
            const double nx = x - fx / dx;
            if (nx < a || nx > b) break;
            x = nx;
        }
        return x;
    };

    const double near = tol::kNonzero * std::max(1.0, scale);
    std::vector<char> consumed(ys.size(), 0);

    for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
        const double y0 = ys[i], y1 = ys[i + 1];
        if (!std::isfinite(y0) || !std::isfinite(y1)) continue;
        if ((y0 < 0) != (y1 < 0)) {
            RootInfo r;
            r.x = polish(xs[i], xs[i + 1]);
            const double residual = std::abs(safe_f(r.x));
            if (!(residual <= near)) continue; // a pole crossing, not a zero
            const double d = safe_df(r.x);
            const double dscale = std::max(1.0, scale / std::max(b - a, 1e-12));
            if (!std::isfinite(d) || std::abs(d) <= tol::kNonzero * dscale) {
                r.multiplicity = 3;
                r.low_confidence = true;
            }
            if (residual > target) r.low_confidence = true;
            roots.push_back(r);
            consumed[i] = consumed[i + 1] = 1;
        }
    }

    // Tangential zeros: dips of |f| below the nonzero threshold without a sign
    // change. Bracket the local minimum and drive f' to zero.
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
        if (consumed[i - 1] || consumed[i] || consumed[i + 1]) continue;
        const double y0 = ys[i - 1], y1 = ys[i], y2 = ys[i + 1];
        if (!std::isfinite(y0) || !std::isfinite(y1) || !std::isfinite(y2)) continue;
        if (std::abs(y1) > near) continue;
        if (std::abs(y1) > std::abs(y0) || std::abs(y1) > std::abs(y2)) continue;
        // Newton on f' (root of derivative = bottom of the dip)
        double x = xs[i];
        bool ok = false;
        try {
            for (int it = 0; it < 60; ++it) {
                const double d = fn.df(x);
                const double h = 0.5 * (xs[i + 1] - xs[i - 1]);
                const double d2 = (fn.df(std::min(x + 1e-6, b)) - fn.df(std::max(x - 1e-6, a))) /
                                  (std::min(x + 1e-6, b) - std::max(x - 1e-6, a));
                if (!std::isfinite(d2) || d2 == 0.0) break;
                double nx = x - d / d2;
                if (nx < xs[i - 1] - h || nx > xs[i + 1] + h) break;
                if (std::abs(nx - x) < 1e-15) {
                    x = nx;
                    ok = true;
                    break;
                }
                x = nx;
                ok = true;
            }
            if (ok && std::abs(fn.f(x)) <= tol::kZero * std::max(1.0, scale)) {
                RootInfo r;
                r.x = x;
                r.tangential = true;
                r.low_confidence = true;
                r.multiplicity = 2;
                roots.push_back(r);
            }
        } catch (const Error&) {
        }
        consumed[i] = 1;
    }

    std::sort(roots.begin(), roots.end(), [](const RootInfo& p, const RootInfo& q) { return p.x < q.x; });
    std::vector<RootInfo> out;
    for (const auto& r : roots) {
        if (!out.empty() && std::abs(r.x - out.back().x) <= tol::kDedup) {
            if (!r.low_confidence) out.back() = r; // keep the confident one
            continue;
        }
        out.push_back(r);
    }
    return out;
}

} // namespace detail

struct WZeroLines {
    std::vector<RootInfo> u_roots; // zeros of w1(u): vertical singular lines
    std::vector<RootInfo> v_roots; // zeros of w2(v): horizontal singular lines
};

inline WZeroLines find_w_zero_lines(const WData& w, double u_min, double u_max, double v_min,
                                    double v_max, int n_scan = 2048) {
    WZeroLines out;
    detail::Fn1D f1{[&](double u) { return eval_value_robust(w.w1, u); },
                    [&](double u) { return w.w1_jet(u, 1).derive(1); }};
    detail::Fn1D f2{[&](double v) { return eval_value_robust(w.w2, v); },
                    [&](double v) { return w.w2_jet(v, 1).derive(1); }};
    out.u_roots = detail::find_roots_1d(f1, u_min, u_max, n_scan);
    out.v_roots = detail::find_roots_1d(f2, v_min, v_max, n_scan);
    return out;
}

// ---------------------------------------------------------------------------
// g-singular curve tracing on {g1(u) g2(v) = 1}.

struct CurveSample {
    double t = 0.0;
    double u = 0.0, v = 0.0;
    double du = 0.0, dv = 0.0;     // singular direction field at the sample
    double eta_u = 0.0, eta_v = 0.0; // null direction (NaN when w vanishes)
};

struct GCurve {
    std::vector<CurveSample> pts;
    bool degenerate_end = false; // gradient collapsed (candidate beaks / node)
    double degen_u = 0.0, degen_v = 0.0;
};

namespace detail {

struct GEval {
    const WData& w;

    double G(double u, double v) const {
        return w.g1_jet(u, 0).value() * w.g2_jet(v, 0).value() - 1.0;
    }
    // gradient (g1' g2, g1 g2')
    void grad(double u, double v, double& gu, double& gv) const {
        const Jet j1 = w.g1_jet(u, 1);
        const Jet j2 = w.g2_jet(v, 1);
        gu = j1.derive(1) * j2.value();
        gv = j1.value() * j2.derive(1);
    }
    double scale(double u, double v) const {
        return std::max(1.0, std::abs(w.g1_jet(u, 0).value() * w.g2_jet(v, 0).value()));
    }
};

} // namespace detail

inline GCurve trace_g_curve(const WData& w, double seed_u, double seed_v, double step,
                            int max_steps, const Domain& dom) {
    detail::GEval ge{w};
    const double g_tol = 1e-10;

    if (std::abs(ge.G(seed_u, seed_v)) > g_tol * ge.scale(seed_u, seed_v))
        throw Error(ErrKind::Usage, "trace_g_curve: seed is not on {g1 g2 = 1}");

    auto corrector = [&](double& u, double& v) -> bool {
        for (int it = 0; it < 12; ++it) {
            const double g = ge.G(u, v);
            if (std::abs(g) <= g_tol * ge.scale(u, v)) return true;
            double gu, gv;
            ge.grad(u, v, gu, gv);
            const double n2 = gu * gu + gv * gv;
            if (n2 < 1e-30) return false;
            u -= g * gu / n2;
            v -= g * gv / n2;
        }
        return std::abs(ge.G(u, v)) <= g_tol * ge.scale(u, v);
    };

    auto sample_at = [&](double t, double u, double v) {
        CurveSample s;
        s.t = t;
        s.u = u;
        s.v = v;
        try {
            const Jet j1 = w.g1_jet(u, 1), j2 = w.g2_jet(v, 1);
            s.du = j2.derive(1) / j2.value();
            s.dv = -j1.derive(1) / j1.value();
            const double w1 = eval_value_robust(w.w1, u), w2 = eval_value_robust(w.w2, v);
            s.eta_u = 1.0 / (j1.value() * w1);
            s.eta_v = 1.0 / (j2.value() * w2);
        } catch (const Error&) {
            s.eta_u = s.eta_v = std::numeric_limits<double>::quiet_NaN();
        }
        return s;
    };

    GCurve curve;
    std::vector<CurveSample> fwd, bwd;

    for (int dir = 0; dir < 2; ++dir) {
        double u = seed_u, v = seed_v;
        double pu = 0, pv = 0; // previous tangent
        bool have_prev = false;
        std::vector<CurveSample>& side = dir == 0 ? fwd : bwd;
        for (int k = 0; k < max_steps; ++k) {
            double gu, gv;
            try {
                ge.grad(u, v, gu, gv);
            } catch (const Error&) {
                break;
            }
            const double n = std::hypot(gu, gv);
            if (n < 1e-8 * ge.scale(u, v)) {
                curve.degenerate_end = true;
                curve.degen_u = u;
                curve.degen_v = v;
                break;
            }
            double tu = -gv / n, tv = gu / n;
            if (!have_prev && dir == 1) {
                tu = -tu;
                tv = -tv;
            }
            if (have_prev && tu * pu + tv * pv < 0) {
                tu = -tu;
                tv = -tv;
            }
            double h = step;
            double nu = u, nv = v;
            bool ok = false;
            for (int attempt = 0; attempt < 5; ++attempt) {
                nu = u + h * tu;
                nv = v + h * tv;
                try {
                    if (corrector(nu, nv)) {
                        ok = true;
                        break;
                    }
                } catch (const Error&) {
                }
                h *= 0.5;
            }
            if (!ok) break;
            if (!dom.contains(nu, nv)) break;
            u = nu;
            v = nv;
            pu = tu;
            pv = tv;
            have_prev = true;
            side.push_back(sample_at((dir == 0 ? 1.0 : -1.0) * (k + 1) * step, u, v));
        }
    }

    curve.pts.reserve(bwd.size() + 1 + fwd.size());
    for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) curve.pts.push_back(*it);
    curve.pts.push_back(sample_at(0.0, seed_u, seed_v));
    curve.pts.insert(curve.pts.end(), fwd.begin(), fwd.end());
    return curve;
}

// ---------------------------------------------------------------------------
// Structural analysis of one singular point.

struct SingularPoint {
    double u = 0.0, v = 0.0;
    bool kindG = false, kindW1 = false, kindW2 = false;
    int rank = 1;
    bool is_front = false;
    bool is_degenerate = false;
    bool low_confidence = false;
    std::map<std::string, double> margins;
    std::vector<std::string> notes;

    bool pure_g() const { return kindG && !kindW1 && !kindW2; }
    bool pure_w() const { return !kindG && (kindW1 != kindW2); }

    std::string kinds_string() const {
        std::string s;
        if (kindG) s += "G";
        if (kindW1) s += s.empty() ? "W1" : "+W1";
        if (kindW2) s += s.empty() ? "W2" : "+W2";
        return s;
    }
};

// The quotients phi_i = g_i' / (g_i^2 w_i) as jets in their own variable.
struct VarphiJets {
    Jet varphi1, varphi2;
    bool ok1 = false, ok2 = false;
    std::string err1, err2;
};

inline VarphiJets compute_varphi_jets(const WData& w, double u, double v) {
    VarphiJets r;
    r.varphi1 = Jet::constant(0, u, 0);
    r.varphi2 = Jet::constant(0, v, 0);
    try {
        Jet g1 = w.g1_jet(u), w1 = w.w1_jet(u);
        Jet g1p = g1.derivative();
        Jet den = jet_mul(jet_mul(g1.truncated(g1p.order()), g1.truncated(g1p.order())),
                          w1.truncated(g1p.order()));
        r.varphi1 = jet_div(g1p, den);
        r.ok1 = true;
    } catch (const Error& e) {
        r.err1 = e.what();
    }
    try {
        Jet g2 = w.g2_jet(v), w2 = w.w2_jet(v);
        Jet g2p = g2.derivative();
        Jet den = jet_mul(jet_mul(g2.truncated(g2p.order()), g2.truncated(g2p.order())),
                          w2.truncated(g2p.order()));
        r.varphi2 = jet_div(g2p, den);
        r.ok2 = true;
    } catch (const Error& e) {
        r.err2 = e.what();
    }
    return r;
}

// Signed area density as a second-order bivariate jet (for d-lambda and Hessians).
inline Jet2 lambda_jet2(const WData& w, double u, double v) {
    const Jet2 g1 = Jet2::from_u(w.g1_jet(u, 2));
    const Jet2 g2 = Jet2::from_v(w.g2_jet(v, 2));
    const Jet2 w1 = Jet2::from_u(w.w1_jet(u, 2));
    const Jet2 w2 = Jet2::from_v(w.w2_jet(v, 2));
    const Jet2 one = Jet2::constant(1.0);
    const Jet2 om = one - g1 * g2;
    const Jet2 s = om * om + (g1 + g2) * (g1 + g2) * 2.0;
    const Jet2 Lambda = jet2_sqrt(s) * -0.5;
    return Lambda * om * w1 * w2;
}

inline SingularPoint analyze_point(const WData& w, double u, double v) {
    SingularPoint sp;
    sp.u = u;
    sp.v = v;

    Jet g1j, g2j, w1j, w2j;
    try {
        g1j = w.g1_jet(u);
        g2j = w.g2_jet(v);
        w1j = w.w1_jet(u);
        w2j = w.w2_jet(v);
    } catch (const Error& e) {
        if (e.kind() == ErrKind::Finiteness) throw;
        throw Error(ErrKind::Finiteness, std::string("W-data does not resolve at this point: ") + e.what());
    }

    const double g1 = g1j.value(), g2 = g2j.value();
    const double w1 = w1j.value(), w2 = w2j.value();
    const double g1p = g1j.derive(1), g2p = g2j.derive(1);
    const double w1p = w1j.derive(1), w2p = w2j.derive(1);

    const double Gval = g1 * g2 - 1.0;
    const double g_scale = std::max(1.0, std::abs(g1 * g2));
    const double w1_scale = std::max(1.0, detail::coeff_scale(w1j));
    const double w2_scale = std::max(1.0, detail::coeff_scale(w2j));

    sp.kindG = std::abs(Gval) <= tol::kKind * g_scale;
    sp.kindW1 = std::abs(w1) <= tol::kKind * w1_scale;
    sp.kindW2 = std::abs(w2) <= tol::kKind * w2_scale;

    sp.margins["g1"] = g1;
    sp.margins["g2"] = g2;
    sp.margins["w1"] = w1;
    sp.margins["w2"] = w2;
    sp.margins["g1g2_minus_1"] = Gval;
    sp.margins["g1_u"] = g1p;
    sp.margins["g2_v"] = g2p;
    sp.margins["w1_u"] = w1p;
    sp.margins["w2_v"] = w2p;

    if (!sp.kindG && !sp.kindW1 && !sp.kindW2)
        throw Error(ErrKind::NotSingular, "analyze_point: the point is not singular");

    sp.rank = (sp.kindW1 && sp.kindW2) ? 0 : 1;

    // degeneracy from the factored area density
    const Jet2 lam = lambda_jet2(w, u, v);
    const double lscale = std::max(1.0, lam.max_abs());
    sp.margins["lambda"] = lam.f;
    sp.margins["lambda_u"] = lam.fu;
    sp.margins["lambda_v"] = lam.fv;
    sp.is_degenerate =
        std::abs(lam.fu) <= tol::kZero * lscale && std::abs(lam.fv) <= tol::kZero * lscale;

    // front property
    if (sp.rank == 0) {
        const Q front_g{Gval, g_scale};
        const Q front_d{g1p * g2p, std::max({1.0, std::abs(g1p), std::abs(g2p)})};
        sp.is_front = is_nonzero(front_g) && is_nonzero(front_d);
        if (tri(front_g) == Tri::Borderline || tri(front_d) == Tri::Borderline) {
            sp.low_confidence = true;
            sp.notes.push_back("borderline rank-0 front condition");
        }
    } else if (sp.kindW1 && !sp.kindG && !sp.kindW2) {
        sp.is_front = is_nonzero(Q{g1p, std::max(1.0, detail::coeff_scale(g1j))});
    } else if (sp.kindW2 && !sp.kindG && !sp.kindW1) {
        sp.is_front = is_nonzero(Q{g2p, std::max(1.0, detail::coeff_scale(g2j))});
    } else if (sp.kindG && (sp.kindW1 || sp.kindW2)) {
        // omega-side front test (Lemma-type condition on the non-vanishing side)
        sp.is_front = sp.kindW2 ? is_nonzero(Q{g2p, std::max(1.0, detail::coeff_scale(g2j))})
                                : is_nonzero(Q{g1p, std::max(1.0, detail::coeff_scale(g1j))});
    } else {
        // pure g-singular rank-1 point: front iff varphi1 != varphi2
        VarphiJets vp = compute_varphi_jets(w, u, v);
        if (vp.ok1 && vp.ok2) {
            const double p1 = vp.varphi1.value(), p2 = vp.varphi2.value();
            sp.margins["sum"] = p1 + p2;
            sp.margins["diff"] = p1 - p2;
            const double pscale = std::max({1.0, std::abs(p1), std::abs(p2)});
            sp.is_front = is_nonzero(Q{p1 - p2, pscale});
            if (tri(Q{p1 - p2, pscale}) == Tri::Borderline) {
                sp.low_confidence = true;
                sp.notes.push_back("borderline front condition (varphi1 - varphi2)");
            }
        } else {
            sp.low_confidence = true;
            sp.notes.push_back("varphi quotient unresolved: " + (vp.ok1 ? vp.err2 : vp.err1));
        }
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Domain scan: omega lines, their intersections, g-curves and their special
// points, all merged into one deduplicated candidate list.

struct ScanOptions {
    bool trace_curves = true;
    double trace_step = 0.0; // 0: derived from the grid spacing
    int max_trace_steps = 4000;
    int n_scan_1d = 2048;
    int curve_samples = 33; // classification samples kept per traced curve
    bool locate_delta_zeros = true;
};

struct ScanResult {
    std::vector<SingularPoint> points;
    std::vector<GCurve> curves;
    std::vector<RootInfo> u_roots, v_roots;
    std::vector<std::string> notes;
};

namespace detail {

struct Candidate {
    double u, v;
    int priority; // smaller wins the dedup
    bool low_confidence = false;
};

inline bool g_finite_at(const WData& w, double u, double v, bool check_u, bool check_v) {
    try {
        if (check_u) (void)w.g1_jet(u, 2);
        if (check_v) (void)w.g2_jet(v, 2);
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace detail

inline ScanResult singular_scan(const WData& w, const Domain& dom, int nu, int nv,
                                const ScanOptions& opts = {}) {
    if (nu < 2 || nv < 2) throw Error(ErrKind::Usage, "singular_scan: grid must be at least 2x2");
    ScanResult res;
    std::vector<detail::Candidate> cands;

    // 1. omega lines, dropped where g blows up (the factored density is then
    //    nonzero and the line is not actually singular)
    WZeroLines lines = find_w_zero_lines(w, dom.u_min, dom.u_max, dom.v_min, dom.v_max, opts.n_scan_1d);
    for (const auto& r : lines.u_roots) {
        if (!detail::g_finite_at(w, r.x, 0, true, false)) {
            res.notes.push_back("dropped u-root " + std::to_string(r.x) + ": g1 not finite there");
            continue;
        }
        res.u_roots.push_back(r);
    }
    for (const auto& r : lines.v_roots) {
        if (!detail::g_finite_at(w, 0, r.x, false, true)) {
            res.notes.push_back("dropped v-root " + std::to_string(r.x) + ": g2 not finite there");
            continue;
        }
        res.v_roots.push_back(r);
    }

    // 2. rank-zero candidates at line intersections
    for (const auto& ru : res.u_roots)
        for (const auto& rv : res.v_roots)
            cands.push_back({ru.x, rv.x, 0, ru.low_confidence || rv.low_confidence});

    // 3. g-crossings on each omega line (beaks candidates)
    for (const auto& ru : res.u_roots) {
        double g1v;
        try {
            g1v = w.g1_jet(ru.x, 0).value();
        } catch (const Error&) {
            continue;
        }
        detail::Fn1D fn{[&, g1v](double v) { return g1v * w.g2_jet(v, 0).value() - 1.0; },
                        [&, g1v](double v) { return g1v * w.g2_jet(v, 1).derive(1); }};
        for (const auto& rv : detail::find_roots_1d(fn, dom.v_min, dom.v_max, opts.n_scan_1d / 4))
            cands.push_back({ru.x, rv.x, 1, rv.low_confidence});
    }
    for (const auto& rv : res.v_roots) {
        double g2v;
        try {
            g2v = w.g2_jet(rv.x, 0).value();
        } catch (const Error&) {
            continue;
        }
        detail::Fn1D fn{[&, g2v](double u) { return w.g1_jet(u, 0).value() * g2v - 1.0; },
                        [&, g2v](double u) { return w.g1_jet(u, 1).derive(1) * g2v; }};
        for (const auto& ru : detail::find_roots_1d(fn, dom.u_min, dom.u_max, opts.n_scan_1d / 4))
            cands.push_back({ru.x, rv.x, 1, ru.low_confidence});
    }

    // 4. g-curves from grid sign changes
    const double du = (dom.u_max - dom.u_min) / (nu - 1);
    const double dv = (dom.v_max - dom.v_min) / (nv - 1);
    detail::GEval ge{w};
    if (opts.trace_curves) {
        std::vector<double> g1row(static_cast<std::size_t>(nu)), g2col(static_cast<std::size_t>(nv));
        std::vector<char> ok1(g1row.size(), 0), ok2(g2col.size(), 0);
        for (int i = 0; i < nu; ++i) {
            try {
                g1row[static_cast<std::size_t>(i)] = w.g1_jet(dom.u_min + i * du, 0).value();
                ok1[static_cast<std::size_t>(i)] = 1;
            } catch (const Error&) {
            }
        }
        for (int j = 0; j < nv; ++j) {
            try {
                g2col[static_cast<std::size_t>(j)] = w.g2_jet(dom.v_min + j * dv, 0).value();
                ok2[static_cast<std::size_t>(j)] = 1;
            } catch (const Error&) {
            }
        }
        auto Gij = [&](int i, int j) { return g1row[static_cast<std::size_t>(i)] * g2col[static_cast<std::size_t>(j)] - 1.0; };

        std::vector<std::pair<double, double>> seeds;
        auto polish_seed = [&](double su, double sv) {
            for (int it = 0; it < 25; ++it) {
                double g;
                double gu, gv;
                try {
                    g = ge.G(su, sv);
                    if (std::abs(g) <= 1e-10 * ge.scale(su, sv)) return std::optional(std::pair(su, sv));
                    ge.grad(su, sv, gu, gv);
                } catch (const Error&) {
                    return std::optional<std::pair<double, double>>{};
                }
                const double n2 = gu * gu + gv * gv;
                if (n2 < 1e-24) return std::optional<std::pair<double, double>>{};
                su -= g * gu / n2;
                sv -= g * gv / n2;
                if (!dom.contains(su, sv)) return std::optional<std::pair<double, double>>{};
            }
            return std::optional<std::pair<double, double>>{};
        };
        for (int i = 0; i < nu; ++i) {
            for (int j = 0; j < nv; ++j) {
                if (!ok1[static_cast<std::size_t>(i)] || !ok2[static_cast<std::size_t>(j)]) continue;
                const double g00 = Gij(i, j);
                if (i + 1 < nu && ok1[static_cast<std::size_t>(i + 1)]) {
                    const double g10 = Gij(i + 1, j);
                    if ((g00 < 0) != (g10 < 0)) {
                        const double fr = g00 / (g00 - g10);
                        if (auto s = polish_seed(dom.u_min + (i + fr) * du, dom.v_min + j * dv))
                            seeds.push_back(*s);
                    }
                }
                if (j + 1 < nv && ok2[static_cast<std::size_t>(j + 1)]) {
                    const double g01 = Gij(i, j + 1);
                    if ((g00 < 0) != (g01 < 0)) {
                        const double fr = g00 / (g00 - g01);
                        if (auto s = polish_seed(dom.u_min + i * du, dom.v_min + (j + fr) * dv))
                            seeds.push_back(*s);
                    }
                }
            }
        }

        const double step = opts.trace_step > 0 ? opts.trace_step : 0.5 * std::min(du, dv);
        const double consume_r = 2.0 * step;
        std::vector<char> used(seeds.size(), 0);
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            if (used[s]) continue;
            GCurve c;
            try {
                c = trace_g_curve(w, seeds[s].first, seeds[s].second, step, opts.max_trace_steps, dom);
            } catch (const Error&) {
                continue;
            }
            for (std::size_t s2 = s; s2 < seeds.size(); ++s2) {
                if (used[s2]) continue;
                for (const auto& p : c.pts) {
                    if (std::abs(p.u - seeds[s2].first) <= consume_r &&
                        std::abs(p.v - seeds[s2].second) <= consume_r) {
                        used[s2] = 1;
                        break;
                    }
                }
            }
            if (c.degenerate_end) cands.push_back({c.degen_u, c.degen_v, 1, true});

            // classification samples along the curve
            const std::size_t n = c.pts.size();
            if (n > 0) {
                const std::size_t stride = std::max<std::size_t>(1, n / static_cast<std::size_t>(opts.curve_samples));
                for (std::size_t k = 0; k < n; k += stride) cands.push_back({c.pts[k].u, c.pts[k].v, 3, false});
            }

            // Zeros of varphi1 +/- varphi2 along the curve: swallowtail-type and
            // cross-cap-type points sit exactly there.
            if (opts.locate_delta_zeros && n >= 2) {
                auto locate = [&](int sign) {
                    auto q_at = [&](double uu, double vv) -> std::optional<double> {
                        VarphiJets vp = compute_varphi_jets(w, uu, vv);
                        if (!vp.ok1 || !vp.ok2) return std::nullopt;
                        return vp.varphi1.value() + sign * vp.varphi2.value();
                    };
                    std::optional<double> prev = q_at(c.pts[0].u, c.pts[0].v);
                    for (std::size_t k = 1; k < n; ++k) {
                        std::optional<double> cur = q_at(c.pts[k].u, c.pts[k].v);
                        if (prev && cur && (*prev < 0) != (*cur < 0)) {
                            double au = c.pts[k - 1].u, av = c.pts[k - 1].v;
                            double bu = c.pts[k].u, bv = c.pts[k].v;
                            double qa = *prev;
                            for (int it = 0; it < 60; ++it) {
                                double mu = 0.5 * (au + bu), mv = 0.5 * (av + bv);
                                if (auto ps = polish_seed(mu, mv)) {
                                    mu = ps->first;
                                    mv = ps->second;
                                }
                                auto qm = q_at(mu, mv);
                                if (!qm) break;
                                if ((qa < 0) != (*qm < 0)) {
                                    bu = mu;
                                    bv = mv;
                                } else {
                                    au = mu;
                                    av = mv;
                                    qa = *qm;
                                }
                            }
                            // a sign change across a pole is not a zero; keep only
                            // candidates where the quantity actually vanishes
                            const double fu = 0.5 * (au + bu), fv = 0.5 * (av + bv);
                            VarphiJets vj = compute_varphi_jets(w, fu, fv);
                            if (vj.ok1 && vj.ok2) {
                                const double qval = vj.varphi1.value() + sign * vj.varphi2.value();
                                const double qscale = std::max({1.0, detail::coeff_scale(vj.varphi1),
                                                                detail::coeff_scale(vj.varphi2)});
                                if (std::abs(qval) <= tol::kNonzero * qscale)
                                    cands.push_back({fu, fv, 2, false});
                            }
                        }
                        prev = cur;
                    }
                };
                locate(+1); // delta = varphi1 + varphi2 (swallowtail family)
                locate(-1); // varphi1 - varphi2 (cross-cap family)
            }
            res.curves.push_back(std::move(c));
        }
    }

    // 5. analyze and dedup
    std::stable_sort(cands.begin(), cands.end(),
                     [](const detail::Candidate& a, const detail::Candidate& b) { return a.priority < b.priority; });
    for (const auto& c : cands) {
        bool dup = false;
        for (const auto& p : res.points) {
            if (std::abs(p.u - c.u) <= tol::kDedup && std::abs(p.v - c.v) <= tol::kDedup) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        try {
            SingularPoint sp = analyze_point(w, c.u, c.v);
            sp.low_confidence = sp.low_confidence || c.low_confidence;
            res.points.push_back(std::move(sp));
        } catch (const Error& e) {
            if (e.kind() != ErrKind::NotSingular)
                res.notes.push_back("candidate (" + std::to_string(c.u) + ", " + std::to_string(c.v) +
                                    ") rejected: " + e.what());
        }
    }
    return res;
}

} // namespace tmsurf
