#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tmsurf/expr.hpp"
#include "tmsurf/lorentz.hpp"

namespace tmsurf {

struct Domain {
    double u_min = -1.0, u_max = 1.0;
    double v_min = -1.0, v_max = 1.0;

    bool contains(double u, double v) const {
        return u >= u_min && u <= u_max && v >= v_min && v <= v_max;
    }
};

// Evaluate to a plain value, resolving removable 0/0 points through jet
// cancellation before giving up.
inline double eval_value_robust(const Expr& e, double x, int order = 8) {
    try {
        return e.eval_value(x);
    } catch (const Error& err) {
        if (err.kind() != ErrKind::DivisionByZeroJet && err.kind() != ErrKind::InsufficientOrder)
            throw;
        return e.eval_jet(x, order).value();
    }
}

namespace detail {

// Adaptive Simpson with an absolute tolerance and a panel budget.
struct SimpsonState {
    int panels = 0;
    int max_panels = 1 << 15;
    double worst_err = 0.0;
};

template <typename F>
double simpson_rec(F& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth, SimpsonState& st) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth <= 0 || st.panels >= st.max_panels) {
        st.worst_err = std::max(st.worst_err, std::abs(err));
        return left + right + err;
    }
    if (std::abs(err) <= tol) return left + right + err;
    st.panels += 2;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, st) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, st);
}

template <typename F>
double integrate(F f, double a, double b, double tol = 1e-10) {
    if (a == b) return 0.0;
    SimpsonState st;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double r = simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48, st);
    if (st.worst_err > tol)
        throw Error(ErrKind::Numeric, "quadrature did not converge (achieved " +
                                          std::to_string(st.worst_err) + ", requested " +
                                          std::to_string(tol) + ")");
    return r;
}

} // namespace detail

// Real Weierstrass data (g1, g2, w1 du, w2 dv) with basepoint and initial position.
// g1, w1 are functions of u; g2, w2 of v. The alternates hold the second
// algebraically equivalent quotient when the data was recovered from null curves;
// they are consulted only if the primary fails to resolve at a point.
struct WData {
    Expr g1, g2, w1, w2;
    double u0 = 0.0, v0 = 0.0;
    Vec3 f0{0.0, 0.0, 0.0};
    int jet_order = 8;

    std::optional<Expr> g1_alt, g2_alt;

    // Components of f_u and f_v, (t, x, y). Built from the W-data, or taken
    // directly from the null-curve derivatives when those are exact.
    std::array<Expr, 3> fu_expr{}, fv_expr{};

    WData() = default;

    WData(Expr g1_, Expr g2_, Expr w1_, Expr w2_, double u0_ = 0.0, double v0_ = 0.0,
          Vec3 f0_ = {0, 0, 0})
        : g1(std::move(g1_)), g2(std::move(g2_)), w1(std::move(w1_)), w2(std::move(w2_)),
          u0(u0_), v0(v0_), f0(f0_) {
        rebuild_integrands();
    }

    void rebuild_integrands() {
        const Expr half = Expr::constant(0.5);
        const Expr one = Expr::constant(1.0);
        fu_expr = {(-(one + g1 * g1)) * w1 * half, (one - g1 * g1) * w1 * half, g1 * w1};
        fv_expr = {(one + g2 * g2) * w2 * half, (one - g2 * g2) * w2 * half, -(g2 * w2)};
    }

    Jet g1_jet(double u, int order = -1) const { return g_jet(g1, g1_alt, u, pick(order), jet_order); }
    Jet g2_jet(double v, int order = -1) const { return g_jet(g2, g2_alt, v, pick(order), jet_order); }
    Jet w1_jet(double u, int order = -1) const { return resolved_jet(w1, u, pick(order), jet_order); }
    Jet w2_jet(double v, int order = -1) const { return resolved_jet(w2, v, pick(order), jet_order); }

private:
    int pick(int order) const { return order < 0 ? jet_order : order; }

    // Evaluate with cancellation headroom, then cut down to the requested order.
    static Jet resolved_jet(const Expr& e, double x, int order, int full) {
        Jet j = e.eval_jet(x, std::max(full, order + 2));
        if (j.order() < order)
            throw Error(ErrKind::InsufficientOrder,
                        "cancellation consumed too many orders at this point");
        return j.order() > order ? j.truncated(order) : j;
    }

    static Jet g_jet(const Expr& primary, const std::optional<Expr>& alt, double x, int order,
                     int full) {
        try {
            return resolved_jet(primary, x, order, full);
        } catch (const Error& e) {
            if (e.kind() == ErrKind::DivisionByZeroJet || e.kind() == ErrKind::InsufficientOrder) {
                if (alt) {
                    try {
                        return resolved_jet(*alt, x, order, full);
                    } catch (const Error&) {
                    }
                }
                throw Error(ErrKind::Finiteness,
                            std::string("g is not finite here (") + e.what() + ")");
            }
            throw;
        }
    }
};

// Pair of null curves generating f = (phi(u) + psi(v))/2. When derivative_form
// is set the stored expressions are the velocity components, not positions.
struct NullCurvePair {
    std::array<Expr, 3> phi, psi;
    bool derivative_form = false;
    double u_min = -1.0, u_max = 1.0;
    double v_min = -1.0, v_max = 1.0;
};

struct NullCheckReport {
    double max_residual = 0.0;
    double speed2 = 0.0;  // max Euclidean |c'|^2 over the samples
    double worst_at = 0.0;
    bool pass = false;
};

// Max |<c', c'>| over samples; passes iff <= 1e-9 * (max speed)^2.
inline NullCheckReport check_null(const std::array<Expr, 3>& velocity, double a, double b,
                                  int samples) {
    if (samples < 2) throw Error(ErrKind::Usage, "check_null: need at least 2 samples");
    NullCheckReport rep;
    for (int i = 0; i < samples; ++i) {
        const double s = a + (b - a) * i / (samples - 1);
        Vec3 d{eval_value_robust(velocity[0], s), eval_value_robust(velocity[1], s),
               eval_value_robust(velocity[2], s)};
        const double res = std::abs(minkowski_dot(d, d));
        rep.speed2 = std::max(rep.speed2, euclid_dot(d, d));
        if (res > rep.max_residual) {
            rep.max_residual = res;
            rep.worst_at = s;
        }
    }
    rep.pass = rep.max_residual <= 1e-9 * std::max(rep.speed2, 1e-300);
    return rep;
}

namespace detail {

inline std::array<Expr, 3> curve_velocity(const std::array<Expr, 3>& c, bool derivative_form) {
    if (derivative_form) return c;
    return {c[0].derivative(), c[1].derivative(), c[2].derivative()};
}

// Rank the two equivalent g-quotients at the basepoint: fewer cancelled leading
// orders of the denominator wins, then the larger leading magnitude.
struct QuotientRank {
    int depth = 1000;
    double lead = 0.0;

    bool better_than(const QuotientRank& o) const {
        if (depth != o.depth) return depth < o.depth;
        return lead > o.lead;
    }
};

inline QuotientRank rank_denominator(const Expr& den, double x, int order) {
    QuotientRank r;
    try {
        Jet j = den.eval_jet(x, order);
        const int z = detail::leading_zeros(j);
        if (z > j.order()) return r;
        r.depth = z;
        r.lead = std::abs(j.c[static_cast<std::size_t>(z)]);
    } catch (const Error&) {
    }
    return r;
}

} // namespace detail

// Recover W-data from a null-curve pair. The quotient with the better-conditioned
// denominator at the basepoint becomes the primary formula; the other is kept as
// a fallback for points where the primary's cancellation runs out of orders.
inline WData from_null_curves(const NullCurvePair& p, double u0 = 0.0, double v0 = 0.0,
                              std::optional<Vec3> f0 = std::nullopt, int null_samples = 512) {
    const auto dphi = detail::curve_velocity(p.phi, p.derivative_form);
    const auto dpsi = detail::curve_velocity(p.psi, p.derivative_form);

    const auto rep_phi = check_null(dphi, p.u_min, p.u_max, null_samples);
    if (!rep_phi.pass)
        throw Error(ErrKind::Nullity,
                    "phi is not a null curve: |<phi',phi'>| = " + std::to_string(rep_phi.max_residual) +
                        " at s = " + std::to_string(rep_phi.worst_at));
    const auto rep_psi = check_null(dpsi, p.v_min, p.v_max, null_samples);
    if (!rep_psi.pass)
        throw Error(ErrKind::Nullity,
                    "psi is not a null curve: |<psi',psi'>| = " + std::to_string(rep_psi.max_residual) +
                        " at s = " + std::to_string(rep_psi.worst_at));

    const Expr half = Expr::constant(0.5);
    const Expr two = Expr::constant(2.0);

    WData w;
    w.w1 = (dphi[1] - dphi[0]) * half;
    w.w2 = (dpsi[0] + dpsi[1]) * half;

    Expr g1_a = dphi[2] / (two * w.w1);
    Expr g1_b = -((dphi[0] + dphi[1]) / dphi[2]);
    Expr g2_a = -(dpsi[2] / (two * w.w2));
    Expr g2_b = -((dpsi[0] - dpsi[1]) / dpsi[2]);

    const int K = w.jet_order;
    if (detail::rank_denominator(two * w.w1, u0, K).better_than(detail::rank_denominator(dphi[2], u0, K))) {
        w.g1 = g1_a;
        w.g1_alt = g1_b;
    } else {
        w.g1 = g1_b;
        w.g1_alt = g1_a;
    }
    if (detail::rank_denominator(two * w.w2, v0, K).better_than(detail::rank_denominator(dpsi[2], v0, K))) {
        w.g2 = g2_a;
        w.g2_alt = g2_b;
    } else {
        w.g2 = g2_b;
        w.g2_alt = g2_a;
    }

    w.u0 = u0;
    w.v0 = v0;
    if (f0) {
        w.f0 = *f0;
    } else if (!p.derivative_form) {
        Vec3 pu{p.phi[0].eval_value(u0), p.phi[1].eval_value(u0), p.phi[2].eval_value(u0)};
        Vec3 pv{p.psi[0].eval_value(v0), p.psi[1].eval_value(v0), p.psi[2].eval_value(v0)};
        w.f0 = (pu + pv) * 0.5;
    }

    // The curve velocities are exact; use them as the integrands.
    w.fu_expr = {dphi[0] * half, dphi[1] * half, dphi[2] * half};
    w.fv_expr = {dpsi[0] * half, dpsi[1] * half, dpsi[2] * half};
    return w;
}

// Position by adaptive quadrature of the two line integrals.
inline Vec3 eval_position(const WData& w, double u, double v, double tol = 1e-10) {
    auto line = [&](const std::array<Expr, 3>& comp, double a, double b) {
        Vec3 r{};
        r.t = detail::integrate([&](double s) { return eval_value_robust(comp[0], s); }, a, b, tol);
        r.x = detail::integrate([&](double s) { return eval_value_robust(comp[1], s); }, a, b, tol);
        r.y = detail::integrate([&](double s) { return eval_value_robust(comp[2], s); }, a, b, tol);
        return r;
    };
    return w.f0 + line(w.fu_expr, w.u0, u) + line(w.fv_expr, w.v0, v);
}

// Precomputed positions on a parameter grid: f(u_i, v_j) = f0 + A_i + B_j.
struct PositionGrid {
    std::vector<double> us, vs;
    std::vector<Vec3> A, B;
    Vec3 f0;

    Vec3 at(std::size_t i, std::size_t j) const { return f0 + A[i] + B[j]; }
};

inline PositionGrid position_grid(const WData& w, const std::vector<double>& us,
                                  const std::vector<double>& vs, double tol = 1e-10) {
    PositionGrid g;
    g.us = us;
    g.vs = vs;
    g.f0 = w.f0;
    auto march = [&](const std::array<Expr, 3>& comp, double start, const std::vector<double>& xs) {
        std::vector<Vec3> acc(xs.size());
        double prev = start;
        Vec3 run{};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            Vec3 seg{};
            seg.t = detail::integrate([&](double s) { return eval_value_robust(comp[0], s); }, prev, xs[i], tol);
            seg.x = detail::integrate([&](double s) { return eval_value_robust(comp[1], s); }, prev, xs[i], tol);
            seg.y = detail::integrate([&](double s) { return eval_value_robust(comp[2], s); }, prev, xs[i], tol);
            run = run + seg;
            acc[i] = run;
            prev = xs[i];
        }
        return acc;
    };
    g.A = march(w.fu_expr, w.u0, us);
    g.B = march(w.fv_expr, w.v0, vs);
    return g;
}

// Pointwise frame: partials, Euclidean-unit normal, signed area density.
struct FramePoint {
    Vec3 f{};  // filled only when a position was requested separately
    Vec3 fu{}, fv{}, n{};
    double lambda = 0.0;
};

inline FramePoint eval_frame(const WData& w, double u, double v) {
    const double g1 = w.g1_jet(u, 0).value();
    const double g2 = w.g2_jet(v, 0).value();
    const double w1 = eval_value_robust(w.w1, u);
    const double w2 = eval_value_robust(w.w2, v);
    FramePoint fp;
    fp.fu = Vec3{-1.0 - g1 * g1, 1.0 - g1 * g1, 2.0 * g1} * (0.5 * w1);
    fp.fv = Vec3{1.0 + g2 * g2, 1.0 - g2 * g2, -2.0 * g2} * (0.5 * w2);
    const double m = std::sqrt((1.0 - g1 * g2) * (1.0 - g1 * g2) + 2.0 * (g1 + g2) * (g1 + g2));
    fp.n = Vec3{g1 + g2, -g1 + g2, 1.0 + g1 * g2} / m;
    fp.lambda = det3(fp.fu, fp.fv, fp.n);
    return fp;
}

// The signed area density factored as Lambda * (1 - g1 g2) * w1 * w2.
struct AreaDensityFactors {
    double Lambda = 0.0;
    double one_minus_g1g2 = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;

    double lambda() const { return Lambda * one_minus_g1g2 * w1 * w2; }
};

inline AreaDensityFactors area_density_factored(const WData& w, double u, double v) {
    const double g1 = w.g1_jet(u, 0).value();
    const double g2 = w.g2_jet(v, 0).value();
    AreaDensityFactors f;
    f.w1 = eval_value_robust(w.w1, u);
    f.w2 = eval_value_robust(w.w2, v);
    f.one_minus_g1g2 = 1.0 - g1 * g2;
    f.Lambda = -0.5 * std::sqrt(f.one_minus_g1g2 * f.one_minus_g1g2 + 2.0 * (g1 + g2) * (g1 + g2));
    return f;
}

// Hopf differential coefficients Q = w1 * g1' and R = -w2 * g2'; both extend
// smoothly across singular points.
inline std::pair<double, double> hopf(const WData& w, double u, double v) {
    const Jet g1 = w.g1_jet(u);
    const Jet g2 = w.g2_jet(v);
    const double Q = eval_value_robust(w.w1, u) * g1.derive(1);
    const double R = -eval_value_robust(w.w2, v) * g2.derive(1);
    return {Q, R};
}

// Conjugate surface: (g1, g2, w1, -w2).
inline WData conjugate(const WData& w) {
    WData r = w;
    r.w2 = -w.w2;
    for (auto& c : r.fv_expr) c = -c;
    return r;
}

// Associated family member: (g1, g2, e^theta w1, e^-theta w2).
inline WData associate(const WData& w, double theta) {
    if (theta == 0.0) return w;
    WData r = w;
    const Expr ep = Expr::constant(std::exp(theta));
    const Expr em = Expr::constant(std::exp(-theta));
    r.w1 = ep * w.w1;
    r.w2 = em * w.w2;
    for (auto& c : r.fu_expr) c = ep * c;
    for (auto& c : r.fv_expr) c = em * c;
    return r;
}

} // namespace tmsurf
