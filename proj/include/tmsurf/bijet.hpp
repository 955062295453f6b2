#pragma once

#include <cmath>

#include "tmsurf/error.hpp"
#include "tmsurf/jet.hpp"

namespace tmsurf {

// Second-order bivariate jet: value and partial derivatives up to order two.
// Only what the degeneracy tests and Hessian checks need; the u- and v-jets of
// the W-data functions feed in through from_u/from_v.
struct Jet2 {
    double f = 0, fu = 0, fv = 0, fuu = 0, fuv = 0, fvv = 0;

    static Jet2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }

    // Lift a univariate jet (order >= 2) to a function of u alone / v alone.
    static Jet2 from_u(const Jet& a) { return {a.value(), a.derive(1), 0, a.derive(2), 0, 0}; }
    static Jet2 from_v(const Jet& a) { return {a.value(), 0, a.derive(1), 0, 0, a.derive(2)}; }

    Jet2 operator-() const { return {-f, -fu, -fv, -fuu, -fuv, -fvv}; }
    Jet2 operator+(const Jet2& o) const {
        return {f + o.f, fu + o.fu, fv + o.fv, fuu + o.fuu, fuv + o.fuv, fvv + o.fvv};
    }
    Jet2 operator-(const Jet2& o) const {
        return {f - o.f, fu - o.fu, fv - o.fv, fuu - o.fuu, fuv - o.fuv, fvv - o.fvv};
    }
    Jet2 operator*(const Jet2& o) const {
        return {f * o.f,
                fu * o.f + f * o.fu,
                fv * o.f + f * o.fv,
                fuu * o.f + 2 * fu * o.fu + f * o.fuu,
                fuv * o.f + fu * o.fv + fv * o.fu + f * o.fuv,
                fvv * o.f + 2 * fv * o.fv + f * o.fvv};
    }
    Jet2 operator*(double s) const { return {f * s, fu * s, fv * s, fuu * s, fuv * s, fvv * s}; }

    double max_abs() const {
        double m = std::abs(f);
        for (double x : {fu, fv, fuu, fuv, fvv}) m = std::max(m, std::abs(x));
        return m;
    }
};

inline Jet2 jet2_sqrt(const Jet2& x) {
    if (x.f <= 0) throw Error(ErrKind::Domain, "jet2_sqrt at a non-positive value");
    Jet2 s;
    s.f = std::sqrt(x.f);
    const double inv = 1.0 / (2.0 * s.f);
    s.fu = x.fu * inv;
    s.fv = x.fv * inv;
    s.fuu = (x.fuu - 2.0 * s.fu * s.fu) * inv;
    s.fuv = (x.fuv - 2.0 * s.fu * s.fv) * inv;
    s.fvv = (x.fvv - 2.0 * s.fv * s.fv) * inv;
    return s;
}

} // namespace tmsurf
