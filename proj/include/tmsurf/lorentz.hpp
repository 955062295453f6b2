#pragma once

#include <array>
#include <cmath>

#include "tmsurf/jet.hpp"

namespace tmsurf {

// Point/vector in Lorentz-Minkowski 3-space with inner product -dt^2 + dx^2 + dy^2.
// Components are ordered (t, x, y).
struct Vec3 {
    double t = 0.0, x = 0.0, y = 0.0;

    Vec3 operator+(const Vec3& o) const { return {t + o.t, x + o.x, y + o.y}; }
    Vec3 operator-(const Vec3& o) const { return {t - o.t, x - o.x, y - o.y}; }
    Vec3 operator*(double s) const { return {t * s, x * s, y * s}; }
    Vec3 operator/(double s) const { return {t / s, x / s, y / s}; }
    Vec3 operator-() const { return {-t, -x, -y}; }
};

inline double minkowski_dot(const Vec3& a, const Vec3& b) { return -a.t * b.t + a.x * b.x + a.y * b.y; }
inline double euclid_dot(const Vec3& a, const Vec3& b) { return a.t * b.t + a.x * b.x + a.y * b.y; }
inline double euclid_norm(const Vec3& a) { return std::sqrt(euclid_dot(a, a)); }

inline Vec3 cross_e(const Vec3& a, const Vec3& b) {
    return {a.x * b.y - a.y * b.x, a.y * b.t - a.t * b.y, a.t * b.x - a.x * b.t};
}

inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return euclid_dot(a, cross_e(b, c)); }

// Jet-valued 3-vector; component jets share base and order.
struct JetVec3 {
    Jet t, x, y;

    Vec3 value() const { return {t.value(), x.value(), y.value()}; }
};

inline JetVec3 operator+(const JetVec3& a, const JetVec3& b) {
    return {jet_add(a.t, b.t), jet_add(a.x, b.x), jet_add(a.y, b.y)};
}
inline JetVec3 operator-(const JetVec3& a, const JetVec3& b) {
    return {jet_sub(a.t, b.t), jet_sub(a.x, b.x), jet_sub(a.y, b.y)};
}
inline JetVec3 jet_vec_scale(const JetVec3& a, const Jet& s) {
    return {jet_mul(a.t, s), jet_mul(a.x, s), jet_mul(a.y, s)};
}

inline Jet jet_det3(const JetVec3& a, const JetVec3& b, const JetVec3& c) {
    Jet ct = jet_sub(jet_mul(b.x, c.y), jet_mul(b.y, c.x));
    Jet cx = jet_sub(jet_mul(b.y, c.t), jet_mul(b.t, c.y));
    Jet cy = jet_sub(jet_mul(b.t, c.x), jet_mul(b.x, c.t));
    return jet_add(jet_add(jet_mul(a.t, ct), jet_mul(a.x, cx)), jet_mul(a.y, cy));
}

} // namespace tmsurf
