#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tmsurf/error.hpp"

namespace tmsurf {

// Truncated Taylor expansion of a univariate smooth function at a basepoint.
// coeffs()[k] is the k-th Taylor coefficient, so the k-th derivative is k!*c[k].
// Jets are immutable values; every operation returns a fresh jet.
struct Jet {
    double base = 0.0;
    std::vector<double> c{0.0};
    int cancelled = 0;  // orders consumed by division cancellation

    static Jet constant(double value, double base, int order) {
        Jet j;
        j.base = base;
        j.c.assign(static_cast<std::size_t>(order) + 1, 0.0);
        j.c[0] = value;
        return j;
    }

    // Jet of the identity function x -> x.
    static Jet variable(double base, int order) {
        Jet j = constant(base, base, order);
        if (order >= 1) j.c[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c.size()) - 1; }
    double value() const { return c[0]; }

    // Exact k-th derivative at the basepoint: k! * c[k].
    double derive(int k) const {
        if (k < 0 || k > order())
            throw Error(ErrKind::InsufficientOrder,
                        "jet_derive: requested derivative order " + std::to_string(k) +
                            " exceeds jet order " + std::to_string(order()));
        double fact = 1.0;
        for (int i = 2; i <= k; ++i) fact *= i;
        return fact * c[static_cast<std::size_t>(k)];
    }

    Jet truncated(int new_order) const {
        if (new_order < 0 || new_order > order())
            throw Error(ErrKind::Usage, "truncated: bad order");
        Jet j = *this;
        j.c.resize(static_cast<std::size_t>(new_order) + 1);
        return j;
    }

    // Jet of the derivative function, one order lower.
    Jet derivative() const {
        if (order() < 1)
            throw Error(ErrKind::InsufficientOrder, "derivative: order-0 jet has no derivative jet");
        Jet j;
        j.base = base;
        j.cancelled = cancelled;
        j.c.resize(c.size() - 1);
        for (std::size_t k = 0; k + 1 < c.size(); ++k) j.c[k] = c[k + 1] * static_cast<double>(k + 1);
        return j;
    }

    bool all_finite() const {
        for (double x : c)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

namespace detail {

inline void require_compatible(const Jet& a, const Jet& b, const char* op) {
    if (a.base != b.base)
        throw Error(ErrKind::Usage, std::string(op) + ": operands have different basepoints");
    if (a.order() != b.order())
        throw Error(ErrKind::Usage, std::string(op) + ": operands have different orders");
}

inline double coeff_scale(const Jet& a) {
    double m = 0.0;
    for (double x : a.c) m = std::max(m, std::abs(x));
    return m;
}

// Number of leading coefficients treated as zero (threshold 1e-13 scaled by the
// largest coefficient magnitude of the jet). Returns order()+1 for a zero jet.
inline int leading_zeros(const Jet& a) {
    const double tol = 1e-13 * coeff_scale(a);
    int n = 0;
    while (n <= a.order() && std::abs(a.c[static_cast<std::size_t>(n)]) <= tol) ++n;
    return n;
}

} // namespace detail

inline Jet jet_add(const Jet& a, const Jet& b) {
    detail::require_compatible(a, b, "jet_add");
    Jet r = a;
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] += b.c[k];
    r.cancelled = std::max(a.cancelled, b.cancelled);
    return r;
}

inline Jet jet_sub(const Jet& a, const Jet& b) {
    detail::require_compatible(a, b, "jet_sub");
    Jet r = a;
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] -= b.c[k];
    r.cancelled = std::max(a.cancelled, b.cancelled);
    return r;
}

inline Jet jet_neg(const Jet& a) {
    Jet r = a;
    for (double& x : r.c) x = -x;
    return r;
}

inline Jet jet_scale(const Jet& a, double s) {
    Jet r = a;
    for (double& x : r.c) x *= s;
    return r;
}

// Cauchy product truncated to the common order.
inline Jet jet_mul(const Jet& a, const Jet& b) {
    detail::require_compatible(a, b, "jet_mul");
    Jet r = Jet::constant(0.0, a.base, a.order());
    const int K = a.order();
    for (int k = 0; k <= K; ++k) {
        double s = 0.0;
        for (int i = 0; i <= k; ++i) s += a.c[static_cast<std::size_t>(i)] * b.c[static_cast<std::size_t>(k - i)];
        r.c[static_cast<std::size_t>(k)] = s;
    }
    r.cancelled = std::max(a.cancelled, b.cancelled);
    return r;
}

// Quotient jet. Common leading zeros of numerator and denominator are cancelled
// first; the result's order shrinks by the cancellation depth, which is recorded
// on the result. A denominator that vanishes strictly deeper than the numerator
// is a pole and raises InsufficientOrder; a denominator that vanishes through
// the whole order raises DivisionByZeroJet.
inline Jet jet_div(const Jet& a, const Jet& b) {
    detail::require_compatible(a, b, "jet_div");
    const int K = a.order();
    const int za = detail::leading_zeros(a);
    const int zb = detail::leading_zeros(b);
    if (zb > K)
        throw Error(ErrKind::DivisionByZeroJet,
                    "jet_div: divisor vanishes through order " + std::to_string(K));
    const int depth = std::min(za, zb);
    if (zb > depth)
        throw Error(ErrKind::InsufficientOrder,
                    "jet_div: divisor vanishes to order " + std::to_string(zb) +
                        " but numerator only to " + std::to_string(za) + " (pole)");
    const int Kr = K - depth;
    Jet r = Jet::constant(0.0, a.base, Kr);
    // Series division on the shifted arrays.
    auto ac = [&](int k) { return a.c[static_cast<std::size_t>(k + depth)]; };
    auto bc = [&](int k) { return b.c[static_cast<std::size_t>(k + depth)]; };
    for (int k = 0; k <= Kr; ++k) {
        double s = ac(k);
        for (int i = 0; i < k; ++i) s -= r.c[static_cast<std::size_t>(i)] * bc(k - i);
        r.c[static_cast<std::size_t>(k)] = s / bc(0);
    }
    r.cancelled = std::max({a.cancelled, b.cancelled, depth});
    return r;
}

// Integer power by repeated squaring (exact for jets with vanishing value,
// unlike a log/exp route). Negative exponents go through jet_div.
inline Jet jet_pow(const Jet& a, int n) {
    if (n < 0) return jet_div(Jet::constant(1.0, a.base, a.order()), jet_pow(a, -n));
    Jet acc = Jet::constant(1.0, a.base, a.order());
    Jet p = a;
    int e = n;
    while (e > 0) {
        if (e & 1) acc = jet_mul(acc, p);
        e >>= 1;
        if (e > 0) p = jet_mul(p, p);
    }
    acc.cancelled = a.cancelled;
    return acc;
}

// Analytic kernels supported for composition with a jet.
enum class Kernel { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Asinh, Atan };

inline const char* kernel_name(Kernel k) {
    switch (k) {
        case Kernel::Sin: return "sin";
        case Kernel::Cos: return "cos";
        case Kernel::Tan: return "tan";
        case Kernel::Sinh: return "sinh";
        case Kernel::Cosh: return "cosh";
        case Kernel::Tanh: return "tanh";
        case Kernel::Exp: return "exp";
        case Kernel::Log: return "log";
        case Kernel::Sqrt: return "sqrt";
        case Kernel::Asinh: return "asinh";
        case Kernel::Atan: return "atan";
    }
    return "?";
}

namespace detail {

// Taylor coefficients of the kernel around the inner value x0, h[k] = f^(k)(x0)/k!.
inline std::vector<double> kernel_series(Kernel kern, double x0, int order) {
    std::vector<double> h(static_cast<std::size_t>(order) + 1, 0.0);
    switch (kern) {
        case Kernel::Exp: {
            double e = std::exp(x0), f = 1.0;
            for (int k = 0; k <= order; ++k) {
                if (k > 0) f *= k;
                h[static_cast<std::size_t>(k)] = e / f;
            }
            break;
        }
        case Kernel::Log: {
            if (x0 <= 0.0) throw Error(ErrKind::Domain, "log of non-positive value");
            h[0] = std::log(x0);
            double p = 1.0;
            for (int k = 1; k <= order; ++k) {
                p /= x0;
                h[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) * p / k;
            }
            break;
        }
        case Kernel::Sqrt: {
            if (x0 <= 0.0) throw Error(ErrKind::Domain, "sqrt at a non-positive value (jet undefined)");
            double coef = std::sqrt(x0);
            h[0] = coef;
            // binomial(1/2, k) * x0^(1/2 - k)
            for (int k = 1; k <= order; ++k) {
                coef *= (0.5 - (k - 1)) / (k * x0);
                h[static_cast<std::size_t>(k)] = coef;
            }
            break;
        }
        case Kernel::Sin:
        case Kernel::Cos: {
            const double s = std::sin(x0), co = std::cos(x0);
            double f = 1.0;
            for (int k = 0; k <= order; ++k) {
                if (k > 0) f *= k;
                const int phase = (kern == Kernel::Sin) ? k % 4 : (k + 1) % 4;
                double d = 0.0;
                switch (phase) {
                    case 0: d = s; break;
                    case 1: d = co; break;
                    case 2: d = -s; break;
                    case 3: d = -co; break;
                }
                h[static_cast<std::size_t>(k)] = d / f;
            }
            break;
        }
        case Kernel::Sinh:
        case Kernel::Cosh: {
            const double sh = std::sinh(x0), ch = std::cosh(x0);
            double f = 1.0;
            for (int k = 0; k <= order; ++k) {
                if (k > 0) f *= k;
                const bool even = (k % 2) == 0;
                const double d = (kern == Kernel::Sinh) == even ? sh : ch;
                h[static_cast<std::size_t>(k)] = d / f;
            }
            break;
        }
        case Kernel::Tan: {
            // y' = 1 + y^2 coefficient recurrence
            h[0] = std::tan(x0);
            for (int k = 0; k < order; ++k) {
                double s = (k == 0) ? 1.0 : 0.0;
                for (int i = 0; i <= k; ++i) s += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(k - i)];
                h[static_cast<std::size_t>(k + 1)] = s / (k + 1);
            }
            break;
        }
        case Kernel::Tanh: {
            // y' = 1 - y^2
            h[0] = std::tanh(x0);
            for (int k = 0; k < order; ++k) {
                double q = 0.0;
                for (int i = 0; i <= k; ++i) q += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(k - i)];
                h[static_cast<std::size_t>(k + 1)] = (((k == 0) ? 1.0 : 0.0) - q) / (k + 1);
            }
            break;
        }
        default:
            throw Error(ErrKind::Usage, "kernel_series: kernel handled elsewhere");
    }
    return h;
}

// Horner evaluation of a coefficient series in the fluctuation part of `inner`.
inline Jet series_apply(const std::vector<double>& h, const Jet& inner) {
    Jet bar = inner;
    bar.c[0] = 0.0;
    Jet acc = Jet::constant(h.back(), inner.base, inner.order());
    for (int k = static_cast<int>(h.size()) - 2; k >= 0; --k) {
        acc = jet_mul(acc, bar);
        acc.c[0] += h[static_cast<std::size_t>(k)];
    }
    acc.cancelled = inner.cancelled;
    return acc;
}

// Kernels whose Taylor coefficients are awkward in closed form are built by
// integrating f' o inner termwise: (f o a)' = (f' o a) * a'.
template <typename DerivFn>
Jet compose_via_integral(double value0, DerivFn&& deriv_of_composition, const Jet& inner) {
    Jet r = Jet::constant(value0, inner.base, inner.order());
    if (inner.order() >= 1) {
        Jet d = deriv_of_composition();  // order K-1 jet of d/dx (f o inner)
        for (int k = 1; k <= inner.order(); ++k)
            r.c[static_cast<std::size_t>(k)] = d.c[static_cast<std::size_t>(k - 1)] / k;
    }
    r.cancelled = inner.cancelled;
    return r;
}

} // namespace detail

// Taylor jet of kernel(inner).
inline Jet jet_compose(Kernel kern, const Jet& inner) {
    const double x0 = inner.value();
    switch (kern) {
        case Kernel::Asinh:
            return detail::compose_via_integral(
                std::asinh(x0),
                [&] {
                    const int K1 = inner.order() - 1;
                    Jet a = inner.truncated(K1);
                    Jet one = Jet::constant(1.0, inner.base, K1);
                    Jet root = jet_compose(Kernel::Sqrt, jet_add(one, jet_mul(a, a)));
                    return jet_mul(jet_div(one, root), inner.derivative());
                },
                inner);
        case Kernel::Atan:
            return detail::compose_via_integral(
                std::atan(x0),
                [&] {
                    const int K1 = inner.order() - 1;
                    Jet a = inner.truncated(K1);
                    Jet one = Jet::constant(1.0, inner.base, K1);
                    return jet_mul(jet_div(one, jet_add(one, jet_mul(a, a))), inner.derivative());
                },
                inner);
        default:
            return detail::series_apply(detail::kernel_series(kern, x0, inner.order()), inner);
    }
}

// Composition of a jet (viewed as a truncated series around outer.base) with a
// jet whose value equals that basepoint: the jet of x -> outer(inner(x)).
inline Jet jet_compose_series(const Jet& outer, const Jet& inner) {
    const double scale = std::max(1.0, std::abs(outer.base));
    if (std::abs(inner.value() - outer.base) > 1e-9 * scale)
        throw Error(ErrKind::Usage, "jet_compose_series: inner value does not match outer basepoint");
    Jet in = inner;
    if (in.order() > outer.order()) in = in.truncated(outer.order());
    std::vector<double> h(outer.c.begin(), outer.c.begin() + (in.order() + 1));
    return detail::series_apply(h, in);
}

inline double jet_derive(const Jet& a, int k) { return a.derive(k); }

inline Jet operator+(const Jet& a, const Jet& b) { return jet_add(a, b); }
inline Jet operator-(const Jet& a, const Jet& b) { return jet_sub(a, b); }
inline Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }
inline Jet operator/(const Jet& a, const Jet& b) { return jet_div(a, b); }
inline Jet operator-(const Jet& a) { return jet_neg(a); }

// Truncate both jets to the smaller order so mixed-depth results can be combined.
inline void jet_align(Jet& a, Jet& b) {
    const int K = std::min(a.order(), b.order());
    if (a.order() != K) a = a.truncated(K);
    if (b.order() != K) b = b.truncated(K);
}

} // namespace tmsurf
