#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tmsurf/classify.hpp"
#include "tmsurf/specfile.hpp"

namespace tmsurf {

// Where an expected verdict comes from: stated in the literature, computed by
// an independent route, or immediate from the construction.
enum class Provenance { Reported, Derived, Direct };

struct ExpectedVerdict {
    double u = 0, v = 0;
    Verdict verdict = Verdict::Unclassified;
    int higher_k = 0;
    Provenance source = Provenance::Derived;
};

struct Fixture {
    std::string name;
    SurfaceSpec spec;
    WData wdata;
    std::vector<ExpectedVerdict> expected;
    std::string notes;
};

namespace fixtures {

inline Fixture make(std::string name, SurfaceSpec spec, std::vector<ExpectedVerdict> expected,
                    std::string notes = "") {
    Fixture f;
    f.name = std::move(name);
    f.wdata = spec.to_wdata();
    f.spec = std::move(spec);
    f.expected = std::move(expected);
    f.notes = std::move(notes);
    return f;
}

// Classical Enneper-type surface from two cubic null curves. Its singular set
// is the hyperbola u v = -1, all cuspidal edges except two swallowtails.
inline Fixture enneper() {
    SurfaceSpec s;
    SurfaceSpec::CurveBlock c;
    c.phi = {"-u - u^3/3", "u - u^3/3", "u^2"};
    c.psi = {"v + v^3/3", "v - v^3/3", "v^2"};
    c.u_min = -2.5;
    c.u_max = 2.5;
    c.v_min = -2.5;
    c.v_max = 2.5;
    s.nullcurves = c;
    s.domain = {0.5, 2.0, -2.0, -0.5};
    s.grid_nu = s.grid_nv = 96;
    return make("enneper", std::move(s),
                {
                    {1.0, -1.0, Verdict::Swallowtail, 0, Provenance::Derived},
                    {-1.0, 1.0, Verdict::Swallowtail, 0, Provenance::Derived},
                    {2.0, -0.5, Verdict::CuspidalEdge, 0, Provenance::Derived},
                    {0.5, -2.0, Verdict::CuspidalEdge, 0, Provenance::Derived},
                },
                "singular set {uv = -1}; edges everywhere except swallowtails at u = +-1");
}

// Trigonometric data whose origin is a cuspidal butterfly; its conjugate
// carries the cuspidal S1+ point instead.
inline std::pair<Fixture, Fixture> butterfly_pair() {
    const std::string ch = "cosh(asinh(1/2))";  // sqrt(5)/2
    const std::string sh = "sinh(asinh(1/2))";  // 1/2
    const std::string mu = "((1 + sqrt(5))/2)";
    SurfaceSpec s;
    SurfaceSpec::WBlock b;
    b.g1 = "-cos(u)/(1 + sin(u))";
    b.g2 = "(" + sh + " + cos(v)*" + ch + ")/(sin(v) - " + ch + " - cos(v)*" + sh + ")";
    b.w1 = "-" + mu + "/2*(1 + sin(u))";
    b.w2 = "(sin(v) - " + ch + " - cos(v)*" + sh + ")/(2*" + mu + ")";
    s.wdata = b;
    s.domain = {-0.9, 0.9, -0.9, 0.9};
    Fixture f = make("butterfly", s,
                     {{0.0, 0.0, Verdict::CuspidalButterfly, 0, Provenance::Reported}},
                     "butterfly at the origin; conjugate surface has the S1+ point");

    SurfaceSpec sc = s;
    sc.wdata->w2 = "-(" + sc.wdata->w2 + ")";
    Fixture fc = make("butterfly_conjugate", std::move(sc),
                      {{0.0, 0.0, Verdict::CuspidalS1Plus, 0, Provenance::Reported}});
    return {std::move(f), std::move(fc)};
}

// Doubly periodic surface with folded symmetry f(v,u) = f(u,v); twelve
// rank-zero D4+ points off the fold diagonal, none on it.
inline Fixture folded_torus() {
    SurfaceSpec s;
    SurfaceSpec::WBlock b;
    b.g1 = "sin(u)/(cos(u) - 1)";
    b.g2 = "-sin(v)/(cos(v) + 1)";
    b.w1 = "cos(2*u)*(cos(u) - 1)/2";
    b.w2 = "cos(2*v)*(cos(v) + 1)/2";
    b.base_u = M_PI / 2;
    b.base_v = M_PI / 2;
    s.wdata = b;
    s.domain = {0.0, 2 * M_PI, 0.0, 2 * M_PI};
    s.grid_nu = s.grid_nv = 128;

    std::vector<ExpectedVerdict> exp;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            const double u = (1 + 2 * k) * M_PI / 4, v = (1 + 2 * l) * M_PI / 4;
            if (k == l)
                exp.push_back({u, v, Verdict::Unclassified, 0, Provenance::Reported});
            else
                exp.push_back({u, v, Verdict::D4Plus, 0, Provenance::Reported});
        }
    return make("folded_torus", std::move(s), std::move(exp),
                "torus with twelve D4+ points; fold diagonal excluded by g1 g2 = 1");
}

// The same kind of torus built from a closed null curve supplied through its
// velocity (the expression integrates to a closed loop).
inline Fixture closed_curve_torus() {
    SurfaceSpec s;
    SurfaceSpec::CurveBlock c;
    c.phi = {"cos(2*u)", "cos(3*u)*cos(2*u)", "sin(3*u)*cos(2*u)"};
    c.psi = {"cos(2*v)", "cos(3*v)*cos(2*v)", "sin(3*v)*cos(2*v)"};
    c.derivative_form = true;
    c.u_min = 0;
    c.u_max = 2 * M_PI;
    c.v_min = 0;
    c.v_max = 2 * M_PI;
    c.base_u = M_PI / 2;
    c.base_v = M_PI / 2;
    s.nullcurves = c;
    s.domain = {0.0, 2 * M_PI, 0.0, 2 * M_PI};
    s.grid_nu = s.grid_nv = 128;
    return make("closed_curve_torus", std::move(s),
                {
                    {M_PI / 4, 3 * M_PI / 4, Verdict::D4Plus, 0, Provenance::Derived},
                    {M_PI / 4, M_PI / 4, Verdict::Unclassified, 0, Provenance::Derived},
                },
                "null curve given by its velocity; rank-zero grid at the quarter-pi lines");
}

// (2, 2k+1) cuspidal-edge generator: g2 = v^(2k-1), w2 = v.
inline Fixture cusp_generator(int k, bool alt_g1 = false) {
    if (k < 1) throw Error(ErrKind::Usage, "cusp_generator: k must be >= 1");
    SurfaceSpec s;
    SurfaceSpec::WBlock b;
    b.g1 = alt_g1 ? "u" : "0";
    b.g2 = k == 1 ? "v" : "v^" + std::to_string(2 * k - 1);
    b.w1 = "1";
    b.w2 = "v";
    s.wdata = b;
    s.domain = {-1.0, 1.0, -1.0, 1.0};
    Verdict v = k == 1 ? Verdict::CuspidalEdge : (k == 2 ? Verdict::Cusp25Edge : Verdict::CandidateHigherCusp);
    std::string name = "cusp_edge_k" + std::to_string(k) + (alt_g1 ? "_alt" : "");
    return make(std::move(name), std::move(s),
                {{alt_g1 ? 0.3 : 0.0, 0.0, v, k >= 3 ? k : 0,
                  k >= 3 ? Provenance::Reported : Provenance::Derived}},
                "cuspidal edges of sharpness 2k+1 along v = 0");
}

inline Fixture beaks_fixture() {
    SurfaceSpec s;
    SurfaceSpec::WBlock b;
    b.g1 = "exp(u)";
    b.g2 = "exp(v)";
    b.w1 = "1";
    b.w2 = "v";
    s.wdata = b;
    s.domain = {-1.0, 1.0, -1.0, 1.0};
    return make("beaks", std::move(s),
                {{0.0, 0.0, Verdict::CuspidalBeaks, 0, Provenance::Derived}},
                "degenerate point where {g1 g2 = 1} crosses {w2 = 0}");
}

inline Fixture d4_fixture() {
    SurfaceSpec s;
    SurfaceSpec::WBlock b;
    b.g1 = "u";
    b.g2 = "v";
    b.w1 = "u";
    b.w2 = "v";
    s.wdata = b;
    s.domain = {-1.0, 1.0, -1.0, 1.0};
    return make("d4", std::move(s), {{0.0, 0.0, Verdict::D4Plus, 0, Provenance::Derived}},
                "rank-zero point with all four D4+ conditions equal to one");
}

// A cross-cap point: with g1 = u, g2 = v the hyperbola u v = 1 carries
// varphi1 = varphi2 at (1,1), where the surface is a frontal but not a front.
inline Fixture crosscap_fixture() {
    SurfaceSpec s;
    SurfaceSpec::WBlock b;
    b.g1 = "u";
    b.g2 = "v";
    b.w1 = "1";
    b.w2 = "1";
    s.wdata = b;
    s.domain = {0.5, 2.0, 0.5, 2.0};
    return make("crosscap", std::move(s),
                {{1.0, 1.0, Verdict::CuspidalCrossCap, 0, Provenance::Derived},
                 {2.0, 0.5, Verdict::CuspidalEdge, 0, Provenance::Derived}},
                "cross cap at (1,1) on {u v = 1}");
}

inline std::vector<Fixture> all() {
    std::vector<Fixture> fs;
    fs.push_back(enneper());
    auto [bf, bfc] = butterfly_pair();
    fs.push_back(std::move(bf));
    fs.push_back(std::move(bfc));
    fs.push_back(folded_torus());
    fs.push_back(closed_curve_torus());
    fs.push_back(cusp_generator(1));
    fs.push_back(cusp_generator(2));
    fs.push_back(cusp_generator(3));
    fs.push_back(cusp_generator(2, true));
    fs.push_back(beaks_fixture());
    fs.push_back(d4_fixture());
    fs.push_back(crosscap_fixture());
    return fs;
}

// ---------------------------------------------------------------------------
// Random W-data for the nonexistence fuzzing corpus: degree <= 4 polynomials
// and small trigonometric combinations.

inline Expr random_poly(std::mt19937_64& rng, int max_deg) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(1, max_deg);
    const int d = deg(rng);
    Expr e = Expr::constant(coef(rng));
    for (int k = 1; k <= d; ++k) {
        Expr term = Expr::constant(coef(rng)) * (k == 1 ? Expr::var() : Expr::pow(Expr::var(), k));
        e = e + term;
    }
    return e;
}

inline Expr random_trig(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.5, 1.5);
    std::uniform_int_distribution<int> freq(1, 2);
    Expr e = Expr::constant(coef(rng));
    e = e + Expr::constant(coef(rng)) *
                Expr::call(Kernel::Sin, Expr::constant(static_cast<double>(freq(rng))) * Expr::var());
    e = e + Expr::constant(coef(rng)) *
                Expr::call(Kernel::Cos, Expr::constant(static_cast<double>(freq(rng))) * Expr::var());
    return e;
}

inline Expr random_component(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 2);
    switch (kind(rng)) {
        case 0: return random_poly(rng, 4);
        case 1: return random_trig(rng);
        default: return random_poly(rng, 2) + random_trig(rng);
    }
}

inline WData random_wdata(std::mt19937_64& rng) {
    return WData(random_component(rng), random_component(rng), random_component(rng),
                 random_component(rng));
}

} // namespace fixtures
} // namespace tmsurf
