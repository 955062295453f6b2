#pragma once

#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "tmsurf/singular.hpp"

namespace tmsurf {

// Triangulated OBJ export of the parameter grid. Positions are written in
// (x, y, t) order: the two spatial axes first, the time axis last, so generic
// viewers show the surface upright. Vertex count equals nu * nv.
inline void write_obj(std::ostream& os, const WData& w, const Domain& dom, int nu, int nv,
                      const ScanResult* overlay = nullptr, double quad_tol = 1e-10) {
    if (nu < 2 || nv < 2) throw Error(ErrKind::Usage, "write_obj: grid must be at least 2x2");
    std::vector<double> us(static_cast<std::size_t>(nu)), vs(static_cast<std::size_t>(nv));
    for (int i = 0; i < nu; ++i)
        us[static_cast<std::size_t>(i)] = dom.u_min + (dom.u_max - dom.u_min) * i / (nu - 1);
    for (int j = 0; j < nv; ++j)
        vs[static_cast<std::size_t>(j)] = dom.v_min + (dom.v_max - dom.v_min) * j / (nv - 1);

    PositionGrid grid = position_grid(w, us, vs, quad_tol);

    os << "# timelike minimal surface mesh\n";
    os << "# axes: columns are (x, y, t) with the Lorentzian time axis written last\n";
    os << "# grid: " << nu << " x " << nv << " over u in [" << dom.u_min << ", " << dom.u_max
       << "], v in [" << dom.v_min << ", " << dom.v_max << "]\n";
    os << std::setprecision(17);
    os << "o surface\n";
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const Vec3 p = grid.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            os << "v " << p.x << " " << p.y << " " << p.t << "\n";
        }
    auto vid = [nv](int i, int j) { return i * nv + j + 1; };
    for (int i = 0; i + 1 < nu; ++i)
        for (int j = 0; j + 1 < nv; ++j) {
            os << "f " << vid(i, j) << " " << vid(i + 1, j) << " " << vid(i + 1, j + 1) << "\n";
            os << "f " << vid(i, j) << " " << vid(i + 1, j + 1) << " " << vid(i, j + 1) << "\n";
        }

    if (overlay) {
        int next = nu * nv + 1;
        int curve_id = 0;
        for (const auto& c : overlay->curves) {
            os << "o singular_curve_" << curve_id++ << "\n";
            std::vector<int> ids;
            for (const auto& s : c.pts) {
                try {
                    const Vec3 p = eval_position(w, s.u, s.v, quad_tol);
                    os << "v " << p.x << " " << p.y << " " << p.t << "\n";
                    ids.push_back(next++);
                } catch (const Error&) {
                }
            }
            for (std::size_t k = 0; k + 1 < ids.size(); ++k)
                os << "l " << ids[k] << " " << ids[k + 1] << "\n";
        }
        for (const auto& r : overlay->u_roots) {
            os << "o omega_line_u\n";
            std::vector<int> ids;
            for (int j = 0; j < nv; ++j) {
                try {
                    const Vec3 p = eval_position(w, r.x, vs[static_cast<std::size_t>(j)], quad_tol);
                    os << "v " << p.x << " " << p.y << " " << p.t << "\n";
                    ids.push_back(next++);
                } catch (const Error&) {
                }
            }
            for (std::size_t k = 0; k + 1 < ids.size(); ++k)
                os << "l " << ids[k] << " " << ids[k + 1] << "\n";
        }
        for (const auto& r : overlay->v_roots) {
            os << "o omega_line_v\n";
            std::vector<int> ids;
            for (int i = 0; i < nu; ++i) {
                try {
                    const Vec3 p = eval_position(w, us[static_cast<std::size_t>(i)], r.x, quad_tol);
                    os << "v " << p.x << " " << p.y << " " << p.t << "\n";
                    ids.push_back(next++);
                } catch (const Error&) {
                }
            }
            for (std::size_t k = 0; k + 1 < ids.size(); ++k)
                os << "l " << ids[k] << " " << ids[k + 1] << "\n";
        }
    }
}

// Frame grid CSV: u, v, position, partials, normal, area density.
inline void write_frame_csv(std::ostream& os, const WData& w, const Domain& dom, int nu, int nv,
                            bool with_positions = false, double quad_tol = 1e-10) {
    os << "u,v";
    if (with_positions) os << ",f_t,f_x,f_y";
    os << ",fu_t,fu_x,fu_y,fv_t,fv_x,fv_y,n_t,n_x,n_y,lambda\n";
    os << std::setprecision(17);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const double u = dom.u_min + (dom.u_max - dom.u_min) * i / (nu - 1);
            const double v = dom.v_min + (dom.v_max - dom.v_min) * j / (nv - 1);
            os << u << "," << v;
            try {
                const FramePoint fp = eval_frame(w, u, v);
                if (with_positions) {
                    const Vec3 f = eval_position(w, u, v, quad_tol);
                    os << "," << f.t << "," << f.x << "," << f.y;
                }
                os << "," << fp.fu.t << "," << fp.fu.x << "," << fp.fu.y << "," << fp.fv.t << ","
                   << fp.fv.x << "," << fp.fv.y << "," << fp.n.t << "," << fp.n.x << "," << fp.n.y
                   << "," << fp.lambda << "\n";
            } catch (const Error&) {
                if (with_positions) os << ",nan,nan,nan";
                os << ",nan,nan,nan,nan,nan,nan,nan,nan,nan,nan\n";
            }
        }
}

// Singular points CSV with structural flags and margins.
inline void write_points_csv(std::ostream& os, const std::vector<SingularPoint>& pts) {
    // union of margin keys keeps the header stable
    std::vector<std::string> keys;
    for (const auto& p : pts)
        for (const auto& [k, v] : p.margins) {
            (void)v;
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }
    std::sort(keys.begin(), keys.end());
    os << "u,v,kinds,rank,front,degenerate,low_confidence";
    for (const auto& k : keys) os << "," << k;
    os << "\n";
    os << std::setprecision(17);
    for (const auto& p : pts) {
        os << p.u << "," << p.v << "," << p.kinds_string() << "," << p.rank << "," << (p.is_front ? 1 : 0)
           << "," << (p.is_degenerate ? 1 : 0) << "," << (p.low_confidence ? 1 : 0);
        for (const auto& k : keys) {
            auto it = p.margins.find(k);
            os << ",";
            if (it != p.margins.end()) os << it->second;
        }
        os << "\n";
    }
}

// Traced curves and omega lines as CSV polylines.
inline void write_curves_csv(std::ostream& os, const ScanResult& res) {
    os << "curve_id,kind,t,u,v,du,dv,eta_u,eta_v\n";
    os << std::setprecision(17);
    int id = 0;
    for (const auto& c : res.curves) {
        for (const auto& s : c.pts)
            os << id << ",g," << s.t << "," << s.u << "," << s.v << "," << s.du << "," << s.dv << ","
               << s.eta_u << "," << s.eta_v << "\n";
        ++id;
    }
    for (const auto& r : res.u_roots) {
        os << id++ << ",omega_u,0," << r.x << ",,,,,\n";
    }
    for (const auto& r : res.v_roots) {
        os << id++ << ",omega_v,0,," << r.x << ",,,,\n";
    }
}

} // namespace tmsurf
