#pragma once

#include <sstream>

#include "bonnetforge/calculus.hpp"

namespace bonnetforge {

// Sign convention ledger, fixed once for the whole library and locked by the
// analytic cylinder tests:
//   orientation        J du = dv
//   Hodge star         (*a)_u = a_v, (*a)_v = -a_u          (so ** = -1)
//   normal             N = f_u x f_v / |f_u x f_v|
//   projections        a_pm = 1/2 (a -+ N (*a)),  so  *a_pm = +-N a_pm
//   mean curvature     dN_+ = H df, extracted per component
//   Laplace identity   d*df = 2 H N |f_u|^2   (quadratic forms on du)
// Under this ledger the unit cylinder has outward N and H = +1/2, and the
// stereographic unit sphere has inward N = -f and H = -1.

/// First-order data of a sampled immersion f: M -> Im H.
struct SurfaceJet {
    QuatField f;              // imaginary-valued positions
    Form1 df;                 // analytic when the generator supplies it, else finite differences
    QuatField normal;         // unit, imaginary
    RealField conf_factor;    // |f_u|^2
    RealField mean_curvature; // H with dN_+ = H df
    Form1 omega;              // anti-conformal part of dN
    bool analytic_df = false;
    /// max over samples of |H(du comp) - H(dv comp)| / (|H| + 1); zero in the
    /// continuum since dN_+ is a single multiple of df.
    double h_component_gap = 0.0;
};

/// Relative cutoff below which |f_u x f_v| counts as a degenerate immersion.
inline constexpr double kImmersionDegeneracyTol = 1e-10;

namespace detail {

inline void check_immersion(const Form1& df) {
    const Grid& g = df.grid;
    double scale = 0.0;
    for (const auto& q : df.au) scale = std::max(scale, q.norm2());
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const ImQuat cr = cross(df.u_at(i, j).imag(), df.v_at(i, j).imag());
            if (cr.norm() <= kImmersionDegeneracyTol * scale) {
                std::ostringstream msg;
                msg << "degenerate immersion at sample (" << i << ", " << j << "): |f_u x f_v| = "
                    << cr.norm();
                throw std::domain_error(msg.str());
            }
        }
}

}  // namespace detail

/// Splits alpha into conformal and anti-conformal parts:
/// alpha = a_plus + a_minus with *a_pm = +-N a_pm pointwise.
inline std::pair<Form1, Form1> conformal_split(const Form1& a, const QuatField& n) {
    require_same_grid(a.grid, n.grid, "conformal_split");
    Form1 plus(a.grid), minus(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        // (*a)_u = a_v, (*a)_v = -a_u
        const Quat nsu = n.values[s] * a.av[s];
        const Quat nsv = n.values[s] * (-a.au[s]);
        plus.au[s] = (a.au[s] - nsu) * 0.5;
        plus.av[s] = (a.av[s] - nsv) * 0.5;
        minus.au[s] = (a.au[s] + nsu) * 0.5;
        minus.av[s] = (a.av[s] + nsv) * 0.5;
    }
    return {std::move(plus), std::move(minus)};
}

inline SurfaceJet build_jet(const QuatField& f, const Form1& df, bool analytic_df) {
    require_same_grid(f.grid, df.grid, "build_jet");
    detail::check_immersion(df);
    const Grid& g = f.grid;

    SurfaceJet jet;
    jet.f = f;
    jet.df = df;
    jet.analytic_df = analytic_df;
    jet.normal = QuatField(g);
    jet.conf_factor = RealField(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const ImQuat fu = df.u_at(i, j).imag();
            const ImQuat fv = df.v_at(i, j).imag();
            const ImQuat cr = cross(fu, fv);
            jet.normal.at(i, j) = Quat(cr * (1.0 / cr.norm()));
            jet.conf_factor.at(i, j) = fu.norm2();
        }

    // dN by finite differences of the unit normal field; H per component of
    // the conformal part, stored from the du component.
    const Form1 dn = d(jet.normal);
    auto [dnp, dnm] = conformal_split(dn, jet.normal);
    jet.mean_curvature = RealField(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const ImQuat fu = df.u_at(i, j).imag();
            const ImQuat fv = df.v_at(i, j).imag();
            const double hu_c = dot(dnp.u_at(i, j).imag(), fu) / fu.norm2();
            const double hv_c = dot(dnp.v_at(i, j).imag(), fv) / fv.norm2();
            jet.mean_curvature.at(i, j) = hu_c;
            jet.h_component_gap =
                std::max(jet.h_component_gap, std::abs(hu_c - hv_c) / (std::abs(hu_c) + 1.0));
        }

    jet.omega = dn - scale(jet.mean_curvature, df);
    return jet;
}

/// Finite-difference fallback when no analytic derivative is available.
inline SurfaceJet build_jet(const QuatField& f) { return build_jet(f, d(f), false); }

/// max |*df - N df| / |f_u| pointwise; near zero iff f is conformal.
inline double conformality_residual(const SurfaceJet& jet) {
    const Grid& g = jet.f.grid;
    double worst = 0.0;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat fu = jet.df.u_at(i, j);
            const Quat fv = jet.df.v_at(i, j);
            const Quat n = jet.normal.at(i, j);
            const double s = fu.norm();
            const double ru = (fv - n * fu).norm();
            const double rv = (-fu - n * fv).norm();
            worst = std::max(worst, std::max(ru, rv) / s);
        }
    return worst;
}

/// max |d*df - 2 H N |f_u|^2| / (|H| |f_u|^2 + floor), as quadratic forms.
inline double laplace_residual(const SurfaceJet& jet) {
    const Form2Q lhs = d(star(jet.df));
    const Grid& g = jet.f.grid;
    double worst = 0.0;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const double h = jet.mean_curvature.at(i, j);
            const double cf = jet.conf_factor.at(i, j);
            const Quat rhs = jet.normal.at(i, j) * (2.0 * h * cf);
            worst = std::max(worst, (lhs.at(i, j) - rhs).norm() / (std::abs(h) * cf + 1.0));
        }
    return worst;
}

/// max |d omega - (*dH - dH N) df| / (|dH| |f_u| + floor), quadratic forms on du.
inline double codazzi_residual(const SurfaceJet& jet) {
    const Form2Q lhs = d(jet.omega);
    auto [h_u, h_v] = partials(jet.mean_curvature);
    const Grid& g = jet.f.grid;
    double worst = 0.0;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat fu = jet.df.u_at(i, j);
            // ((*dH) - dH N)(du) = H_v - H_u N
            const Quat coeff = Quat(h_v.at(i, j)) - jet.normal.at(i, j) * h_u.at(i, j);
            const Quat rhs = coeff * fu;
            const double dh = std::hypot(h_u.at(i, j), h_v.at(i, j));
            worst = std::max(worst, (lhs.at(i, j) - rhs).norm() / (dh * fu.norm() + 1.0));
        }
    return worst;
}

}  // namespace bonnetforge
