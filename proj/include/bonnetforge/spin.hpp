#pragma once

#include "bonnetforge/surface.hpp"

namespace bonnetforge {

// Spin transformations df~ = conj(lambda) df lambda and the associated
// Dirac-type integrability equation  *d lambda + N d lambda = rho df lambda
// with real potential rho.

/// Relative cutoff below which lambda counts as vanishing.
inline constexpr double kLambdaZeroTol = 1e-10;

namespace detail {

inline void check_nowhere_zero(const QuatField& lam) {
    double top = 0.0;
    for (const auto& q : lam.values) top = std::max(top, q.norm());
    for (std::size_t s = 0; s < lam.values.size(); ++s)
        if (lam.values[s].norm() <= kLambdaZeroTol * top)
            throw std::domain_error("vanishing spin factor lambda");
}

}  // namespace detail

/// Pointwise transformed differential: g_u = conj(lam) f_u lam, likewise g_v.
/// Imaginary-valued since df is.
inline Form1 apply_spin(const Form1& df, const QuatField& lam) {
    require_same_grid(df.grid, lam.grid, "apply_spin");
    detail::check_nowhere_zero(lam);
    Form1 out(df.grid);
    for (std::size_t s = 0; s < df.au.size(); ++s) {
        const Quat& l = lam.values[s];
        out.au[s] = Quat(sandwich(l, df.au[s].imag()));
        out.av[s] = Quat(sandwich(l, df.av[s].imag()));
    }
    return out;
}

struct RhoEstimate {
    RealField rho;
    /// max pointwise norm of the Dirac defect relative to |f_u| |lambda|.
    double residual = 0.0;
};

/// Per-sample least-squares fit of the single real unknown rho in
/// *d lambda + N d lambda = rho df lambda, stacking both coordinate
/// components (8 real equations, 1 unknown).
inline RhoEstimate estimate_rho(const SurfaceJet& jet, const QuatField& lam) {
    require_same_grid(jet.f.grid, lam.grid, "estimate_rho");
    detail::check_nowhere_zero(lam);
    const Form1 dl = d(lam);
    const Grid& g = jet.f.grid;
    RhoEstimate out{RealField(g), 0.0};
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat n = jet.normal.at(i, j);
            const Quat& l = lam.at(i, j);
            const Quat lhs_u = dl.v_at(i, j) + n * dl.u_at(i, j);  // (*dl)_u = dl_v
            const Quat lhs_v = -dl.u_at(i, j) + n * dl.v_at(i, j);
            const Quat b_u = jet.df.u_at(i, j) * l;
            const Quat b_v = jet.df.v_at(i, j) * l;
            const double denom = b_u.norm2() + b_v.norm2();
            const double rho = (dot(lhs_u, b_u) + dot(lhs_v, b_v)) / denom;
            out.rho.at(i, j) = rho;
            const double scale = jet.df.u_at(i, j).norm() * l.norm();
            const double defect = std::max((lhs_u - b_u * rho).norm(), (lhs_v - b_v * rho).norm());
            out.residual = std::max(out.residual, defect / scale);
        }
    return out;
}

/// New immersion from the transformed differential; the path residual tracks
/// how far the transformed form is from closed.
inline PotentialResult integrate_spin(const SurfaceJet& jet, const QuatField& lam,
                                      GridIndex base) {
    return integrate(apply_spin(jet.df, lam), base);
}

struct SpinGeometry {
    QuatField normal;         // lambda^{-1} N lambda
    RealField conf_factor;    // |lambda|^4 |f_u|^2
    RealField mean_curvature; // (H + rho) / |lambda|^2
};

/// Geometric data of the spin transform by closed formulas, no
/// differentiation of the new immersion involved. Pass rho = nullptr for
/// the rho = 0 case.
inline SpinGeometry spin_geometry(const SurfaceJet& jet, const QuatField& lam,
                                  const RealField* rho = nullptr) {
    require_same_grid(jet.f.grid, lam.grid, "spin_geometry");
    detail::check_nowhere_zero(lam);
    const Grid& g = jet.f.grid;
    SpinGeometry out{QuatField(g), RealField(g), RealField(g)};
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat& l = lam.at(i, j);
            const double n2 = l.norm2();
            out.normal.at(i, j) = Quat(sandwich(l, jet.normal.at(i, j).imag()) * (1.0 / n2));
            out.conf_factor.at(i, j) = n2 * n2 * jet.conf_factor.at(i, j);
            const double r = rho ? rho->at(i, j) : 0.0;
            out.mean_curvature.at(i, j) = (jet.mean_curvature.at(i, j) + r) / n2;
        }
    return out;
}

struct DiracCheck {
    bool holds = false;
    double residual = 0.0;
};

/// Default tolerance for hdf_criterion, sized to the O(h^2) truncation of
/// finite-difference d lambda.
inline double dirac_default_tol(const Grid& g) { return 50.0 * (g.hu * g.hu + g.hv * g.hv); }

/// The H |df| preservation criterion: holds iff *d lambda + N d lambda = 0
/// within tolerance (equivalently df ^ d lambda = 0).
inline DiracCheck hdf_criterion(const SurfaceJet& jet, const QuatField& lam, double tol = -1.0) {
    require_same_grid(jet.f.grid, lam.grid, "hdf_criterion");
    if (tol < 0.0) tol = dirac_default_tol(jet.f.grid);
    const Form1 dl = d(lam);
    const Grid& g = jet.f.grid;
    double worst = 0.0;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat n = jet.normal.at(i, j);
            const double scale = jet.df.u_at(i, j).norm() * lam.at(i, j).norm();
            const double ru = (dl.v_at(i, j) + n * dl.u_at(i, j)).norm();
            const double rv = (-dl.u_at(i, j) + n * dl.v_at(i, j)).norm();
            worst = std::max(worst, std::max(ru, rv) / scale);
        }
    return {worst <= tol, worst};
}

}  // namespace bonnetforge
