#pragma once

#include "bonnetforge/surface.hpp"

namespace bonnetforge {

/// Isothermic seed: surface jet plus the closed anti-conformal form tau and
/// its integrated dual surface f*, with the discrete residuals that certify
/// the Definition (d tau = 0, *tau + N tau = 0, tau != 0).
struct IsothermicSeed {
    SurfaceJet jet;
    Form1 tau;
    QuatField dual;  // f*, fixed by dual(base) = 0
    GridIndex base;
    double dtau_residual = 0.0;      // max |d tau| / tau scale
    double anticonf_residual = 0.0;  // max |*tau + N tau| / tau scale
    double wedge_residual = 0.0;     // max |df ^ tau| / (df scale * tau scale)
    double path_residual = 0.0;      // staircase-path gap of the dual integration
};

namespace detail {

inline double form_scale(const Form1& a) {
    double s = 0.0;
    for (const auto& q : a.au) s = std::max(s, q.norm());
    for (const auto& q : a.av) s = std::max(s, q.norm());
    return s;
}

inline double anticonf_of(const Form1& tau, const QuatField& n) {
    const Form1 st = star(tau);
    double worst = 0.0;
    for (std::size_t s = 0; s < tau.au.size(); ++s) {
        worst = std::max(worst, (st.au[s] + n.values[s] * tau.au[s]).norm());
        worst = std::max(worst, (st.av[s] + n.values[s] * tau.av[s]).norm());
    }
    return worst / form_scale(tau);
}

}  // namespace detail

/// Classical isothermic form in conformal curvature-line parameters:
/// tau = -f_u^{-1} du + f_v^{-1} dv. Requires the generator guarantee that
/// (u, v) are conformal curvature-line parameters away from umbilics.
inline Form1 make_tau(const SurfaceJet& jet) {
    const Grid& g = jet.f.grid;
    Form1 tau(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const ImQuat fu = jet.df.u_at(i, j).imag();
            const ImQuat fv = jet.df.v_at(i, j).imag();
            if (fu.norm2() == 0.0 || fv.norm2() == 0.0)
                throw std::domain_error("make_tau: vanishing partial derivative");
            tau.u_at(i, j) = Quat(-inverse(fu));
            tau.v_at(i, j) = Quat(inverse(fv));
        }
    return tau;
}

/// Max relative deviation of H from its mean, the gate for make_cmc_tau.
inline constexpr double kCmcConstancyTol = 1e-2;
/// omega counts as identically zero when its sup norm is below this multiple
/// of the dN scale; sized above the O(h^2) truncation floor of desk grids.
inline constexpr double kTauZeroTol = 5e-2;

/// tau = omega for constant mean curvature seeds; closedness follows from the
/// Codazzi equation with dH = 0. Rejects seeds with varying H and the totally
/// umbilic case omega = 0 (the sphere), which admits no nonzero tau this way.
inline Form1 make_cmc_tau(const SurfaceJet& jet) {
    double mean = 0.0;
    for (double h : jet.mean_curvature.values) mean += h;
    mean /= static_cast<double>(jet.mean_curvature.values.size());
    double dev = 0.0;
    for (double h : jet.mean_curvature.values) dev = std::max(dev, std::abs(h - mean));
    if (dev > kCmcConstancyTol * (std::abs(mean) + 1.0))
        throw std::domain_error("make_cmc_tau: mean curvature is not constant on this jet");

    // dN scale: |dN| <= |H||f_u| + |omega|; use the larger coefficient norm
    const Form1 dn = jet.omega + scale(jet.mean_curvature, jet.df);
    const double omega_scale = detail::form_scale(jet.omega);
    if (omega_scale <= kTauZeroTol * detail::form_scale(dn))
        throw std::domain_error("make_cmc_tau: tau = 0 is not a valid isothermic form");
    return jet.omega;
}

/// Local potential of tau: f* with f*(base) = 0. The path-independence gap is
/// reported through the result, not thrown.
inline PotentialResult dual_surface(const Form1& tau, GridIndex base) {
    return integrate(tau, base);
}

/// Seed assembly: classical tau, dual surface, and the Definition residuals.
inline IsothermicSeed build_seed(const SurfaceJet& jet, GridIndex base) {
    IsothermicSeed seed;
    seed.jet = jet;
    seed.base = base;
    seed.tau = make_tau(jet);
    const double tau_scale = detail::form_scale(seed.tau);
    seed.dtau_residual = max_norm(d(seed.tau)) / tau_scale;
    seed.anticonf_residual = detail::anticonf_of(seed.tau, jet.normal);
    seed.wedge_residual =
        max_norm(wedge(jet.df, seed.tau)) / (detail::form_scale(jet.df) * tau_scale);
    auto pot = dual_surface(seed.tau, base);
    seed.dual = std::move(pot.potential);
    seed.path_residual = pot.path_residual;
    return seed;
}

}  // namespace bonnetforge
