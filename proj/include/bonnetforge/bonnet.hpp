#pragma once

#include <array>
#include <limits>
#include <queue>

#include "bonnetforge/align.hpp"
#include "bonnetforge/isothermic.hpp"
#include "bonnetforge/spin.hpp"

namespace bonnetforge {

// Bonnet pairs from isothermic seeds. Forward direction: lambda_pm = +-eps + f* + a
// are spin factors with rho = 0, and the two transforms share metric and mean
// curvature pointwise while staying non-congruent for non-constant f*.
// Converse direction: the unit factor between the partners recovers the
// isothermic surface and its dual via f* = (lambda r - 1)^{-1} + 1/2.

/// Pointwise metric agreement bound between the partners.
inline constexpr double kMetricGapTol = 1e-12;
/// Pointwise mean-curvature agreement bound between the partners.
inline constexpr double kHGapTol = 1e-12;
/// Gate on the seed's normalized dtau / anti-conformality residuals.
inline constexpr double kSeedResidualGate = 5e-2;
/// Variation of lambda_plus^{-1} lambda_minus below which the pair counts as congruent.
inline constexpr double kCongruenceVarTol = 1e-7;
/// Relative metric / mean-curvature equality required before the converse runs.
inline constexpr double kRecoveryGateTol = 1e-6;
/// Bound on the scalar part of the recovered dual.
inline constexpr double kImaginaryTol = 1e-12;
/// Minimum pointwise distance of lambda r from 1 needed to invert lambda r - 1.
inline constexpr double kLambdaOneTol = 1e-3;

struct VerificationReport {
    double metric_gap = 0.0;            // max rel | |df_plus| - |df_minus| |, both components
    double H_gap = 0.0;                 // max |H_plus - H_minus| / (1 + |H_plus|)
    double dirac_plus = 0.0;            // *d lambda + N d lambda defect of lambda_plus
    double dirac_minus = 0.0;           // same for lambda_minus
    double path_plus = 0.0;             // staircase-path gap of the f_plus integration
    double path_minus = 0.0;            // staircase-path gap of the f_minus integration
    double congruence_variation = 0.0;  // max |mu(s) - mu(base)| for mu = lambda_plus^{-1} lambda_minus
};

struct BonnetBundle {
    IsothermicSeed seed;
    double epsilon = 0.0;
    ImQuat a{0.0, 0.0, 0.0};
    QuatField lambda_plus;
    QuatField lambda_minus;
    SurfaceJet f_plus;
    SurfaceJet f_minus;
    VerificationReport report;
    bool non_congruent = false;
};

namespace detail {

/// Jet of a spin transform assembled from closed formulas: the differential is
/// the exact sandwiched form and normal / conformal factor / mean curvature
/// come from spin_geometry, so no finite differencing of the new immersion
/// enters the partner data.
inline SurfaceJet spin_jet(const SurfaceJet& base_jet, const QuatField& lam,
                           const Form1& df_new, const QuatField& f_new) {
    SpinGeometry geo = spin_geometry(base_jet, lam);
    SurfaceJet jet;
    jet.f = f_new;
    jet.df = df_new;
    jet.normal = std::move(geo.normal);
    jet.conf_factor = std::move(geo.conf_factor);
    jet.mean_curvature = std::move(geo.mean_curvature);
    const Form1 dn = d(jet.normal);
    jet.omega = dn - scale(jet.mean_curvature, jet.df);
    jet.analytic_df = true;
    jet.h_component_gap = 0.0;
    return jet;
}

}  // namespace detail

inline BonnetBundle construct_pair(const IsothermicSeed& seed, double epsilon, ImQuat a,
                                   bool allow_degenerate = false) {
    if (seed.dtau_residual > kSeedResidualGate || seed.anticonf_residual > kSeedResidualGate)
        throw std::invalid_argument("construct_pair: seed fails the isothermic residual gate");
    if (epsilon == 0.0 && !allow_degenerate)
        throw std::invalid_argument(
            "construct_pair: epsilon = 0 degenerates the pair to coincident surfaces");

    const Grid& g = seed.jet.f.grid;
    BonnetBundle b;
    b.seed = seed;
    b.epsilon = epsilon;
    b.a = a;
    b.lambda_plus = QuatField(g);
    b.lambda_minus = QuatField(g);
    for (std::size_t s = 0; s < b.lambda_plus.values.size(); ++s) {
        const Quat shift = seed.dual.values[s] + Quat(a);
        b.lambda_plus.values[s] = Quat(epsilon) + shift;
        b.lambda_minus.values[s] = Quat(-epsilon) + shift;
    }

    const Form1 df_plus = apply_spin(seed.jet.df, b.lambda_plus);
    const Form1 df_minus = apply_spin(seed.jet.df, b.lambda_minus);
    PotentialResult pot_plus = integrate(df_plus, seed.base);
    PotentialResult pot_minus = integrate(df_minus, seed.base);
    b.report.path_plus = pot_plus.path_residual;
    b.report.path_minus = pot_minus.path_residual;
    b.f_plus = detail::spin_jet(seed.jet, b.lambda_plus, df_plus, pot_plus.potential);
    b.f_minus = detail::spin_jet(seed.jet, b.lambda_minus, df_minus, pot_minus.potential);

    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            for (int c = 0; c < 2; ++c) {
                const Quat& p = c == 0 ? b.f_plus.df.u_at(i, j) : b.f_plus.df.v_at(i, j);
                const Quat& m = c == 0 ? b.f_minus.df.u_at(i, j) : b.f_minus.df.v_at(i, j);
                const double hi = std::max(p.norm(), m.norm());
                b.report.metric_gap =
                    std::max(b.report.metric_gap, std::abs(p.norm() - m.norm()) / hi);
            }
            const double hp = b.f_plus.mean_curvature.at(i, j);
            const double hm = b.f_minus.mean_curvature.at(i, j);
            b.report.H_gap =
                std::max(b.report.H_gap, std::abs(hp - hm) / (1.0 + std::abs(hp)));
        }

    b.report.dirac_plus = hdf_criterion(seed.jet, b.lambda_plus).residual;
    b.report.dirac_minus = hdf_criterion(seed.jet, b.lambda_minus).residual;

    const Quat mu_base =
        inverse(b.lambda_plus.at(seed.base.i, seed.base.j)) *
        b.lambda_minus.at(seed.base.i, seed.base.j);
    for (std::size_t s = 0; s < b.lambda_plus.values.size(); ++s) {
        const Quat mu = inverse(b.lambda_plus.values[s]) * b.lambda_minus.values[s];
        b.report.congruence_variation =
            std::max(b.report.congruence_variation, (mu - mu_base).norm());
    }
    b.non_congruent = b.report.congruence_variation > kCongruenceVarTol;
    return b;
}

namespace detail {

/// Orthonormal frame (t1, t2, n) from the jet's differential at one sample.
inline std::array<ImQuat, 3> frame_at(const SurfaceJet& jet, int i, int j) {
    const ImQuat fu = jet.df.u_at(i, j).imag();
    const ImQuat fv = jet.df.v_at(i, j).imag();
    const ImQuat e1 = fu * (1.0 / fu.norm());
    ImQuat r2 = fv - e1 * dot(fv, e1);
    const ImQuat e2 = r2 * (1.0 / r2.norm());
    return {e1, e2, cross(e1, e2)};
}

}  // namespace detail

/// Unit spin factor lambda with df_plus = conj(lambda) df_minus lambda,
/// recovered samplewise from the frame rotation and given a continuous sign
/// by breadth-first propagation from the base. The result is unique up to one
/// global sign, fixed so the largest component of lambda(base) is positive.
inline QuatField recover_lambda(const SurfaceJet& minus_jet, const SurfaceJet& plus_jet,
                                GridIndex base, double gate_tol = kRecoveryGateTol) {
    require_same_grid(minus_jet.f.grid, plus_jet.f.grid, "recover_lambda");
    const Grid& g = minus_jet.f.grid;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            for (int c = 0; c < 2; ++c) {
                const double m =
                    (c == 0 ? minus_jet.df.u_at(i, j) : minus_jet.df.v_at(i, j)).norm();
                const double p =
                    (c == 0 ? plus_jet.df.u_at(i, j) : plus_jet.df.v_at(i, j)).norm();
                if (std::abs(p - m) > gate_tol * std::max(p, m))
                    throw std::invalid_argument(
                        "recover_lambda: the jets fail the shared-metric gate");
            }
            const double hm = minus_jet.mean_curvature.at(i, j);
            const double hp = plus_jet.mean_curvature.at(i, j);
            if (std::abs(hp - hm) > gate_tol * (1.0 + std::abs(hm)))
                throw std::invalid_argument(
                    "recover_lambda: the jets fail the shared-mean-curvature gate");
        }

    QuatField lam(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const auto fm = detail::frame_at(minus_jet, i, j);
            const auto fp = detail::frame_at(plus_jet, i, j);
            Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
            for (int c = 0; c < 3; ++c) {
                const double pc[3] = {fp[c].x, fp[c].y, fp[c].z};
                const double mc[3] = {fm[c].x, fm[c].y, fm[c].z};
                for (int r = 0; r < 3; ++r)
                    for (int cc = 0; cc < 3; ++cc) R(r, cc) += pc[r] * mc[cc];
            }
            lam.at(i, j) = quat_from_rotation(R);
        }

    // Sign continuity over the simply connected grid.
    std::vector<char> seen(lam.values.size(), 0);
    std::queue<GridIndex> todo;
    seen[g.index(base.i, base.j)] = 1;
    todo.push(base);
    while (!todo.empty()) {
        const GridIndex cur = todo.front();
        todo.pop();
        const Quat& here = lam.at(cur.i, cur.j);
        const GridIndex nbrs[4] = {{cur.i - 1, cur.j}, {cur.i + 1, cur.j},
                                   {cur.i, cur.j - 1}, {cur.i, cur.j + 1}};
        for (const GridIndex& nb : nbrs) {
            if (nb.i < 0 || nb.i >= g.nu || nb.j < 0 || nb.j >= g.nv) continue;
            const std::size_t s = g.index(nb.i, nb.j);
            if (seen[s]) continue;
            seen[s] = 1;
            if (dot(lam.values[s], here) < 0.0) lam.values[s] = lam.values[s] * -1.0;
            todo.push(nb);
        }
    }
    const Quat& qb = lam.at(base.i, base.j);
    const double comps[4] = {qb.w, qb.x, qb.y, qb.z};
    int big = 0;
    for (int c = 1; c < 4; ++c)
        if (std::abs(comps[c]) > std::abs(comps[big])) big = c;
    if (comps[big] < 0.0)
        for (auto& q : lam.values) q = q * -1.0;
    return lam;
}

struct RecoveredIsothermic {
    QuatField f;        // integrated isothermic immersion, zero at the base
    QuatField f_star;   // pointwise dual, (lambda r - 1)^{-1} + 1/2
    Quat r;             // the rotation actually used
    double imaginary_defect = 0.0;    // max scalar part of f_star before projection
    double closedness_residual = 0.0; // max |d(recovered df)| / form scale
    double wedge_residual = 0.0;      // max |df ^ d f_star| / product of form scales
    double path_residual = 0.0;       // staircase-path gap of the f integration
    double reconstruction_gap = 0.0;  // max rel defect of conj(f*-1/2) df (f*-1/2) = df_minus
};

/// Unit r from {1, i, j, k} keeping lambda r away from 1 pointwise. r = 1 is
/// preferred whenever it clears ten times the invertibility cutoff; only a
/// lambda that comes close to 1 forces a nontrivial rotation.
inline Quat choose_r(const QuatField& lam) {
    const Quat candidates[4] = {Quat(1, 0, 0, 0), Quat::i(), Quat::j(), Quat::k()};
    Quat best = candidates[0];
    double best_score = -1.0;
    for (const Quat& r : candidates) {
        double score = std::numeric_limits<double>::infinity();
        for (const auto& q : lam.values)
            score = std::min(score, (q * r - Quat(1)).norm());
        if (r.w == 1.0 && score >= 10.0 * kLambdaOneTol) return r;
        if (score > best_score) {
            best_score = score;
            best = r;
        }
    }
    if (best_score < kLambdaOneTol)
        throw std::domain_error(
            "recover_isothermic: no rotation in {1, i, j, k} keeps lambda r away from 1");
    return best;
}

/// Converse of construct_pair: from the minus partner and the unit factor
/// lambda, rebuild the isothermic surface f and its dual f*. The constant
/// unit quaternion r rotates the partners relative to each other and must
/// keep lambda r away from 1 so that lambda r - 1 stays invertible.
inline RecoveredIsothermic recover_isothermic(const SurfaceJet& minus_jet,
                                              const QuatField& lam, Quat r,
                                              GridIndex base) {
    require_same_grid(minus_jet.f.grid, lam.grid, "recover_isothermic");
    if (std::abs(r.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("recover_isothermic: r must be a unit quaternion");
    for (const auto& q : lam.values)
        if (std::abs(q.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("recover_isothermic: lambda must be a unit field");

    const Grid& g = minus_jet.f.grid;
    RecoveredIsothermic out;
    out.r = r;

    QuatField mu(g);
    for (std::size_t s = 0; s < mu.values.size(); ++s) {
        mu.values[s] = lam.values[s] * r - Quat(1);
        if (mu.values[s].norm() < kLambdaOneTol)
            throw std::domain_error(
                "recover_isothermic: lambda r passes through 1; choose a different r");
    }

    out.f_star = QuatField(g);
    for (std::size_t s = 0; s < mu.values.size(); ++s) {
        Quat fs = inverse(mu.values[s]) + Quat(0.5);
        out.imaginary_defect = std::max(out.imaginary_defect, std::abs(fs.w));
        fs.w = 0.0;
        out.f_star.values[s] = fs;
    }
    if (out.imaginary_defect > kImaginaryTol)
        throw std::domain_error("recover_isothermic: recovered dual has a scalar part");

    Form1 omega(g);
    for (std::size_t s = 0; s < mu.values.size(); ++s) {
        const Quat& m = mu.values[s];
        omega.au[s] = conj(m) * minus_jet.df.au[s] * m;
        omega.av[s] = conj(m) * minus_jet.df.av[s] * m;
    }

    const double omega_scale = std::max(max_norm(omega), 1e-300);
    out.closedness_residual = max_norm(d(omega)) / omega_scale;
    const Form1 dstar = d(out.f_star);
    const double dstar_scale = std::max(max_norm(dstar), 1e-300);
    out.wedge_residual = max_norm(wedge(omega, dstar)) / (omega_scale * dstar_scale);

    PotentialResult pot = integrate(omega, base);
    out.f = std::move(pot.potential);
    out.path_residual = pot.path_residual;

    // conj(lambda_minus_new) omega lambda_minus_new must give back df_minus
    // for lambda_minus_new = f* - 1/2, since f* - 1/2 = (lambda r - 1)^{-1}.
    for (std::size_t s = 0; s < mu.values.size(); ++s) {
        const Quat lm = out.f_star.values[s] - Quat(0.5);
        const Quat du = conj(lm) * omega.au[s] * lm - minus_jet.df.au[s];
        const Quat dv = conj(lm) * omega.av[s] * lm - minus_jet.df.av[s];
        const double scale_u = minus_jet.df.au[s].norm();
        const double scale_v = minus_jet.df.av[s].norm();
        out.reconstruction_gap = std::max(
            out.reconstruction_gap, std::max(du.norm() / scale_u, dv.norm() / scale_v));
    }
    return out;
}

}  // namespace bonnetforge
