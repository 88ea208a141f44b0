#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bonnetforge/bonnet.hpp"
#include "bonnetforge/generators.hpp"
#include "bonnetforge/isothermic.hpp"
#include "bonnetforge/spin.hpp"
#include "test_helpers.hpp"

using namespace bonnetforge;

namespace {

/// Smooth nowhere-zero field used as a generic spin factor.
QuatField smooth_lambda(const Grid& g) {
    return QuatField::sample(g, [](double u, double v) {
        return Quat(1.0 + 0.2 * std::sin(u), 0.3 * std::cos(v), 0.1 * u - 0.2 * v,
                    0.25 * std::sin(u + v));
    });
}

}  // namespace

TEST_CASE("identity and constant spins act by conjugation", "[spin]") {
    const Grid g = testutil::param_window(33);
    const SurfaceJet jet = gen_cylinder(g);

    const Form1 same = apply_spin(jet.df, QuatField(g, Quat(1.0)));
    REQUIRE(testutil::max_form_gap(same, jet.df) == 0.0);

    const Form1 scaled = apply_spin(jet.df, QuatField(g, Quat(2.0)));
    REQUIRE(testutil::max_form_gap(scaled, jet.df * 4.0) == 0.0);

    const Quat c(0.8, 0.1, -0.4, 0.25);
    const Form1 rotated = apply_spin(jet.df, QuatField(g, c));
    double worst = 0.0;
    for (std::size_t s = 0; s < rotated.au.size(); ++s) {
        worst = std::max(worst, (rotated.au[s] - conj(c) * jet.df.au[s] * c).norm());
        worst = std::max(worst, (rotated.av[s] - conj(c) * jet.df.av[s] * c).norm());
    }
    REQUIRE(worst <= 1e-15);
}

TEST_CASE("spin factors compose pointwise and invert exactly", "[spin]") {
    const Grid g = testutil::param_window(33);
    const SurfaceJet jet = gen_catenoid(g);
    const QuatField lam1 = smooth_lambda(g);
    const QuatField lam2 = QuatField::sample(g, [](double u, double v) {
        return Quat(0.9, 0.1 * std::cos(u), -0.3 * std::sin(v), 0.2);
    });

    QuatField product(g), inv1(g);
    for (std::size_t s = 0; s < product.values.size(); ++s) {
        product.values[s] = lam1.values[s] * lam2.values[s];
        inv1.values[s] = inverse(lam1.values[s]);
    }

    const Form1 chained = apply_spin(apply_spin(jet.df, lam1), lam2);
    const Form1 direct = apply_spin(jet.df, product);
    REQUIRE(testutil::max_form_gap(chained, direct) <= 1e-13);

    const Form1 restored = apply_spin(apply_spin(jet.df, lam1), inv1);
    REQUIRE(testutil::max_form_gap(restored, jet.df) <= 1e-13);
}

TEST_CASE("unit spin factors preserve the conformal factor", "[spin]") {
    const Grid g = testutil::param_window(33);
    const SurfaceJet jet = gen_catenoid(g);
    QuatField lam = smooth_lambda(g);
    for (Quat& q : lam.values) q = normalized(q);

    const SpinGeometry geo = spin_geometry(jet, lam);
    double worst = 0.0;
    for (std::size_t s = 0; s < lam.values.size(); ++s)
        worst = std::max(worst, std::abs(geo.conf_factor.values[s] -
                                         jet.conf_factor.values[s]) /
                                    jet.conf_factor.values[s]);
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("spin geometry follows the closed transformation laws", "[spin]") {
    const Grid g = testutil::param_window(33);
    const SurfaceJet jet = gen_cylinder(g);
    const Quat c(0.8, 0.1, -0.4, 0.25);
    const SpinGeometry geo = spin_geometry(jet, QuatField(g, c));
    const double n2 = c.norm2();
    double worst_n = 0.0, worst_conf = 0.0, worst_h = 0.0;
    for (std::size_t s = 0; s < jet.f.values.size(); ++s) {
        const Quat want_n = conj(c) * jet.normal.values[s] * c / n2;
        worst_n = std::max(worst_n, (geo.normal.values[s] - want_n).norm());
        worst_conf = std::max(worst_conf, std::abs(geo.conf_factor.values[s] -
                                                   n2 * n2 * jet.conf_factor.values[s]));
        worst_h = std::max(worst_h, std::abs(geo.mean_curvature.values[s] -
                                             jet.mean_curvature.values[s] / n2));
    }
    REQUIRE(worst_n <= 1e-14);
    REQUIRE(worst_conf <= 1e-14);
    REQUIRE(worst_h <= 1e-14);
}

TEST_CASE("the rho estimate satisfies least-squares optimality", "[spin]") {
    const Grid g = testutil::param_window(17);
    const SurfaceJet jet = gen_cylinder(g);
    const QuatField lam = smooth_lambda(g);
    const RhoEstimate est = estimate_rho(jet, lam);

    const Form1 dl = d(lam);
    double worst = 0.0;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat n = jet.normal.at(i, j);
            const Quat lhs_u = dl.v_at(i, j) + n * dl.u_at(i, j);
            const Quat lhs_v = -dl.u_at(i, j) + n * dl.v_at(i, j);
            const Quat b_u = jet.df.u_at(i, j) * lam.at(i, j);
            const Quat b_v = jet.df.v_at(i, j) * lam.at(i, j);
            const double rho = est.rho.at(i, j);

            // Normal equation: the defect is orthogonal to the direction b.
            const double inner =
                dot(lhs_u - b_u * rho, b_u) + dot(lhs_v - b_v * rho, b_v);
            worst = std::max(worst, std::abs(inner) /
                                        (b_u.norm2() + b_v.norm2()));

            // Any perturbation of rho grows the squared defect.
            auto ssr = [&](double r) {
                return (lhs_u - b_u * r).norm2() + (lhs_v - b_v * r).norm2();
            };
            REQUIRE(ssr(rho) <= ssr(rho + 1e-3) + 1e-15);
            REQUIRE(ssr(rho) <= ssr(rho - 1e-3) + 1e-15);
        }
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("rho vanishes for the pair factors", "[spin]") {
    std::vector<double> hs, errs;
    for (int n : {33, 65}) {
        const Grid g = testutil::param_window(n);
        const IsothermicSeed seed = build_seed(gen_catenoid(g), {0, 0});
        const BonnetBundle b = construct_pair(seed, 0.5, {0, 0, 0});
        const RhoEstimate est = estimate_rho(seed.jet, b.lambda_plus);
        REQUIRE(max_abs(est.rho) <= 0.5 * g.hu * g.hu);
        REQUIRE(est.residual <= 2.0 * g.hu * g.hu);
        hs.push_back(g.hu);
        errs.push_back(max_abs(est.rho));
    }
    REQUIRE(testutil::fit_order(hs, errs) >= 1.9);
}

TEST_CASE("spin geometry matches a rebuilt jet away from the boundary", "[spin]") {
    const Grid g = testutil::param_window(65);
    const SurfaceJet jet = gen_catenoid(g);
    const IsothermicSeed seed = build_seed(jet, {0, 0});
    const BonnetBundle b = construct_pair(seed, 0.5, {0, 0, 0});

    const SurfaceJet rebuilt = build_jet(b.f_plus.f);
    double worst_h = 0.0, worst_n = 0.0;
    for (int i = 2; i < g.nu - 2; ++i)
        for (int j = 2; j < g.nv - 2; ++j) {
            worst_h = std::max(worst_h, std::abs(rebuilt.mean_curvature.at(i, j) -
                                                 b.f_plus.mean_curvature.at(i, j)));
            worst_n = std::max(worst_n, (rebuilt.normal.at(i, j) -
                                         b.f_plus.normal.at(i, j)).norm());
        }
    REQUIRE(worst_h <= 2.0 * g.hu * g.hu);
    REQUIRE(worst_n <= 2.0 * g.hu * g.hu);
}

TEST_CASE("integrating a constant spin matches the conjugated potential", "[spin]") {
    const Grid g = testutil::param_window(49);
    const SurfaceJet jet = gen_cylinder(g);
    const Quat c(0.8, 0.1, -0.4, 0.25);
    const PotentialResult spun = integrate_spin(jet, QuatField(g, c), {0, 0});
    const PotentialResult plain = integrate(jet.df, {0, 0});
    double worst = 0.0;
    for (std::size_t s = 0; s < spun.potential.values.size(); ++s)
        worst = std::max(worst, (spun.potential.values[s] -
                                 conj(c) * plain.potential.values[s] * c).norm());
    REQUIRE(worst <= 1e-13);
}

TEST_CASE("the dirac criterion accepts pair factors and rejects generic fields", "[spin]") {
    const Grid g = testutil::param_window(65);
    const IsothermicSeed seed = build_seed(gen_cylinder(g), {0, 0});
    const BonnetBundle b = construct_pair(seed, 0.5, {0, 0, 0});

    const DiracCheck good = hdf_criterion(seed.jet, b.lambda_plus);
    REQUIRE(good.holds);
    REQUIRE(good.residual <= dirac_default_tol(g));

    const QuatField bad = QuatField::sample(
        g, [](double u, double) { return Quat(1.0, std::sin(3.0 * u), 0.0, 0.0); });
    const DiracCheck broken = hdf_criterion(seed.jet, bad);
    REQUIRE_FALSE(broken.holds);
    REQUIRE(broken.residual >= 1.0);
}

TEST_CASE("vanishing spin factors are rejected", "[spin]") {
    const Grid g = testutil::param_window(9);
    const SurfaceJet jet = gen_cylinder(g);
    QuatField lam(g, Quat(1.0));
    lam.at(4, 4) = Quat();
    REQUIRE_THROWS_AS(apply_spin(jet.df, lam), std::domain_error);
    REQUIRE_THROWS_AS(spin_geometry(jet, lam), std::domain_error);
}
