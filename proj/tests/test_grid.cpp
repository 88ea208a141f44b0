#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bonnetforge/calculus.hpp"
#include "bonnetforge/grid.hpp"
#include "test_helpers.hpp"

using namespace bonnetforge;

TEST_CASE("grid construction validates shape and range", "[grid]") {
    REQUIRE_THROWS_AS(Grid::from_range(2, 9, 0, 1, 0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(Grid::from_range(9, 2, 0, 1, 0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(Grid::from_range(9, 9, 1, 1, 0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(Grid::from_range(9, 9, 0, 1, 2, 1), std::invalid_argument);

    const Grid g = Grid::from_range(5, 9, -1.0, 1.0, 2.0, 4.0);
    REQUIRE(g.nu == 5);
    REQUIRE(g.nv == 9);
    REQUIRE(g.hu == 0.5);
    REQUIRE(g.hv == 0.25);
    REQUIRE(g.u(4) == 1.0);
    REQUIRE(g.v(8) == 4.0);
    REQUIRE(g.index(2, 3) == 2 * 9 + 3);
    REQUIRE(g.count() == 45);

    const Grid r = g.refined();
    REQUIRE(r.nu == 9);
    REQUIRE(r.nv == 17);
    REQUIRE(r.hu == 0.25);
    REQUIRE(r.u_max() == g.u_max());
    REQUIRE(r.v_max() == g.v_max());
    REQUIRE(g == g);
    REQUIRE_FALSE(g == r);
}

TEST_CASE("mismatched grids are rejected by shared operations", "[grid]") {
    const Grid a = Grid::from_range(5, 5, 0, 1, 0, 1);
    const Grid b = Grid::from_range(7, 5, 0, 1, 0, 1);
    Form1 alpha(a), beta(b);
    REQUIRE_THROWS_AS(wedge(alpha, beta), std::invalid_argument);
    REQUIRE_THROWS_AS(integrate(alpha, {9, 0}), std::invalid_argument);
}

TEST_CASE("partial derivatives are exact on quadratics", "[grid]") {
    const Grid g = Grid::from_range(17, 13, -1.0, 2.0, 0.5, 3.0);
    const QuatField f = QuatField::sample(
        g, [](double u, double v) { return Quat(2.0 + u * u + 3.0 * u * v - v * v); });
    const auto [fu, fv] = partials(f);
    double worst = 0.0;
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const double u = g.u(i), v = g.v(j);
            worst = std::max(worst, (fu.at(i, j) - Quat(2.0 * u + 3.0 * v)).norm());
            worst = std::max(worst, (fv.at(i, j) - Quat(3.0 * u - 2.0 * v)).norm());
        }
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("partial derivatives converge at second order", "[grid]") {
    std::vector<double> hs, errs;
    for (int n : {33, 65, 129}) {
        const Grid g = Grid::from_range(n, n, 0.0, 2.0, 0.0, 1.5);
        const QuatField f = QuatField::sample(g, [](double u, double v) {
            return Quat(std::sin(u) * std::cos(v), u * v, std::cos(2.0 * v), std::sin(u + v));
        });
        const Form1 df = d(f);
        double worst = 0.0;
        for (int i = 0; i < g.nu; ++i)
            for (int j = 0; j < g.nv; ++j) {
                const double u = g.u(i), v = g.v(j);
                const Quat du(std::cos(u) * std::cos(v), v, 0.0, std::cos(u + v));
                const Quat dv(-std::sin(u) * std::sin(v), u, -2.0 * std::sin(2.0 * v),
                              std::cos(u + v));
                worst = std::max(worst, (df.u_at(i, j) - du).norm());
                worst = std::max(worst, (df.v_at(i, j) - dv).norm());
            }
        hs.push_back(g.hu);
        errs.push_back(worst);
        REQUIRE(worst <= 2.0 * g.hu * g.hu);
    }
    REQUIRE(testutil::fit_order(hs, errs) >= 1.9);
}

TEST_CASE("the derivative of a derivative vanishes", "[grid]") {
    const Grid g = Grid::from_range(41, 37, 0.0, 3.0, -1.0, 1.0);
    const QuatField f = QuatField::sample(g, [](double u, double v) {
        return Quat(std::sin(u) * std::cos(2.0 * v), u * u * v, std::cos(u + v),
                    std::exp(0.2 * u - 0.1 * v));
    });
    REQUIRE(max_norm(d(d(f))) <= 1e-12);
}

TEST_CASE("the hodge star rotates components and squares to minus one", "[grid]") {
    const Grid g = Grid::from_range(9, 9, 0, 1, 0, 1);
    std::mt19937 rng(2024011);
    Form1 a(g);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        a.au[s] = testutil::random_quat(rng);
        a.av[s] = testutil::random_quat(rng);
    }
    const Form1 sa = star(a);
    const Form1 ssa = star(sa);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        REQUIRE((sa.au[s] - a.av[s]).norm() == 0.0);
        REQUIRE((sa.av[s] + a.au[s]).norm() == 0.0);
        REQUIRE((ssa.au[s] + a.au[s]).norm() == 0.0);
        REQUIRE((ssa.av[s] + a.av[s]).norm() == 0.0);
    }
}

TEST_CASE("wedge matches its alternating bilinear extension", "[grid]") {
    const Grid g = Grid::from_range(3, 3, 0, 1, 0, 1);
    Form1 a(g);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        a.au[s] = Quat::i();
        a.av[s] = Quat::j();
    }
    const Form2Q self = wedge(a, a);
    for (const Quat& q : self.q) REQUIRE((q - Quat(0, 0, 0, 2)).norm() == 0.0);

    std::mt19937 rng(2024012);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const Quat au = testutil::random_quat(rng), av = testutil::random_quat(rng);
        const Quat bu = testutil::random_quat(rng), bv = testutil::random_quat(rng);
        const double m00 = u(rng), m10 = u(rng), m01 = u(rng), m11 = u(rng);
        // alpha(Y) beta(Z) - alpha(Z) beta(Y) for Y, Z spanned by the
        // coordinate pair through M scales the coordinate value by det M.
        const Quat ay = au * m00 + av * m10, az = au * m01 + av * m11;
        const Quat by = bu * m00 + bv * m10, bz = bu * m01 + bv * m11;
        const double det = m00 * m11 - m01 * m10;
        const Quat lhs = ay * bz - az * by;
        const Quat rhs = (au * bv - av * bu) * det;
        worst = std::max(worst, (lhs - rhs).norm());
    }
    REQUIRE(worst <= 1e-13);
}

TEST_CASE("integration restores a sampled potential at second order", "[grid]") {
    const Grid lin = Grid::from_range(9, 11, 0.0, 2.0, -1.0, 1.0);
    Form1 dl(lin);
    for (std::size_t s = 0; s < dl.au.size(); ++s) {
        dl.au[s] = Quat(2.0, -1.0, 0.5, 0.0);
        dl.av[s] = Quat(0.5, 3.0, 0.0, -2.0);
    }
    const PotentialResult plin = integrate(dl, {3, 4});
    REQUIRE(plin.path_residual <= 1e-13);
    double worst = 0.0;
    for (int i = 0; i < lin.nu; ++i)
        for (int j = 0; j < lin.nv; ++j) {
            const double du = lin.u(i) - lin.u(3), dv = lin.v(j) - lin.v(4);
            const Quat want = Quat(2.0, -1.0, 0.5, 0.0) * du + Quat(0.5, 3.0, 0.0, -2.0) * dv;
            worst = std::max(worst, (plin.potential.at(i, j) - want).norm());
        }
    REQUIRE(worst <= 1e-13);

    std::vector<double> hs, errs;
    for (int n : {33, 65, 129}) {
        const Grid g = Grid::from_range(n, n, 0.0, 2.0, 0.0, 1.5);
        const QuatField f = QuatField::sample(g, [](double u, double v) {
            return Quat(ImQuat{std::sin(u) * std::cos(v), u * v, std::cos(2.0 * v)});
        });
        Form1 alpha(g);
        for (int i = 0; i < g.nu; ++i)
            for (int j = 0; j < g.nv; ++j) {
                const double u = g.u(i), v = g.v(j);
                alpha.u_at(i, j) = Quat(ImQuat{std::cos(u) * std::cos(v), v, 0.0});
                alpha.v_at(i, j) =
                    Quat(ImQuat{-std::sin(u) * std::sin(v), u, -2.0 * std::sin(2.0 * v)});
            }
        const PotentialResult pot = integrate(alpha, {0, 0});
        double err = 0.0;
        for (std::size_t s = 0; s < f.values.size(); ++s)
            err = std::max(err, (pot.potential.values[s] - f.values[s] + f.values[0]).norm());
        hs.push_back(g.hu);
        errs.push_back(err);
        REQUIRE(err <= g.hu * g.hu);
        REQUIRE(pot.path_residual <= 0.5 * g.hu * g.hu);
    }
    REQUIRE(testutil::fit_order(hs, errs) >= 1.9);
}

TEST_CASE("the path defect of a non-closed form measures enclosed area", "[grid]") {
    const Grid g = Grid::from_range(21, 17, 0.5, 2.5, -1.0, 0.5);
    Form1 alpha(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) alpha.v_at(i, j) = Quat(g.u(i));
    const PotentialResult pot = integrate(alpha, {0, 0});
    const double area = (g.u_max() - g.u0) * (g.v_max() - g.v0);
    REQUIRE(std::abs(pot.path_residual - area) <= 1e-12 * area);
}
