#pragma once

#include <utility>

#include "bonnetforge/grid.hpp"

namespace bonnetforge {

// Finite-difference exterior calculus on the grid, orientation J du = dv.
// Interior stencils are central, boundary stencils one-sided, both second
// order, so every derived residual is O(h^2) under refinement.

namespace detail {

/// d/du along index i at fixed j. T needs +, -, double*.
template <class T>
T diff_u(const Field<T>& f, int i, int j) {
    const int n = f.grid.nu;
    const double h = f.grid.hu;
    if (i == 0) return (f.at(0, j) * -3.0 + f.at(1, j) * 4.0 - f.at(2, j)) * (0.5 / h);
    if (i == n - 1) return (f.at(n - 1, j) * 3.0 - f.at(n - 2, j) * 4.0 + f.at(n - 3, j)) * (0.5 / h);
    return (f.at(i + 1, j) - f.at(i - 1, j)) * (0.5 / h);
}

template <class T>
T diff_v(const Field<T>& f, int i, int j) {
    const int n = f.grid.nv;
    const double h = f.grid.hv;
    if (j == 0) return (f.at(i, 0) * -3.0 + f.at(i, 1) * 4.0 - f.at(i, 2)) * (0.5 / h);
    if (j == n - 1) return (f.at(i, n - 1) * 3.0 - f.at(i, n - 2) * 4.0 + f.at(i, n - 3)) * (0.5 / h);
    return (f.at(i, j + 1) - f.at(i, j - 1)) * (0.5 / h);
}

}  // namespace detail

template <class T>
std::pair<Field<T>, Field<T>> partials(const Field<T>& f) {
    if (f.grid.nu < 3 || f.grid.nv < 3) throw std::invalid_argument("partials: grid too small");
    Field<T> fu(f.grid), fv(f.grid);
    for (int i = 0; i < f.grid.nu; ++i)
        for (int j = 0; j < f.grid.nv; ++j) {
            fu.at(i, j) = detail::diff_u(f, i, j);
            fv.at(i, j) = detail::diff_v(f, i, j);
        }
    return {std::move(fu), std::move(fv)};
}

/// dF = F_u du + F_v dv.
inline Form1 d(const QuatField& f) {
    auto [fu, fv] = partials(f);
    Form1 out(f.grid);
    out.au = std::move(fu.values);
    out.av = std::move(fv.values);
    return out;
}

/// *alpha = alpha o J with J du = dv: (*a)_u = a_v, (*a)_v = -a_u.
/// Satisfies star(star(a)) = -a exactly.
inline Form1 star(const Form1& a) {
    Form1 out(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        out.au[s] = a.av[s];
        out.av[s] = -a.au[s];
    }
    return out;
}

/// (a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X), evaluated on (du, dv).
inline Form2Q wedge(const Form1& a, const Form1& b) {
    require_same_grid(a.grid, b.grid, "wedge");
    Form2Q out(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) out.q[s] = a.au[s] * b.av[s] - a.av[s] * b.au[s];
    return out;
}

/// d(a_u du + a_v dv) = (d_u a_v - d_v a_u) as quadratic form.
inline Form2Q d(const Form1& a) {
    QuatField cu(a.grid), cv(a.grid);
    cu.values = a.au;
    cv.values = a.av;
    Form2Q out(a.grid);
    for (int i = 0; i < a.grid.nu; ++i)
        for (int j = 0; j < a.grid.nv; ++j)
            out.at(i, j) = detail::diff_u(cv, i, j) - detail::diff_v(cu, i, j);
    return out;
}

struct PotentialResult {
    QuatField potential;
    /// max over samples of the gap between the two staircase paths;
    /// near zero iff the form is closed in the discrete sense.
    double path_residual = 0.0;
};

/// Potential F with F(base) = 0, computed as the average of the two
/// staircase paths (u-then-v and v-then-u) with trapezoidal edge sums.
inline PotentialResult integrate(const Form1& a, GridIndex base) {
    const Grid& g = a.grid;
    if (base.i < 0 || base.i >= g.nu || base.j < 0 || base.j >= g.nv)
        throw std::invalid_argument("integrate: base index outside grid");

    // cum_u(i,j): edge integral along u at fixed j from base.i to i (signed).
    // cum_v(i,j): edge integral along v at fixed i from base.j to j.
    QuatField cum_u(g), cum_v(g);
    for (int j = 0; j < g.nv; ++j) {
        for (int i = base.i + 1; i < g.nu; ++i)
            cum_u.at(i, j) = cum_u.at(i - 1, j) + (a.u_at(i - 1, j) + a.u_at(i, j)) * (0.5 * g.hu);
        for (int i = base.i - 1; i >= 0; --i)
            cum_u.at(i, j) = cum_u.at(i + 1, j) - (a.u_at(i, j) + a.u_at(i + 1, j)) * (0.5 * g.hu);
    }
    for (int i = 0; i < g.nu; ++i) {
        for (int j = base.j + 1; j < g.nv; ++j)
            cum_v.at(i, j) = cum_v.at(i, j - 1) + (a.v_at(i, j - 1) + a.v_at(i, j)) * (0.5 * g.hv);
        for (int j = base.j - 1; j >= 0; --j)
            cum_v.at(i, j) = cum_v.at(i, j + 1) - (a.v_at(i, j) + a.v_at(i, j + 1)) * (0.5 * g.hv);
    }

    PotentialResult out{QuatField(g), 0.0};
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const Quat p1 = cum_u.at(i, base.j) + cum_v.at(i, j);   // u first, then v
            const Quat p2 = cum_v.at(base.i, j) + cum_u.at(i, j);   // v first, then u
            out.potential.at(i, j) = (p1 + p2) * 0.5;
            out.path_residual = std::max(out.path_residual, (p1 - p2).norm());
        }
    return out;
}

// ---- pointwise form algebra ----

inline Form1 operator+(const Form1& a, const Form1& b) {
    require_same_grid(a.grid, b.grid, "form sum");
    Form1 out(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        out.au[s] = a.au[s] + b.au[s];
        out.av[s] = a.av[s] + b.av[s];
    }
    return out;
}

inline Form1 operator-(const Form1& a, const Form1& b) {
    require_same_grid(a.grid, b.grid, "form difference");
    Form1 out(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        out.au[s] = a.au[s] - b.au[s];
        out.av[s] = a.av[s] - b.av[s];
    }
    return out;
}

inline Form1 operator*(const Form1& a, double c) {
    Form1 out(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        out.au[s] = a.au[s] * c;
        out.av[s] = a.av[s] * c;
    }
    return out;
}

/// Coefficient-wise left multiplication h * alpha by a pointwise field.
inline Form1 left_mul(const QuatField& h, const Form1& a) {
    require_same_grid(h.grid, a.grid, "left_mul");
    Form1 out(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        out.au[s] = h.values[s] * a.au[s];
        out.av[s] = h.values[s] * a.av[s];
    }
    return out;
}

/// Coefficient-wise scaling by a real field.
inline Form1 scale(const RealField& c, const Form1& a) {
    require_same_grid(c.grid, a.grid, "scale");
    Form1 out(a.grid);
    for (std::size_t s = 0; s < a.au.size(); ++s) {
        out.au[s] = a.au[s] * c.values[s];
        out.av[s] = a.av[s] * c.values[s];
    }
    return out;
}

}  // namespace bonnetforge
