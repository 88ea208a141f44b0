#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bonnetforge/quaternion.hpp"

namespace bonnetforge {

/// Rectangular sample lattice over a simply connected parameter rectangle.
/// u_i = u0 + i*hu for i in [0, nu), v_j = v0 + j*hv for j in [0, nv).
struct Grid {
    int nu = 0, nv = 0;
    double u0 = 0.0, v0 = 0.0;
    double hu = 0.0, hv = 0.0;

    Grid() = default;
    Grid(int nu_, int nv_, double u0_, double v0_, double hu_, double hv_)
        : nu(nu_), nv(nv_), u0(u0_), v0(v0_), hu(hu_), hv(hv_) {
        if (nu < 3 || nv < 3) throw std::invalid_argument("grid needs at least 3 samples per axis");
        if (hu <= 0.0 || hv <= 0.0) throw std::invalid_argument("grid spacings must be positive");
    }

    static Grid from_range(int nu, int nv, double u_lo, double u_hi, double v_lo, double v_hi) {
        if (nu < 3 || nv < 3) throw std::invalid_argument("grid needs at least 3 samples per axis");
        if (u_hi <= u_lo || v_hi <= v_lo) throw std::invalid_argument("grid range must be increasing");
        return Grid(nu, nv, u_lo, v_lo, (u_hi - u_lo) / (nu - 1), (v_hi - v_lo) / (nv - 1));
    }

    /// Same ranges, spacing halved: nu -> 2nu-1, nv -> 2nv-1.
    Grid refined() const { return Grid(2 * nu - 1, 2 * nv - 1, u0, v0, hu / 2.0, hv / 2.0); }

    double u(int i) const { return u0 + i * hu; }
    double v(int j) const { return v0 + j * hv; }
    double u_max() const { return u(nu - 1); }
    double v_max() const { return v(nv - 1); }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nv + j; }
    std::size_t count() const { return static_cast<std::size_t>(nu) * nv; }

    bool operator==(const Grid& o) const {
        return nu == o.nu && nv == o.nv && u0 == o.u0 && v0 == o.v0 && hu == o.hu && hv == o.hv;
    }
};

struct GridIndex {
    int i = 0, j = 0;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

/// Sampled T-valued function on a Grid, stored row-major with v fastest.
template <class T>
struct Field {
    Grid grid;
    std::vector<T> values;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(g.count()) {}
    Field(const Grid& g, const T& fill) : grid(g), values(g.count(), fill) {}

    T& at(int i, int j) { return values[grid.index(i, j)]; }
    const T& at(int i, int j) const { return values[grid.index(i, j)]; }

    template <class Fn>
    static Field sample(const Grid& g, Fn&& fn) {
        Field out(g);
        for (int i = 0; i < g.nu; ++i)
            for (int j = 0; j < g.nv; ++j) out.at(i, j) = fn(g.u(i), g.v(j));
        return out;
    }
};

using QuatField = Field<Quat>;
using RealField = Field<double>;

/// Quaternion-valued 1-form alpha = au du + av dv, stored as two
/// pointwise coefficient fields.
struct Form1 {
    Grid grid;
    std::vector<Quat> au, av;

    Form1() = default;
    explicit Form1(const Grid& g) : grid(g), au(g.count()), av(g.count()) {}

    Quat& u_at(int i, int j) { return au[grid.index(i, j)]; }
    Quat& v_at(int i, int j) { return av[grid.index(i, j)]; }
    const Quat& u_at(int i, int j) const { return au[grid.index(i, j)]; }
    const Quat& v_at(int i, int j) const { return av[grid.index(i, j)]; }
};

/// Quaternion-valued 2-form identified with its quadratic form,
/// stored as the value on the coordinate direction: q = omega(du, Jdu = dv).
struct Form2Q {
    Grid grid;
    std::vector<Quat> q;

    Form2Q() = default;
    explicit Form2Q(const Grid& g) : grid(g), q(g.count()) {}

    Quat& at(int i, int j) { return q[grid.index(i, j)]; }
    const Quat& at(int i, int j) const { return q[grid.index(i, j)]; }
};

inline double max_norm(const QuatField& f) {
    double m = 0.0;
    for (const auto& q : f.values) m = std::max(m, q.norm());
    return m;
}

inline double max_abs(const RealField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double max_norm(const Form2Q& w) {
    double m = 0.0;
    for (const auto& q : w.q) m = std::max(m, q.norm());
    return m;
}

/// max over samples and components of the coefficient norms.
inline double max_norm(const Form1& a) {
    double m = 0.0;
    for (const auto& q : a.au) m = std::max(m, q.norm());
    for (const auto& q : a.av) m = std::max(m, q.norm());
    return m;
}

}  // namespace bonnetforge
