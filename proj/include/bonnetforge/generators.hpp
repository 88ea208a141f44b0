#pragma once

#include <algorithm>
#include <functional>
#include <numbers>

#include "bonnetforge/surface.hpp"

namespace bonnetforge {

// Seed surfaces in conformal curvature-line parameters, each with analytic
// df attached so convention errors stay visible below truncation error.

namespace detail {

inline void check_open_period(const Grid& g) {
    // rotational seeds keep the u-interval strictly inside one period so the
    // domain stays simply connected
    if (g.u_max() - g.u0 >= 2.0 * std::numbers::pi)
        throw std::invalid_argument("u-range must be strictly inside one period (< 2*pi)");
}

}  // namespace detail

/// f = r (cos u, sin u, v). Conformal with |f_u| = |f_v| = r, outward normal,
/// H = 1/(2r). A nonzero shear samples f(u, v + shear*u) instead, which breaks
/// conformality on purpose (negative-control seed for the verify gates).
inline SurfaceJet gen_cylinder(const Grid& g, double radius = 1.0, double shear = 0.0) {
    detail::check_open_period(g);
    if (radius <= 0.0) throw std::invalid_argument("cylinder radius must be positive");
    QuatField f(g);
    Form1 df(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const double u = g.u(i), v = g.v(j) + shear * g.u(i);
            const double c = std::cos(u), s = std::sin(u);
            f.at(i, j) = Quat(ImQuat(radius * c, radius * s, radius * v));
            const Quat cu(ImQuat(-radius * s, radius * c, 0.0));
            const Quat cv(ImQuat(0.0, 0.0, radius));
            df.u_at(i, j) = cu + cv * shear;
            df.v_at(i, j) = cv;
        }
    return build_jet(f, df, true);
}

/// f = (cosh v cos u, cosh v sin u, v). Minimal, |f_u| = |f_v| = cosh v.
inline SurfaceJet gen_catenoid(const Grid& g) {
    detail::check_open_period(g);
    QuatField f(g);
    Form1 df(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const double u = g.u(i), v = g.v(j);
            const double c = std::cos(u), s = std::sin(u);
            const double ch = std::cosh(v), sh = std::sinh(v);
            f.at(i, j) = Quat(ImQuat(ch * c, ch * s, v));
            df.u_at(i, j) = Quat(ImQuat(-ch * s, ch * c, 0.0));
            df.v_at(i, j) = Quat(ImQuat(sh * c, sh * s, 1.0));
        }
    return build_jet(f, df, true);
}

/// Unit sphere by inverse stereographic projection,
/// f = (2u, 2v, u^2+v^2-1) / (u^2+v^2+1). Conformal, totally umbilic,
/// N = -f and H = -1 under the library's orientation.
inline SurfaceJet gen_sphere_stereo(const Grid& g) {
    QuatField f(g);
    Form1 df(g);
    for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) {
            const double u = g.u(i), v = g.v(j);
            const double D = u * u + v * v + 1.0;
            f.at(i, j) = Quat(ImQuat(2.0 * u / D, 2.0 * v / D, (u * u + v * v - 1.0) / D));
            const double D2 = D * D;
            df.u_at(i, j) = Quat(ImQuat(2.0 * (D - 2.0 * u * u) / D2, -4.0 * u * v / D2,
                                        4.0 * u / D2));
            df.v_at(i, j) = Quat(ImQuat(-4.0 * u * v / D2, 2.0 * (D - 2.0 * v * v) / D2,
                                        4.0 * v / D2));
        }
    return build_jet(f, df, true);
}

struct ProfileSample {
    double t = 0.0, r = 0.0, h = 0.0;
};

/// Planar profile (r(t), h(t)) interpolated by C^1 cubic Hermite pieces with
/// finite-difference endpoint slopes. t must be strictly increasing.
class ProfileCurve {
public:
    explicit ProfileCurve(std::vector<ProfileSample> samples) : s_(std::move(samples)) {
        if (s_.size() < 3) throw std::invalid_argument("profile needs at least 3 samples");
        for (std::size_t k = 1; k < s_.size(); ++k)
            if (s_[k].t <= s_[k - 1].t)
                throw std::invalid_argument("profile t-samples must be strictly increasing");
        dr_.resize(s_.size());
        dh_.resize(s_.size());
        for (std::size_t k = 0; k < s_.size(); ++k) {
            dr_[k] = slope(k, &ProfileSample::r);
            dh_[k] = slope(k, &ProfileSample::h);
        }
    }

    double t_min() const { return s_.front().t; }
    double t_max() const { return s_.back().t; }

    struct Point {
        double r, h, dr, dh;
    };

    Point eval(double t) const {
        const std::size_t k = interval(t);
        const double d = s_[k + 1].t - s_[k].t;
        const double x = (t - s_[k].t) / d;
        // Hermite basis and its derivative
        const double x2 = x * x, x3 = x2 * x;
        const double b0 = 2 * x3 - 3 * x2 + 1, b1 = x3 - 2 * x2 + x;
        const double b2 = -2 * x3 + 3 * x2, b3 = x3 - x2;
        const double c0 = (6 * x2 - 6 * x) / d, c1 = (3 * x2 - 4 * x + 1);
        const double c2 = (-6 * x2 + 6 * x) / d, c3 = (3 * x2 - 2 * x);
        Point p;
        p.r = b0 * s_[k].r + b1 * d * dr_[k] + b2 * s_[k + 1].r + b3 * d * dr_[k + 1];
        p.h = b0 * s_[k].h + b1 * d * dh_[k] + b2 * s_[k + 1].h + b3 * d * dh_[k + 1];
        p.dr = c0 * s_[k].r + c1 * dr_[k] + c2 * s_[k + 1].r + c3 * dr_[k + 1];
        p.dh = c0 * s_[k].h + c1 * dh_[k] + c2 * s_[k + 1].h + c3 * dh_[k + 1];
        return p;
    }

    const std::vector<ProfileSample>& samples() const { return s_; }

private:
    std::size_t interval(double t) const {
        auto it = std::upper_bound(s_.begin(), s_.end(), t,
                                   [](double x, const ProfileSample& p) { return x < p.t; });
        std::size_t k = static_cast<std::size_t>(std::distance(s_.begin(), it));
        if (k == 0) return 0;
        if (k >= s_.size()) return s_.size() - 2;
        return k - 1;
    }

    // three-point Lagrange slope, handles nonuniform t
    double slope(std::size_t k, double ProfileSample::*m) const {
        const std::size_t n = s_.size();
        const std::size_t a = (k == 0) ? 0 : (k == n - 1 ? n - 3 : k - 1);
        const double t0 = s_[a].t, t1 = s_[a + 1].t, t2 = s_[a + 2].t;
        const double y0 = s_[a].*m, y1 = s_[a + 1].*m, y2 = s_[a + 2].*m;
        const double t = s_[k].t;
        return y0 * (2 * t - t1 - t2) / ((t0 - t1) * (t0 - t2)) +
               y1 * (2 * t - t0 - t2) / ((t1 - t0) * (t1 - t2)) +
               y2 * (2 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
    }

    std::vector<ProfileSample> s_;
    std::vector<double> dr_, dh_;
};

namespace detail {

/// Adaptive trapezoid with one Richardson step per panel.
inline double adaptive_integral(const std::function<double(double)>& fn, double a, double b,
                                double tol, int depth = 0) {
    const double m = 0.5 * (a + b);
    const double fa = fn(a), fb = fn(b), fm = fn(m);
    const double t1 = 0.5 * (b - a) * (fa + fb);
    const double t2 = 0.25 * (b - a) * (fa + 2.0 * fm + fb);
    if (depth >= 40 || std::abs(t2 - t1) < 3.0 * tol) return t2 + (t2 - t1) / 3.0;
    return adaptive_integral(fn, a, m, 0.5 * tol, depth + 1) +
           adaptive_integral(fn, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Arc-length style reparametrization of a profile so the revolution surface
/// f(u, v) = (r cos u, r sin u, h) becomes conformal: solves
/// dt/dv = r(t) / sqrt(r'(t)^2 + h'(t)^2) and samples t on the grid's v-range,
/// anchored at t(v0) = t_min.
class ConformalReparam {
public:
    ConformalReparam(const ProfileCurve& curve, double quad_tol = 1e-10) : curve_(curve) {
        const auto& s = curve.samples();
        auto psi = [this](double t) { return integrand(t); };
        knot_v_.resize(s.size());
        knot_v_[0] = 0.0;
        for (std::size_t k = 1; k < s.size(); ++k) {
            // knot-aligned panels keep the integrand smooth inside each call
            const double piece = detail::adaptive_integral(psi, s[k - 1].t, s[k].t,
                                                           quad_tol / double(s.size()));
            if (piece <= 0.0) throw std::domain_error("non-monotone reparametrization");
            knot_v_[k] = knot_v_[k - 1] + piece;
        }
    }

    /// Total conformal-parameter length available along the profile.
    double v_extent() const { return knot_v_.back(); }

    /// t such that the accumulated conformal parameter from t_min equals dv.
    double t_at(double dv) const {
        const auto& s = curve_.samples();
        if (dv < -1e-12 || dv > knot_v_.back() + 1e-12)
            throw std::invalid_argument("grid v-range exceeds the profile's conformal extent");
        dv = std::clamp(dv, 0.0, knot_v_.back());
        auto it = std::upper_bound(knot_v_.begin(), knot_v_.end(), dv);
        std::size_t k = static_cast<std::size_t>(std::distance(knot_v_.begin(), it));
        k = (k == 0) ? 0 : std::min(k - 1, knot_v_.size() - 2);

        // Newton on g(t) = v(t) - dv with bisection safeguard
        double lo = s[k].t, hi = s[k + 1].t;
        double t = 0.5 * (lo + hi);
        for (int iter = 0; iter < 60; ++iter) {
            const double g = knot_v_[k] +
                             detail::adaptive_integral([this](double x) { return integrand(x); },
                                                       s[k].t, t, 1e-13) -
                             dv;
            if (std::abs(g) < 1e-12) break;
            if (g > 0.0) hi = t; else lo = t;
            const double step = g / integrand(t);
            t -= step;
            if (t <= lo || t >= hi) t = 0.5 * (lo + hi);
        }
        return t;
    }

private:
    double integrand(double t) const {
        const auto p = curve_.eval(t);
        if (p.r <= 0.0) throw std::domain_error("profile radius must stay positive");
        const double speed = std::hypot(p.dr, p.dh);
        if (speed == 0.0) throw std::domain_error("non-monotone reparametrization");
        return speed / p.r;  // dv/dt
    }

    const ProfileCurve& curve_;
    std::vector<double> knot_v_;
};

inline SurfaceJet gen_revolution(const Grid& g, const ProfileCurve& profile) {
    detail::check_open_period(g);
    ConformalReparam rep(profile);
    if (g.v_max() - g.v0 > rep.v_extent() + 1e-12)
        throw std::invalid_argument("grid v-range exceeds the profile's conformal extent");

    std::vector<double> t_of_v(g.nv);
    for (int j = 0; j < g.nv; ++j) t_of_v[j] = rep.t_at(g.v(j) - g.v0);

    QuatField f(g);
    Form1 df(g);
    for (int j = 0; j < g.nv; ++j) {
        const auto p = profile.eval(t_of_v[j]);
        const double speed = std::hypot(p.dr, p.dh);
        const double tp = p.r / speed;  // dt/dv
        for (int i = 0; i < g.nu; ++i) {
            const double c = std::cos(g.u(i)), s = std::sin(g.u(i));
            f.at(i, j) = Quat(ImQuat(p.r * c, p.r * s, p.h));
            df.u_at(i, j) = Quat(ImQuat(-p.r * s, p.r * c, 0.0));
            df.v_at(i, j) = Quat(ImQuat(tp * p.dr * c, tp * p.dr * s, tp * p.dh));
        }
    }
    return build_jet(f, df, true);
}

}  // namespace bonnetforge
