#pragma once

#include <cmath>
#include <stdexcept>

namespace bonnetforge {

struct Quat;

/// Purely imaginary quaternion, i.e. a point or vector of R^3 = Im H.
/// The scalar part is zero by construction; products that can leave Im H
/// go through Quat.
struct ImQuat {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr ImQuat() = default;
    constexpr ImQuat(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr ImQuat operator+(const ImQuat& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr ImQuat operator-(const ImQuat& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr ImQuat operator-() const { return {-x, -y, -z}; }
    constexpr ImQuat operator*(double c) const { return {c * x, c * y, c * z}; }

    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
};

constexpr inline ImQuat operator*(double c, const ImQuat& p) { return p * c; }

constexpr inline double dot(const ImQuat& a, const ImQuat& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr inline ImQuat cross(const ImQuat& a, const ImQuat& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Quaternion w + x i + y j + z k, Hamilton convention ij = k.
struct Quat {
    double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

    constexpr Quat() = default;
    constexpr Quat(double w_) : w(w_) {}
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
    constexpr Quat(const ImQuat& p) : w(0.0), x(p.x), y(p.y), z(p.z) {}

    static constexpr Quat i() { return {0, 1, 0, 0}; }
    static constexpr Quat j() { return {0, 0, 1, 0}; }
    static constexpr Quat k() { return {0, 0, 0, 1}; }

    constexpr Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    constexpr Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    constexpr Quat operator-() const { return {-w, -x, -y, -z}; }
    constexpr Quat operator*(double c) const { return {c * w, c * x, c * y, c * z}; }
    constexpr Quat operator/(double c) const { return {w / c, x / c, y / c, z / c}; }

    Quat& operator+=(const Quat& o) { w += o.w; x += o.x; y += o.y; z += o.z; return *this; }
    Quat& operator-=(const Quat& o) { w -= o.w; x -= o.x; y -= o.y; z -= o.z; return *this; }

    constexpr Quat operator*(const Quat& q) const {
        return {w * q.w - x * q.x - y * q.y - z * q.z,
                w * q.x + x * q.w + y * q.z - z * q.y,
                w * q.y - x * q.z + y * q.w + z * q.x,
                w * q.z + x * q.y - y * q.x + z * q.w};
    }

    double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }

    constexpr double scalar() const { return w; }
    constexpr ImQuat imag() const { return {x, y, z}; }
};

constexpr inline Quat operator*(double c, const Quat& q) { return q * c; }
constexpr inline Quat operator+(double c, const Quat& q) { return Quat(c) + q; }
constexpr inline Quat operator-(double c, const Quat& q) { return Quat(c) - q; }

constexpr inline Quat conj(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

/// Euclidean R^4 inner product of the coefficient vectors.
constexpr inline double dot(const Quat& p, const Quat& q) {
    return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
}

inline Quat inverse(const Quat& q) {
    const double n2 = q.norm2();
    if (n2 == 0.0) throw std::domain_error("non-invertible quaternion");
    return conj(q) / n2;
}

/// Exact decomposition q = scalar + imaginary.
inline std::pair<double, ImQuat> split(const Quat& q) { return {q.w, q.imag()}; }

/// For imaginary p: p^{-1} = -p / |p|^2.
inline ImQuat inverse(const ImQuat& p) {
    const double n2 = p.norm2();
    if (n2 == 0.0) throw std::domain_error("non-invertible quaternion");
    return p * (-1.0 / n2);
}

inline Quat normalized(const Quat& q) {
    const double n = q.norm();
    if (n == 0.0) throw std::domain_error("cannot normalize zero quaternion");
    return q / n;
}

/// Pointwise spin action p -> conj(lambda) p lambda. Maps Im H to Im H;
/// the scalar part of the product vanishes identically and is dropped.
inline ImQuat sandwich(const Quat& lam, const ImQuat& p) {
    return (conj(lam) * Quat(p) * lam).imag();
}

}  // namespace bonnetforge
